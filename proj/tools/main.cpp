#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clap/commands.hpp"
#include "clap/config.hpp"
#include "clap/io.hpp"
#include "clap/plot.hpp"
#include "clap/report.hpp"

namespace {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string output_path;
  std::string format;
  std::vector<std::string> settings;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Random seed (overrides the config file)");
  cmd->add_option("--config", o.config_path, "Flat key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--output,-o", o.output_path, "Write the result here instead of stdout");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--set", o.settings, "Override one config key, as key=value")->take_all();
  cmd->add_flag("--no-timing", o.no_timing, "Leave timing fields empty so output is reproducible byte for byte");
}

clap::RunConfig resolve_config(const CommonOptions& o) {
  clap::RunConfig config = o.config_path.empty() ? clap::RunConfig{} : clap::load_config(o.config_path);
  for (const std::string& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw clap::Error(clap::ErrorKind::Config, "--set expects key=value, got '" + s + "'");
    clap::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) config.seed = *o.seed;
  if (!o.format.empty()) clap::apply_setting(config, "output_format", o.format);
  return config;
}

void emit(const CommonOptions& o, const std::string& text) {
  if (o.output_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(o.output_path, std::ios::binary);
  if (!out) throw clap::Error(clap::ErrorKind::Io, "cannot write " + o.output_path);
  out << text;
  if (!out) throw clap::Error(clap::ErrorKind::Io, "cannot write " + o.output_path);
}

std::string segments_csv(const clap::DetectReport& report) {
  std::string out = "offset,label\n";
  std::size_t offset = 0;
  for (const auto& [label, length] : report.state_sequence) {
    out += std::to_string(offset) + "," + std::to_string(label) + "\n";
    offset += length;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised state detection in time series"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string series_path, annotation_path, manifest_path, report_path;
  std::size_t jobs = 1;

  auto* detect = app.add_subcommand("detect", "Segment a series and label its states");
  detect->add_option("series", series_path, "Series CSV")->required();
  add_common(detect, common);

  auto* eval = app.add_subcommand("eval", "Detect states and score them against an annotation");
  eval->add_option("series", series_path, "Series CSV")->required();
  eval->add_option("annotation", annotation_path, "Annotation CSV (offset,label)")->required();
  add_common(eval, common);

  auto* bench = app.add_subcommand("bench", "Score every dataset of a manifest");
  bench->add_option("manifest", manifest_path, "Lines of series_path,annotation_path")->required();
  bench->add_option("--jobs,-j", jobs, "Datasets processed in parallel")->check(CLI::Range(1, 256));
  add_common(bench, common);

  auto* plot = app.add_subcommand("plot", "Draw a series with a detect report as SVG");
  plot->add_option("series", series_path, "Series CSV")->required();
  plot->add_option("report", report_path, "JSON report written by detect")->required();
  add_common(plot, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const clap::RunConfig config = resolve_config(common);
    const clap::RunFlags flags{!common.no_timing, jobs};
    const bool csv = config.output_format == clap::OutputFormat::Csv;

    if (detect->parsed()) {
      const clap::TimeSeries ts = clap::load_series(series_path);
      const clap::DetectReport report = clap::run_detect(ts, config, clap::RngSeed{config.seed}, flags);
      emit(common, csv ? segments_csv(report) : clap::to_json(report).dump(2) + "\n");
    } else if (eval->parsed()) {
      const clap::TimeSeries ts = clap::load_series(series_path);
      const clap::Annotation truth = clap::load_annotation(annotation_path);
      const clap::ScoreRow row = clap::run_eval(ts, truth, config, clap::RngSeed{config.seed}, flags);
      emit(common, csv ? clap::score_csv_header() + "\n" + clap::to_csv(row) + "\n" : clap::to_json(row).dump(2) + "\n");
    } else if (bench->parsed()) {
      const auto entries = clap::load_manifest(manifest_path);
      const clap::BenchResult result = clap::run_bench(entries, config, flags);
      for (const clap::ScoreRow& row : result.rows) {
        if (!row.scored()) std::cerr << row.name << ": " << row.message << "\n";
      }
      const bool json = config.output_format == clap::OutputFormat::Json;
      emit(common, json ? clap::to_json(result).dump(2) + "\n" : clap::to_csv(result));
    } else if (plot->parsed()) {
      const clap::TimeSeries ts = clap::load_series(series_path);
      clap::Json json;
      try {
        json = clap::Json::parse(clap::read_file(report_path));
      } catch (const clap::Json::parse_error& e) {
        throw clap::Error(clap::ErrorKind::ParseError, "report is not valid JSON: " + std::string(e.what()));
      }
      emit(common, clap::render_svg(ts, clap::report_from_json(json)));
    }
  } catch (const clap::Error& e) {
    std::cout << clap::error_json(e.kind(), e.what()).dump(2) << "\n";
    std::cerr << "error (" << clap::error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << clap::Json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
