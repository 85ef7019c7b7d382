#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "clap/commands.hpp"
#include "clap/config.hpp"
#include "clap/io.hpp"
#include "clap/plot.hpp"
#include "clap/report.hpp"
#include "clap/rng.hpp"
#include "support/expect.hpp"
#include "support/synthetic.hpp"

using namespace clap;
using clap::testing::error_of;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("clap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

std::string series_text(const TimeSeries& ts) {
  std::ostringstream out;
  write_series(out, ts);
  return out.str();
}

std::string annotation_text(const clap::testing::Synthetic& syn) {
  std::string out = "offset,label\n";
  for (std::size_t s = 0; s < syn.truth.num_segments(); ++s) {
    out += std::to_string(syn.truth.segment_begin(s)) + "," + std::to_string(syn.segment_states[s]) + "\n";
  }
  return out;
}

struct Run {
  int status;
  std::string out;
};

Run run_cli(const TempDir& dir, const std::string& args) {
  const fs::path out = dir.path / "stdout.txt", err = dir.path / "stderr.txt";
  const std::string command =
      std::string(CLAP_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(command.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(out)};
}

// Tag nesting, quoted attributes and entity use; enough to catch broken markup.
bool well_formed_xml(const std::string& text) {
  static const std::regex attribute(R"re(\s+[A-Za-z_:][-\w:.]*="[^"<]*")re");
  static const std::regex name(R"re([A-Za-z_:][-\w:.]*)re");
  std::vector<std::string> open;
  std::size_t pos = 0;
  bool root_seen = false;
  while (pos < text.size()) {
    const std::size_t lt = text.find('<', pos);
    const std::string chars = text.substr(pos, lt == std::string::npos ? std::string::npos : lt - pos);
    for (std::size_t amp = chars.find('&'); amp != std::string::npos; amp = chars.find('&', amp + 1)) {
      if (!std::regex_search(chars.substr(amp), std::regex("^&(amp|lt|gt|quot|apos);"))) return false;
    }
    if (lt == std::string::npos) break;
    const std::size_t gt = text.find('>', lt);
    if (gt == std::string::npos) return false;
    std::string tag = text.substr(lt + 1, gt - lt - 1);
    pos = gt + 1;
    if (tag.starts_with("?")) {
      if (!tag.ends_with("?")) return false;
      continue;
    }
    if (tag.starts_with("/")) {
      if (open.empty() || open.back() != tag.substr(1)) return false;
      open.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    if (self_closing) tag.pop_back();
    std::smatch m;
    if (!std::regex_search(tag, m, name) || m.position(0) != 0) return false;
    const std::string element = m.str(0);
    std::string rest = tag.substr(element.size());
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
    while (!rest.empty()) {
      std::smatch a;
      if (!std::regex_search(rest, a, attribute) || a.position(0) != 0) return false;
      rest = rest.substr(a.length(0));
    }
    if (open.empty() && root_seen) return false;
    root_seen = true;
    if (!self_closing) open.push_back(element);
  }
  return root_seen && open.empty();
}

std::set<std::string> step_levels(const std::string& svg) {
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex(R"re(class="steps"[^>]* d="([^"]*)")re")));
  const std::string d = m.str(1);
  std::set<std::string> levels;
  std::smatch p;
  REQUIRE(std::regex_search(d, p, std::regex(R"(^M[\d.]+ ([\d.]+))")));
  levels.insert(p.str(1));
  const std::regex vertical(R"(V([\d.]+))");
  for (std::sregex_iterator it(d.begin(), d.end(), vertical), end; it != end; ++it) {
    levels.insert(it->str(1));
  }
  return levels;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++count;
  return count;
}

RunConfig quick_config() {
  RunConfig config;
  config.kernel_count = 300;
  return config;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("series files") {
    const TimeSeries a = parse_series("1.0\n2.0\n3.0\n");
    CHECK(a.length() == 3);
    CHECK(a.channels() == 1);
    const TimeSeries b = parse_series("accX,accY\n0.1,0.2\n0.3,0.4\n");
    CHECK(b.length() == 2);
    CHECK(b.channels() == 2);
    CHECK(b.at(1, 1) == 0.4);
    CHECK(parse_series("1\r\n\r\n2\r\n").length() == 2);

    CHECK(error_of([] { parse_series("1,2\n3\n4,5\n"); }) == ErrorKind::RaggedRows);
    try {
      parse_series("1,2\n3\n4,5\n");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(error_of([] { parse_series(""); }) == ErrorKind::EmptyFile);
    CHECK(error_of([] { parse_series("a,b\n"); }) == ErrorKind::EmptyFile);
    CHECK(error_of([] { parse_series("1\nx\n"); }) == ErrorKind::ParseError);
    CHECK(error_of([] { parse_series("1\nnan\n3\n"); }) == ErrorKind::NonFinite);
  }

  TEST_CASE("time columns are checked and dropped") {
    const TimeSeries ts = parse_series("time,x,y\n0,1,2\n1,3,4\n2.5,5,6\n");
    CHECK(ts.channels() == 2);
    CHECK(ts.at(2, 0) == 5.0);
    CHECK(error_of([] { parse_series("t,x\n0,1\n2,2\n1,3\n"); }) == ErrorKind::ParseError);
    CHECK(parse_series("x,y\n0,1\n2,2\n1,3\n").channels() == 2);
  }

  TEST_CASE("written series read back exactly") {
    Rng rng(RngSeed{1}, "round");
    std::vector<std::vector<double>> channels(3, std::vector<double>(200));
    for (auto& c : channels) {
      for (double& v : c) v = rng.normal() * std::pow(10.0, rng.uniform(-200, 200));
    }
    const TimeSeries ts = TimeSeries::from_channels(channels);
    const TimeSeries back = parse_series(series_text(ts));
    REQUIRE(back.length() == 200);
    REQUIRE(back.channels() == 3);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 200; ++t) REQUIRE(back.at(t, c) == ts.at(t, c));
    }
  }

  TEST_CASE("annotation files") {
    const Annotation two = parse_annotation("offset,label\n0,1\n50,2\n");
    CHECK(two.segmentation(100).change_points() == std::vector<std::size_t>{50});
    CHECK(two.labels == Labels{1, 2});
    const Annotation one = parse_annotation("offset,label\n0,1\n");
    CHECK(one.segmentation(10).change_points().empty());
    CHECK(one.states(4).states == Labels{1, 1, 1, 1});

    CHECK(error_of([] { parse_annotation("offset,label\n0,1\n60,2\n40,1\n"); }) ==
          ErrorKind::NonMonotonicOffsets);
    CHECK(error_of([] { parse_annotation("offset,label\n5,1\n"); }) == ErrorKind::MissingZeroOffset);
    CHECK(error_of([] { parse_annotation("start,state\n0,1\n"); }) == ErrorKind::ParseError);
    CHECK(error_of([] { parse_annotation("offset,label\n0,x\n"); }) == ErrorKind::ParseError);
    CHECK(error_of([&] { two.segmentation(50); }) == ErrorKind::AnnotationMismatch);
  }

  TEST_CASE("config keys and precedence") {
    RunConfig config;
    apply_config_text(config, "# defaults overridden\nkernel_count = 500\nseed=4\nconfusion_mode=count\n");
    CHECK(config.kernel_count == 500);
    CHECK(config.seed == 4);
    CHECK(config.confusion_mode == ConfusionMode::Count);
    CHECK(error_of([&] { apply_setting(config, "kernels", "5"); }) == ErrorKind::Config);
    CHECK(error_of([&] { apply_setting(config, "folds", "1"); }) == ErrorKind::Config);
    CHECK(error_of([&] { apply_setting(config, "suss_threshold", "1.5"); }) == ErrorKind::Config);
    CHECK(error_of([&] { apply_config_text(config, "seed\n"); }) == ErrorKind::Config);

    RunConfig parsed;
    apply_config_text(parsed, to_config_text(config));
    CHECK(to_config_text(parsed) == to_config_text(config));
    CHECK(config_keys().size() == 13);

    // File, then --set, then --seed.
    TempDir dir;
    const auto syn = clap::testing::recurring_states(3, 2, 2, 600, 700);
    const auto series = dir.write("s.csv", series_text(syn.series));
    const auto conf = dir.write("c.conf", "kernel_count=200\nseed=1\n");
    const Run from_file = run_cli(dir, "detect " + series.string() + " --config " + conf.string() + " --no-timing");
    const Run with_seed = run_cli(dir, "detect " + series.string() + " --config " + conf.string() +
                                           " --seed 1 --set seed=9 --no-timing");
    const Run with_set = run_cli(dir, "detect " + series.string() + " --config " + conf.string() +
                                          " --set kernel_count=200 --no-timing");
    CHECK(from_file.status == 0);
    CHECK(with_seed.out == from_file.out);
    CHECK(with_set.out == from_file.out);
    const Run bad = run_cli(dir, "detect " + series.string() + " --set nonsense=1");
    CHECK(bad.status == 1);
    CHECK(Json::parse(bad.out)["error"]["kind"] == "config");
  }

  TEST_CASE("report JSON round trip") {
    const auto syn = clap::testing::recurring_states(2, 3, 2, 700, 800);
    const DetectReport report = run_detect(syn.series, quick_config(), RngSeed{1}, RunFlags{false});
    const Json json = to_json(report);
    CHECK(json["wall_time_seconds"].is_null());
    const DetectReport back = report_from_json(Json::parse(json.dump()));
    CHECK(back.length == report.length);
    CHECK(back.change_points == report.change_points);
    CHECK(back.state_sequence == report.state_sequence);
    CHECK(back.profile_score == report.profile_score);
    CHECK(back.merge_trace.size() == report.merge_trace.size());
    CHECK(to_json(back)["state_sequence"] == json["state_sequence"]);
    CHECK(run_length_decode(report.state_sequence).size() == syn.series.length());

    Json broken = json;
    broken["state_sequence"][0][1] = 1;
    CHECK(error_of([&] { report_from_json(broken); }) == ErrorKind::ParseError);
    CHECK(error_of([] { report_from_json(Json::object()); }) == ErrorKind::ParseError);
  }

  TEST_CASE("eval against the truth") {
    const auto ts = TimeSeries::from_channels({std::vector<double>(500, 1.0)});
    const ScoreRow row = run_eval(ts, parse_annotation("offset,label\n0,1\n"), quick_config(), RngSeed{1});
    CHECK(*row.covering == 1.0);
    CHECK(*row.ami == 1.0);
    CHECK(*row.num_states_pred == 1.0);
    CHECK(row.status == "ok");
    CHECK(error_of([&] { run_eval(ts, parse_annotation("offset,label\n0,1\n600,2\n"), quick_config(), RngSeed{1}); }) ==
          ErrorKind::AnnotationMismatch);
  }

  TEST_CASE("bench isolates failures and is reproducible") {
    TempDir dir;
    std::string manifest = "# two good, one broken\n";
    for (std::uint64_t seed : {1, 2}) {
      const auto syn = clap::testing::recurring_states(seed, 3, 2, 700, 900);
      dir.write("good" + std::to_string(seed) + ".csv", series_text(syn.series));
      dir.write("good" + std::to_string(seed) + ".ann", annotation_text(syn));
      manifest += "good" + std::to_string(seed) + ".csv,good" + std::to_string(seed) + ".ann\n";
    }
    dir.write("broken.csv", "1\n2\nthree\n");
    dir.write("broken.ann", "offset,label\n0,1\n");
    manifest += "broken.csv, broken.ann\n";
    const auto manifest_path = dir.write("bench.txt", manifest);

    const BenchResult result = run_bench(load_manifest(manifest_path), quick_config(), RunFlags{false});
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].scored());
    CHECK(result.rows[1].scored());
    CHECK(result.rows[2].status == "error:parse_error");
    CHECK(*result.mean.ami == doctest::Approx((*result.rows[0].ami + *result.rows[1].ami) / 2).epsilon(1e-12));
    CHECK(std::abs(*result.mean.covering - (*result.rows[0].covering + *result.rows[1].covering) / 2) < 1e-9);
    const double half_gap = std::abs(*result.rows[0].ami - *result.rows[1].ami) / 2;
    CHECK(std::abs(*result.std.ami - half_gap) < 1e-9);

    const BenchResult parallel =
        run_bench(load_manifest(manifest_path), quick_config(), RunFlags{false, 3});
    CHECK(to_csv(parallel) == to_csv(result));

    const std::string args = "bench " + manifest_path.string() + " --set kernel_count=300 --no-timing";
    const Run first = run_cli(dir, args), second = run_cli(dir, args);
    CHECK(first.status == 0);
    CHECK(first.out == second.out);
    CHECK(first.out == to_csv(result));
    CHECK(first.out.starts_with("name,covering,ami,num_states_pred,num_states_true,runtime_s,status\n"));
    CHECK(count_of(first.out, "\n") == 6);
    const Run json = run_cli(dir, args + " --format json");
    CHECK(Json::parse(json.out)["rows"].size() == 3);

    CHECK(error_of([] { parse_manifest("a.csv\n", "."); }) == ErrorKind::ParseError);
    const auto entries = parse_manifest("x.csv,/abs/y.csv\n", "/base");
    CHECK(entries[0].series == fs::path("/base/x.csv"));
    CHECK(entries[0].annotation == fs::path("/abs/y.csv"));
  }

  TEST_CASE("plot output") {
    const auto syn = clap::testing::recurring_states(4, 3, 2, 700, 800);
    DetectReport report;
    report.name = "a<b&c";
    report.length = syn.series.length();
    report.channels = 1;
    report.change_points = syn.truth.change_points();
    report.state_sequence = run_length_encode(syn.states.states);
    const std::string svg = render_svg(syn.series, report);
    CHECK(well_formed_xml(svg));
    CHECK(step_levels(svg).size() == 2);
    CHECK(count_of(svg, "class=\"panel") == 2);
    CHECK(count_of(svg, "<line ") == 2);

    std::vector<std::vector<double>> nine(9, std::vector<double>(300));
    for (std::size_t c = 0; c < 9; ++c) {
      for (std::size_t t = 0; t < 300; ++t) nine[c][t] = std::sin(static_cast<double>(t * (c + 1)) / 30.0);
    }
    DetectReport single;
    single.length = 300;
    single.state_sequence = {{1, 300}};
    const std::string multi = render_svg(TimeSeries::from_channels(nine), single);
    CHECK(well_formed_xml(multi));
    CHECK(count_of(multi, "class=\"panel") == 10);
    CHECK(step_levels(multi).size() == 1);

    CHECK_FALSE(well_formed_xml("<svg><g></svg>"));
    single.length = 299;
    single.state_sequence = {{1, 299}};
    CHECK(error_of([&] { render_svg(TimeSeries::from_channels(nine), single); }) == ErrorKind::ReportMismatch);
  }

  TEST_CASE("command line end to end") {
    TempDir dir;
    const auto syn = clap::testing::recurring_states(5, 3, 2, 700, 800);
    const auto series = dir.write("s.csv", series_text(syn.series));
    const auto annotation = dir.write("s.ann", annotation_text(syn));
    const std::string opts = " --set kernel_count=300 --no-timing";

    const Run detect = run_cli(dir, "detect " + series.string() + opts + " -o " + (dir.path / "r.json").string());
    CHECK(detect.status == 0);
    const Json report = Json::parse(read_file(dir.path / "r.json"));
    CHECK(report["name"] == "s");
    CHECK(report["length"] == syn.series.length());
    for (const char* key : {"window_width", "change_points", "num_states", "state_sequence", "profile_score",
                            "merge_trace", "wall_time_seconds"}) {
      CHECK(report.contains(key));
    }

    const Run csv = run_cli(dir, "detect " + series.string() + opts + " --format csv");
    CHECK(csv.status == 0);
    CHECK(parse_annotation(csv.out).offsets.size() == report["state_sequence"].size());

    const Run eval = run_cli(dir, "eval " + series.string() + " " + annotation.string() + opts);
    CHECK(eval.status == 0);
    CHECK(Json::parse(eval.out)["status"] == "ok");

    const Run plot = run_cli(dir, "plot " + series.string() + " " + (dir.path / "r.json").string());
    CHECK(plot.status == 0);
    CHECK(well_formed_xml(plot.out));

    std::string flat_text;
    for (int i = 0; i < 1000; ++i) flat_text += "4.0\n";
    const auto flat = dir.write("flat.csv", flat_text);
    const Run constant = run_cli(dir, "detect " + flat.string() + opts);
    CHECK(constant.status == 0);
    CHECK(Json::parse(constant.out)["change_points"].empty());
    CHECK(Json::parse(constant.out)["num_states"] == 1);

    const Run missing = run_cli(dir, "detect " + (dir.path / "nope.csv").string());
    CHECK(missing.status == 1);
    CHECK(Json::parse(missing.out)["error"]["kind"] == "io");

    const Run mismatch = run_cli(dir, "plot " + flat.string() + " " + (dir.path / "r.json").string());
    CHECK(mismatch.status == 1);
    CHECK(Json::parse(mismatch.out)["error"]["kind"] == "report_mismatch");
  }
}
