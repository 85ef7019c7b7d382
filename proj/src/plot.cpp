#include "clap/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace clap {

namespace {

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double left, right, top, bottom;
  std::size_t n;

  double x(double t) const { return left + (right - left) * t / static_cast<double>(std::max<std::size_t>(n - 1, 1)); }
};

// Polyline points; long channels are reduced to min and max per pixel column.
std::string channel_points(std::span<const double> values, const Frame& f) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto y = [&](double v) { return f.bottom - (f.bottom - f.top) * (v - lo) / (hi - lo); };

  std::ostringstream out;
  const std::size_t n = values.size();
  const auto columns = static_cast<std::size_t>(f.right - f.left);
  if (n <= 2 * columns) {
    for (std::size_t t = 0; t < n; ++t) out << fmt(f.x(static_cast<double>(t))) << ',' << fmt(y(values[t])) << ' ';
    return out.str();
  }
  for (std::size_t c = 0; c < columns; ++c) {
    const std::size_t begin = c * n / columns, end = (c + 1) * n / columns;
    std::size_t imin = begin, imax = begin;
    for (std::size_t t = begin; t < end; ++t) {
      if (values[t] < values[imin]) imin = t;
      if (values[t] > values[imax]) imax = t;
    }
    for (std::size_t t : {std::min(imin, imax), std::max(imin, imax)}) {
      out << fmt(f.x(static_cast<double>(t))) << ',' << fmt(y(values[t])) << ' ';
    }
  }
  return out.str();
}

}  // namespace

std::string render_svg(const TimeSeries& ts, const DetectReport& report, const PlotOptions& options) {
  if (report.length != ts.length()) {
    throw Error(ErrorKind::ReportMismatch, "report covers " + std::to_string(report.length) +
                                               " points but the series has " + std::to_string(ts.length()));
  }
  if (report.channels != 0 && report.channels != ts.channels()) {
    throw Error(ErrorKind::ReportMismatch, "report has " + std::to_string(report.channels) +
                                               " channels but the series has " + std::to_string(ts.channels()));
  }
  for (std::size_t cp : report.change_points) {
    if (cp == 0 || cp >= ts.length()) {
      throw Error(ErrorKind::ReportMismatch, "change point " + std::to_string(cp) + " lies outside the series");
    }
  }

  const std::size_t panels = ts.channels() + 1;
  const double gap = 12.0;
  const double width = options.width;
  const double height = 2.0 * options.margin + static_cast<double>(panels) * (options.panel_height + gap) - gap;
  const double left = options.margin + 40.0, right = width - options.margin;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << options.width << ' ' << fmt(height) << "\">\n"
      << "<title>" << escape(report.name) << "</title>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto frame_of = [&](std::size_t panel) {
    const double top = options.margin + static_cast<double>(panel) * (options.panel_height + gap);
    return Frame{left, right, top, top + options.panel_height, ts.length()};
  };

  for (std::size_t c = 0; c < ts.channels(); ++c) {
    const Frame f = frame_of(c);
    svg << "<g class=\"panel channel\">\n"
        << "<rect x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\"" << fmt(f.right - f.left)
        << "\" height=\"" << fmt(f.bottom - f.top) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n"
        << "<text x=\"" << fmt(f.left - 6) << "\" y=\"" << fmt((f.top + f.bottom) / 2)
        << "\" font-size=\"11\" text-anchor=\"end\">ch " << c + 1 << "</text>\n"
        << "<polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\" points=\""
        << channel_points(ts.channel(c), f) << "\"/>\n"
        << "</g>\n";
  }

  // One level per distinct state, lowest label at the bottom.
  const Labels states = run_length_decode(report.state_sequence);
  std::map<Label, std::size_t> level;
  for (Label l : states) level.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, index] : level) index = next++;
  const Frame f = frame_of(ts.channels());
  auto level_y = [&](Label l) {
    if (level.size() == 1) return (f.top + f.bottom) / 2;
    return f.bottom - 8.0 - (f.bottom - f.top - 16.0) * static_cast<double>(level.at(l)) /
                                static_cast<double>(level.size() - 1);
  };
  svg << "<g class=\"panel states\">\n"
      << "<rect x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\"" << fmt(f.right - f.left)
      << "\" height=\"" << fmt(f.bottom - f.top) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n"
      << "<text x=\"" << fmt(f.left - 6) << "\" y=\"" << fmt((f.top + f.bottom) / 2)
      << "\" font-size=\"11\" text-anchor=\"end\">state</text>\n";
  std::size_t t = 0;
  std::ostringstream path;
  for (const auto& [label, length] : report.state_sequence) {
    const double y = level_y(label);
    path << (t == 0 ? "M" : " V") << (t == 0 ? fmt(f.x(0)) + " " + fmt(y) : fmt(y));
    t += length;
    path << " H" << fmt(f.x(static_cast<double>(t - 1)));
    svg << "<rect class=\"state\" data-state=\"" << label << "\" x=\"" << fmt(f.x(static_cast<double>(t - length)))
        << "\" y=\"" << fmt(f.top) << "\" width=\""
        << fmt(f.x(static_cast<double>(t - 1)) - f.x(static_cast<double>(t - length))) << "\" height=\""
        << fmt(f.bottom - f.top) << "\" fill=\"" << kPalette[level.at(label) % 10] << "\" fill-opacity=\"0.15\"/>\n";
  }
  svg << "<path class=\"steps\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" d=\"" << path.str() << "\"/>\n"
      << "</g>\n";

  const double top = frame_of(0).top, bottom = f.bottom;
  svg << "<g class=\"change-points\" stroke=\"#d62728\" stroke-dasharray=\"4 3\">\n";
  for (std::size_t cp : report.change_points) {
    const double x = frame_of(0).x(static_cast<double>(cp));
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(bottom)
        << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace clap
