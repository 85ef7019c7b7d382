#pragma once

#include <string>

#include "clap/core.hpp"
#include "clap/report.hpp"

namespace clap {

struct PlotOptions {
  int width = 1000;
  int panel_height = 110;
  int margin = 40;
};

// Standalone SVG: a line panel per channel, then a panel with the state
// sequence as a step function (one level per state), and dashed vertical
// lines at the change points. Throws ReportMismatch when the report does not
// cover the series.
std::string render_svg(const TimeSeries& ts, const DetectReport& report, const PlotOptions& options = {});

}  // namespace clap
