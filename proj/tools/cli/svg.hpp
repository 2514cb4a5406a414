#pragma once

#include <string>
#include <vector>

#include "torusflow/curve.hpp"

namespace torusflow::cli {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
    std::string config_hash;
};

/// Static line plot; identical input gives identical bytes. Throws ConfigError when
/// there is nothing to draw (no series, or no finite points after the log filter).
std::string line_plot(const std::vector<Series>& series, const PlotOptions& opt);
/// Stem plot of values against their index.
std::string stem_plot(const std::vector<double>& values, const PlotOptions& opt);
/// Curves drawn on the unit cell, each loop wrapped into it.
std::string curve_plot(const std::vector<PeriodicCurve>& curves, const std::vector<std::string>& names,
                       const PlotOptions& opt);

}  // namespace torusflow::cli
