#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace torusflow::cli {

/// Exit codes shared by all subcommands.
enum ExitCode { kSuccess = 0, kStopped = 1, kUsage = 2, kInternal = 3 };

/// Each command writes into <output.dir>/<config hash>/ and returns an exit code.
int cmd_simulate(const Config& config, std::ostream& log);
int cmd_stability(const Config& config, std::ostream& log);
int cmd_verify(const Config& config, std::ostream& log);
int cmd_sweep(const Config& config, std::ostream& log);

struct PlotRequest {
    std::vector<std::string> traces;     // trace CSV files, overlaid
    std::vector<std::string> snapshots;  // snapshot files, overlaid
    std::string column = "dissipation";
    bool log_y = true;
    std::string output;
};
int cmd_plot(const PlotRequest& request, std::ostream& log);

/// Directory that holds the outputs of a config.
std::string output_dir(const Config& config);

}  // namespace torusflow::cli
