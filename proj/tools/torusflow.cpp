#include <CLI11.hpp>
#include <iostream>

#include "cli/commands.hpp"
#include "torusflow/errors.hpp"

using namespace torusflow;
using namespace torusflow::cli;

namespace {

struct Common {
    std::string config_file;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("config", c.config_file, "INI scenario file (optional)");
    sub->allow_extras();
    sub->footer("Any key can be overridden with --section.key=value or TORUSFLOW_<SECTION>_<KEY>.");
}

Config load(const Common& c, CLI::App* sub) {
    Config cfg = Config::defaults();
    if (!c.config_file.empty()) cfg.merge_file(c.config_file);
    cfg.merge_env();
    const auto rest = cfg.merge_flags(sub->remaining());
    if (!rest.empty()) throw ConfigError("unrecognized argument " + rest.front());
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mullins-Sekerka and surface diffusion flows of periodic interfaces"};
    app.require_subcommand(1);
    Common common;
    auto* simulate = app.add_subcommand("simulate", "run the flow and fit the decay of the dissipation");
    auto* stability = app.add_subcommand("stability", "criticality, second-variation spectrum, k(gamma) sweep");
    auto* verify = app.add_subcommand("verify", "check the energy identities");
    auto* sweep = app.add_subcommand("sweep", "simulate over the values of one key");
    for (auto* s : {simulate, stability, verify, sweep}) add_common(s, common);

    PlotRequest plot_req;
    bool linear = false;
    auto* plot = app.add_subcommand("plot", "SVG plots of traces or snapshots");
    plot->add_option("--trace", plot_req.traces, "trace CSV (repeat to overlay)");
    plot->add_option("--snapshot", plot_req.snapshots, "snapshot file (repeat to overlay)");
    plot->add_option("--column", plot_req.column, "trace column")->capture_default_str();
    plot->add_flag("--linear", linear, "linear y axis");
    plot->add_option("-o,--output", plot_req.output, "output SVG")->required();

    auto* defaults = app.add_subcommand("defaults", "print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (defaults->parsed()) {
            std::cout << Config::defaults_ini();
            return kSuccess;
        }
        if (plot->parsed()) {
            plot_req.log_y = !linear;
            return cmd_plot(plot_req, std::cerr);
        }
        if (simulate->parsed()) return cmd_simulate(load(common, simulate), std::cerr);
        if (stability->parsed()) return cmd_stability(load(common, stability), std::cerr);
        if (verify->parsed()) return cmd_verify(load(common, verify), std::cerr);
        if (sweep->parsed()) return cmd_sweep(load(common, sweep), std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kStopped;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
