#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "cli/svg.hpp"
#include "torusflow/diagnostics.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/shapes.hpp"
#include "torusflow/variation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace torusflow::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string reason_name(StopReason r) { return r == StopReason::none ? "completed" : to_string(r); }

fs::path prepare_dir(const Config& c) {
    const fs::path dir = output_dir(c);
    fs::create_directories(dir);
    write_text(dir / "config.ini", c.canonical());
    return dir;
}

std::string fmt_gamma(double g) {
    std::ostringstream os;
    os << g;
    return os.str();
}

// Exponential fit of the dissipation over the tail window. A column that is identically zero
// (a stationary run) has rate 0 by convention.
std::optional<ExponentialFit> fit_tail(const EnergyTrace& trace, double from) {
    if (trace.records.size() < 2) return std::nullopt;
    const double t1 = trace.records.back().t, t0 = from * t1;
    std::vector<double> t, v;
    bool all_zero = true;
    for (const auto& r : trace.records) {
        if (r.t < t0) continue;
        if (r.dissipation != 0.0) all_zero = false;
        if (r.dissipation > 0.0) {
            t.push_back(r.t);
            v.push_back(r.dissipation);
        }
    }
    if (all_zero) return ExponentialFit{0.0, 1.0, t0, t1};
    if (t.size() < 2 || t.front() == t.back()) return std::nullopt;
    return fit_exponential(t, v);
}

json fit_json(const std::optional<ExponentialFit>& f) {
    if (!f) return nullptr;
    return json{{"c0", f->c0}, {"r2", f->r2}, {"t_begin", f->t_begin}, {"t_end", f->t_end}};
}

void plot_trace(const fs::path& path, const EnergyTrace& trace, const std::string& hash) {
    Series s{"dissipation", {}, {}};
    for (const auto& r : trace.records) {
        s.x.push_back(r.t);
        s.y.push_back(r.dissipation);
    }
    PlotOptions opt{"dissipation", "t", "log10 D", true, hash};
    try {
        write_text(path, line_plot({s}, opt));
    } catch (const ConfigError&) {
        // identically zero dissipation has no log plot
    }
}

}  // namespace

std::string output_dir(const Config& config) { return (fs::path(config.get("output.dir")) / config.hash()).string(); }

int cmd_simulate(const Config& config, std::ostream& log) {
    const Scenario sc = build_scenario(config);
    const fs::path dir = prepare_dir(config);
    const std::string hash = config.hash();
    const auto initial = FlowState::make(sc.initial, sc.kind, sc.gamma);
    write_snapshot(sc.initial, (dir / "initial.snap").string());

    RunSinks sinks;
    sinks.snapshot_every = std::size_t(config.integer("output.snapshot_every"));
    sinks.on_snapshot = [&](const FlowState& s, std::size_t step) {
        write_snapshot(s.curve, (dir / ("step_" + std::to_string(step) + ".snap")).string());
    };
    sinks.on_failure = [&](const FlowState& s) { write_snapshot(s.curve, (dir / "failure.snap").string()); };

    log << "simulate " << to_string(sc.kind) << " gamma=" << sc.gamma << " t_end=" << sc.t_end << " -> " << dir.string()
        << "\n";
    auto res = run(initial, sc.monitor, sc.t_end, sc.params, sinks);
    res.trace.fitted = fit_tail(res.trace, config.number("output.fit_from"));
    res.trace.write_csv((dir / "trace.csv").string());
    write_snapshot(res.final_state.curve, (dir / "final.snap").string());

    const auto& first = res.trace.records.front();
    const auto& last = res.trace.records.back();
    json j;
    j["config_hash"] = hash;
    j["command"] = "simulate";
    j["flow_kind"] = to_string(sc.kind);
    j["scheme"] = to_string(sc.params.scheme);
    j["gamma"] = sc.gamma;
    j["steps"] = res.steps;
    j["final_time"] = last.t;
    j["stop_reason"] = reason_name(res.reason);
    j["message"] = res.message;
    j["J_initial"] = first.J;
    j["J_final"] = last.J;
    j["relative_area_drift"] = std::abs(last.area - first.area) / std::abs(first.area);
    j["fit"] = fit_json(res.trace.fitted);
    if (sc.reference) {
        json psi;
        try {
            const auto h = height_function(res.final_state.curve, *sc.reference);
            const double s = sc.kind == FlowKind::ms ? 2.5 : 3.0;
            psi["sobolev_order"] = s;
            psi["sobolev_norm2"] = discrete_sobolev_norm(h, *sc.reference, s);
            psi["c1"] = c1_distance(res.final_state.curve, *sc.reference).spectral;
        } catch (const GraphError& e) {
            psi["error"] = e.what();
        }
        j["psi_final"] = psi;
        const auto a = asymmetry_distance(res.final_state.curve, *sc.reference, std::size_t(config.integer("grid.n")));
        j["asymmetry"] = json{{"D", a.D}, {"sym_diff_area", a.sym_diff_area}};
    }
    json events = json::array();
    for (const auto& r : res.trace.records)
        if (!r.event.empty()) events.push_back(json{{"t", r.t}, {"event", r.event}});
    j["events"] = events;
    write_text(dir / "summary.json", j.dump(2) + "\n");

    if (config.boolean("output.plots")) {
        plot_trace(dir / "dissipation.svg", res.trace, hash);
        write_text(dir / "curves.svg", curve_plot({sc.initial, res.final_state.curve}, {"initial", "final"},
                                                  PlotOptions{"interface", "", "", false, hash}));
    }
    log << "stop: " << reason_name(res.reason) << " after " << res.steps << " steps at t=" << last.t << "\n";
    const bool stopped = res.reason != StopReason::none && res.reason != StopReason::max_steps;
    return stopped ? kStopped : kSuccess;
}

int cmd_stability(const Config& config, std::ostream& log) {
    const Scenario sc = build_scenario(config);
    const fs::path dir = prepare_dir(config);
    const std::string hash = config.hash();
    const auto n_modes = std::size_t(config.integer("stability.n_modes"));
    json j;
    j["config_hash"] = hash;
    j["command"] = "stability";
    json reports = json::array();
    for (double g : config.numbers("stability.gammas")) {
        const auto crit = criticality_residual(sc.initial, g);
        const auto m = assemble_second_variation(sc.initial, g, n_modes);
        const auto rep = spectrum(m, sc.initial, config.number("stability.rel_tol"));
        json r = json::parse(rep.json());
        r["criticality_linf"] = crit.linf;
        r["lambda"] = crit.lambda;
        const std::string name = "stability_gamma_" + fmt_gamma(g);
        write_text(dir / (name + ".json"), r.dump(2) + "\n");
        if (config.boolean("output.plots")) {
            std::vector<double> ev(rep.eigenvalues.data(), rep.eigenvalues.data() + rep.eigenvalues.size());
            write_text(dir / (name + ".svg"),
                       stem_plot(ev, PlotOptions{"spectrum, gamma = " + fmt_gamma(g), "index", "eigenvalue", false, hash}));
        }
        for (const auto& w : rep.warnings) log << "warning (gamma " << g << "): " << w << "\n";
        log << "gamma " << g << ": " << (rep.classification_withheld ? "withheld" : to_string(rep.classification))
            << ", gap " << rep.gap_on_T_perp << "\n";
        reports.push_back(json{{"gamma", g},
                               {"classification", rep.classification_withheld ? "withheld" : to_string(rep.classification)},
                               {"gap_on_T_perp", rep.gap_on_T_perp},
                               {"criticality_linf", crit.linf},
                               {"file", name + ".json"}});
    }
    j["reports"] = reports;

    const int kmax = int(config.integer("stability.threshold_k_max"));
    if (kmax > 0) {
        std::ostringstream csv;
        csv << "gamma,k_min,k,gap,classification,criticality_linf\n";
        json table = json::array();
        for (double g : config.numbers("stability.gammas")) {
            const auto t = lamella_threshold(g, kmax, config.number("stability.threshold_h"),
                                             std::size_t(config.integer("stability.threshold_markers")));
            for (const auto& row : t.rows)
                csv << g << ',' << (t.k ? std::to_string(*t.k) : "") << ',' << row.k << ',' << row.gap << ','
                    << to_string(row.classification) << ',' << row.criticality_linf << '\n';
            table.push_back(json{{"gamma", g}, {"k", t.k ? json(*t.k) : json(nullptr)}});
            log << "k(" << g << ") = " << (t.k ? std::to_string(*t.k) : "none up to " + std::to_string(kmax)) << "\n";
        }
        write_text(dir / "threshold.csv", csv.str());
        j["threshold"] = table;
    }
    write_text(dir / "summary.json", j.dump(2) + "\n");
    return kSuccess;
}

int cmd_verify(const Config& config, std::ostream& log) {
    const Scenario sc = build_scenario(config);
    const fs::path dir = prepare_dir(config);
    const std::string hash = config.hash();
    json j;
    j["config_hash"] = hash;
    j["command"] = "verify";

    auto params = sc.params;
    params.max_steps = std::size_t(config.integer("verify.steps"));
    auto res = run(FlowState::make(sc.initial, sc.kind, sc.gamma), {}, std::numeric_limits<double>::infinity(), params);
    auto first = verify_first_identity(res.trace, true);
    res.trace.write_csv((dir / "verify_trace.csv").string());
    write_text(dir / "first_identity.json", first.json() + "\n");
    j["first_identity"] = json{{"median_relative_residual", first.median}, {"max_relative_residual", first.max},
                               {"steps", res.steps}, {"stop_reason", reason_name(res.reason)}};
    log << "first identity: median " << first.median << ", max " << first.max << "\n";

    const double dt = config.number("verify.dt");
    const double ms_gamma = sc.kind == FlowKind::ms ? sc.gamma : 0.0;
    const auto ms = verify_second_identity_ms(sc.initial, ms_gamma, dt);
    const auto sd = verify_second_identity_sd(sc.initial, dt);
    write_text(dir / "identity_ms.json", ms.json() + "\n");
    write_text(dir / "identity_sd.json", sd.json() + "\n");
    j["second_identity_ms"] = json{{"relative_residual", ms.relative_residual}, {"gamma", ms_gamma}};
    j["second_identity_sd"] = json{{"relative_residual", sd.relative_residual}};
    log << "second identity MS: " << ms.relative_residual << ", SD: " << sd.relative_residual << "\n";

    // matrix representation against direct evaluation on seeded random combinations of the basis
    const auto m = assemble_second_variation(sc.initial, ms_gamma, std::size_t(config.integer("stability.n_modes")));
    const Eigen::MatrixXd full = m.full();
    std::mt19937_64 rng(std::uint64_t(config.integer("output.seed")));
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (long trial = 0; trial < config.integer("verify.trials"); ++trial) {
        Eigen::VectorXd c(full.rows());
        for (long i = 0; i < c.size(); ++i) c[i] = nd(rng);
        const Eigen::VectorXd phi = m.values * c;
        const auto q = second_variation_form(sc.initial, ms_gamma,
                                             CurveSamples(std::vector<double>(phi.data(), phi.data() + phi.size())));
        const double a = c.dot(full * c), b = q.total();
        worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
    }
    j["quadratic_form_consistency"] = worst;
    j["criticality_linf"] = ms.criticality_linf;
    write_text(dir / "summary.json", j.dump(2) + "\n");
    return kSuccess;
}

int cmd_sweep(const Config& config, std::ostream& log) {
    config.validate();
    const std::string param = config.get("sweep.param");
    const auto values = config.numbers("sweep.values");
    if (values.empty()) throw ConfigError("sweep.values is empty");
    std::vector<Config> jobs;
    for (double v : values) {
        Config c = config;
        std::ostringstream os;
        os << std::setprecision(17) << v;
        c.set(param, os.str());
        c.set("sweep.values", "");
        c.validate();
        jobs.push_back(std::move(c));
    }
    std::vector<int> codes(jobs.size(), kInternal);
    std::vector<std::string> logs(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            std::ostringstream os;
            try {
                codes[i] = cmd_simulate(jobs[i], os);
            } catch (const ConfigError& e) {
                os << "error: " << e.what() << "\n";
                codes[i] = kUsage;
            } catch (const Error& e) {
                os << "error: " << e.what() << "\n";
                codes[i] = kStopped;
            } catch (const std::exception& e) {
                os << "internal error: " << e.what() << "\n";
                codes[i] = kInternal;
            }
            logs[i] = os.str();
        }
    };
    const auto n_threads = std::min<std::size_t>(std::size_t(config.integer("sweep.jobs")), jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    json j;
    j["config_hash"] = config.hash();
    j["command"] = "sweep";
    j["param"] = param;
    json runs = json::array();
    int code = kSuccess;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        log << logs[i];
        runs.push_back(json{{"value", values[i]}, {"config_hash", jobs[i].hash()}, {"exit_code", codes[i]}});
        code = std::max(code, codes[i]);
    }
    j["runs"] = runs;
    fs::create_directories(config.get("output.dir"));
    write_text(fs::path(config.get("output.dir")) / ("sweep_" + config.hash() + ".json"), j.dump(2) + "\n");
    return code;
}

int cmd_plot(const PlotRequest& request, std::ostream& log) {
    if (request.output.empty()) throw ConfigError("plot: an output path is required");
    if (request.traces.empty() == request.snapshots.empty())
        throw ConfigError("plot: give either traces or snapshots");
    // the hash covers the inputs, so identical inputs give identical files
    std::string inputs = request.column + (request.log_y ? "|log" : "|lin");
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string svg;
    char hash[17];
    if (!request.traces.empty()) {
        std::vector<Series> series;
        for (const auto& path : request.traces) {
            inputs += slurp(path);
            const auto tr = EnergyTrace::read_csv(path);
            if (tr.records.empty()) throw ConfigError("plot: trace " + path + " is empty");
            Series s{fs::path(path).parent_path().filename().string() + "/" + fs::path(path).filename().string(), {}, {}};
            for (const auto& r : tr.records) {
                s.x.push_back(r.t);
                if (request.column == "J") s.y.push_back(r.J);
                else if (request.column == "dissipation") s.y.push_back(r.dissipation);
                else if (request.column == "area") s.y.push_back(r.area);
                else if (request.column == "perimeter") s.y.push_back(r.perimeter);
                else if (request.column == "psi_c1") s.y.push_back(r.psi_c1);
                else throw ConfigError("plot: unknown column " + request.column);
            }
            series.push_back(std::move(s));
        }
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(inputs)));
        svg = line_plot(series, PlotOptions{request.column, "t", request.log_y ? "log10 " + request.column : request.column,
                                            request.log_y, hash});
    } else {
        std::vector<PeriodicCurve> curves;
        std::vector<std::string> names;
        for (const auto& path : request.snapshots) {
            inputs += slurp(path);
            curves.push_back(read_snapshot(path));
            names.push_back(fs::path(path).filename().string());
        }
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(inputs)));
        svg = curve_plot(curves, names, PlotOptions{"interface", "", "", false, hash});
    }
    write_text(request.output, svg);
    log << "wrote " << request.output << "\n";
    return kSuccess;
}

}  // namespace torusflow::cli
