// Acceptance checks. `acceptance N...` runs the listed criteria (all when none are given)
// and prints one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "torusflow/diagnostics.hpp"
#include "torusflow/energy.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/shapes.hpp"
#include "torusflow/variation.hpp"

using namespace torusflow;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double max_abs(const CurveSamples& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

// least-squares slope of log|y| against log x
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PeriodicCurve wavy_top(double eps, int k, std::size_t n) {
    return shapes::graph_strip(0.25, 0.75, [](double) { return 0.0; },
                               [=](double x) { return eps * std::cos(2 * pi * k * x); }, n);
}

// both interfaces, two modes and phases, so the area is not conserved by symmetry alone
PeriodicCurve rough_lamella(std::size_t n) {
    return shapes::graph_strip(0.25, 0.75, [](double x) { return 4e-3 * std::sin(2 * pi * x + 1.0); },
                               [](double x) { return 1e-2 * std::cos(2 * pi * x) + 5e-3 * std::sin(4 * pi * x + 0.3); },
                               n);
}

FlowParams ssd_params() {
    FlowParams p;
    p.scheme = Scheme::ssd;
    return p;
}

Vec2 centroid(const PeriodicCurve& c) {
    // polygon moments of the lifted loops; only valid for a single contractible loop
    const auto& pts = c.loop(0).lifted();
    double a = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 p = pts[i], q = pts[(i + 1) % pts.size()];
        const double w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (3 * a), cy / (3 * a)};
}

// ---------------------------------------------------------------------------------------------

void stationary(Outcome& o) {
    const std::size_t n = 256;
    double worst = 0.0;
    auto check = [&](const PeriodicCurve& c, FlowKind kind, double gamma, const char* name) {
        const double v = max_abs(evaluate_velocity(c, kind, gamma).velocity);
        o.detail << " " << name << "=" << v;
        worst = std::max(worst, v);
    };
    const auto circ = shapes::circle({0.5, 0.5}, 0.2, n);
    check(circ, FlowKind::ms, 0.0, "circle_ms");
    check(circ, FlowKind::sd, 0.0, "circle_sd");
    const auto lam = shapes::strip(0.25, 0.5, n);
    check(lam, FlowKind::sd, 0.0, "lamella_sd");
    for (double g : {0.0, 1.0, 10.0}) {
        const std::string name = "lamella_ms_g" + std::to_string(int(g));
        check(lam, FlowKind::ms, g, name.c_str());
    }
    o.require(worst <= 1e-6, "max|V| <= 1e-6");
}

void conservation(Outcome& o) {
    auto p = ssd_params();
    p.max_steps = 2000;
    struct Case {
        const char* name;
        FlowKind kind;
        double gamma;
    };
    for (const Case& c : {Case{"sd", FlowKind::sd, 0.0}, Case{"ms_g1", FlowKind::ms, 1.0}}) {
        const auto res = run(FlowState::make(rough_lamella(32), c.kind, c.gamma), {},
                             std::numeric_limits<double>::infinity(), p);
        const auto& r = res.trace.records;
        const double a0 = r.front().area;
        double drift = 0.0, rise = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.size(); ++i) {
            drift = std::max(drift, std::abs(r[i].area - a0) / a0);
            if (i > 0) rise = std::max(rise, (r[i].J - r[i - 1].J) / std::abs(r[i - 1].J));
        }
        o.detail << " " << c.name << ": steps=" << res.steps << " area_drift=" << drift << " max_rel_rise=" << rise;
        o.require(res.steps == 2000, std::string(c.name) + " completed 2000 steps");
        o.require(drift <= 1e-6, std::string(c.name) + " area drift <= 1e-6");
        o.require(rise <= 1e-9, std::string(c.name) + " J non-increasing");
    }
}

void first_identity(Outcome& o) {
    // default resolution (128 markers per interface) and default SSD stiffness, then dt halved.
    // Mode 8 decays fast enough per step that the O(dt^2) error sits well above the round-off
    // in centered differences of J; a mode-1 perturbation would only show that floor.
    auto p = ssd_params();
    const auto init = FlowState::make(wavy_top(5e-3, 8, 128), FlowKind::sd, 0.0);
    auto probe = init;
    const double dt = adaptive_dt(probe, p);
    const double t_end = 100 * dt;
    std::vector<double> med;
    for (double c : {default_c_cfl(Scheme::ssd, FlowKind::sd), 0.5 * default_c_cfl(Scheme::ssd, FlowKind::sd)}) {
        p.c_cfl = c;
        const auto res = run(init, {}, t_end, p);
        med.push_back(verify_first_identity(res.trace).median);
        o.detail << " c_cfl=" << c << " steps=" << res.steps << " median=" << med.back();
    }
    o.detail << " improvement=" << med[0] / med[1];
    o.require(med[0] <= 0.02, "median <= 2%");
    o.require(med[0] / med[1] >= 3.0, "improvement >= 3x");
}

void second_identities(Outcome& o) {
    const auto ms_circ = verify_second_identity_ms(shapes::perturbed_circle({0.5, 0.5}, 0.2, 2, 1e-3, 512), 0.0);
    const auto ms_lam = verify_second_identity_ms(wavy_top(1e-3, 1, 256), 2.0);
    const auto sd_circ = verify_second_identity_sd(shapes::perturbed_circle({0.5, 0.5}, 0.2, 2, 1e-3, 512));
    const auto sd_lam = verify_second_identity_sd(wavy_top(1e-3, 1, 512));
    o.detail << " ms_circle=" << ms_circ.relative_residual << " ms_lamella_g2=" << ms_lam.relative_residual
             << " sd_circle=" << sd_circ.relative_residual << " sd_lamella=" << sd_lam.relative_residual;
    for (const auto* r : {&ms_circ, &ms_lam, &sd_circ, &sd_lam}) o.require(r->relative_residual <= 0.05, "residual <= 5%");

    // epsilon sweep with two modes, so the cubic terms do not vanish by symmetry
    const std::vector<double> eps{1e-4, 5e-5, 2.5e-5};
    std::vector<double> ms_quad, ms_cubic, sd_quad, sd_cubic;
    for (double e : eps) {
        const auto c = shapes::polar({0.5, 0.5}, [=](double t) { return 0.2 + e * (std::cos(2 * t) + std::cos(4 * t)); }, 512);
        const auto m = verify_second_identity_ms(c, 0.0);
        ms_quad.push_back(m.term("d2J_total"));
        ms_cubic.push_back(m.term("one_sided_cubic"));
        const auto s = verify_second_identity_sd(c);
        sd_quad.push_back(s.term("d2J_total"));
        sd_cubic.push_back(s.term("second_fundamental_form_cubic") + s.term("mean_curvature_cubic"));
    }
    const double ms_gap = log_slope(eps, ms_cubic) - log_slope(eps, ms_quad);
    const double sd_gap = log_slope(eps, sd_cubic) - log_slope(eps, sd_quad);
    o.detail << " ms_slope_gap=" << ms_gap << " sd_slope_gap=" << sd_gap;
    o.require(std::abs(ms_gap - 1.0) <= 0.2, "MS slope gap 1.0 +- 0.2");
    o.require(std::abs(sd_gap - 1.0) <= 0.2, "SD slope gap 1.0 +- 0.2");
}

void spectral(Outcome& o) {
    const auto circ = shapes::circle({0.5, 0.5}, 0.2, 128);
    const auto rc = spectrum(assemble_second_variation(circ, 0.0), circ);
    const auto lam = shapes::strip(0.25, 0.5, 128);
    const auto rl = spectrum(assemble_second_variation(lam, 0.0), lam);
    o.detail << " circle_gap=" << rc.gap_on_T_perp << " lamella_gap=" << rl.gap_on_T_perp;
    o.require(std::abs(rc.gap_on_T_perp / 75.0 - 1.0) <= 0.01, "circle gap 75 within 1%");
    o.require(std::abs(rl.gap_on_T_perp / (4 * pi * pi) - 1.0) <= 0.01, "lamella gap (2 pi)^2 within 1%");
    for (const auto* r : {&rc, &rl}) {
        o.require(!r->translation_modes.empty(), "translation modes found");
        for (std::size_t i = 0; i < r->translation_modes.size(); ++i) {
            const double lam_i = r->eigenvalues[r->translation_modes[i]];
            o.detail << " |lambda_T|=" << std::abs(lam_i) << " overlap=" << r->translation_overlap[i];
            o.require(std::abs(lam_i) <= 1e-6, "translation |lambda| <= 1e-6");
            o.require(r->translation_overlap[i] > 0.99, "translation overlap > 0.99");
        }
    }
    o.require(rc.translation_modes.size() == 2, "circle has two translation modes");
}

void hessian(Outcome& o) {
    struct Case {
        const char* name;
        PeriodicCurve curve;
        double gamma;
        std::function<double(Vec2)> phi;
    };
    const std::vector<Case> cases{
        {"circle", shapes::circle({0.5, 0.5}, 0.2, 256), 0.0,
         [](Vec2 p) { return std::cos(2 * std::atan2(p.y - 0.5, p.x - 0.5)); }},
        {"lamella_g1", shapes::strip(0.25, 0.5, 128), 1.0,
         [](Vec2 p) { return p.y > 0.5 ? std::cos(2 * pi * p.x) : 0.0; }},
    };
    for (const auto& c : cases) {
        std::vector<double> phi(c.curve.total_markers());
        for (std::size_t j = 0; j < phi.size(); ++j) {
            const auto [l, i] = c.curve.locate(j);
            phi[j] = c.phi(c.curve.loop(l).torus_point(i));
        }
        const double q = second_variation_form(c.curve, c.gamma, CurveSamples(phi)).total();
        const auto base = FlowState::make(c.curve, FlowKind::ms, c.gamma);
        auto path = [&](double e) {
            std::vector<double> d(phi.size());
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = e * phi[j];
            auto s = base;
            s.curve = displace_normal(c.curve, d);
            s.cached.reset();
            return energy(enforce_volume(s, 1e-14).state.curve, c.gamma).J;
        };
        const double j0 = energy(c.curve, c.gamma).J;
        std::vector<double> eps{4e-3, 2e-3, 1e-3}, err;
        for (double e : eps) err.push_back(std::abs((path(e) - 2 * j0 + path(-e)) / (e * e) - q));
        const double order = log_slope(eps, err);
        o.detail << " " << c.name << ": Q=" << q << " err=" << err[0] << "," << err[1] << "," << err[2]
                 << " order=" << order;
        o.require(order >= 1.0, std::string(c.name) + " order >= 1");
        o.require(err.back() <= 1e-2 * std::abs(q), std::string(c.name) + " matches d2J");
    }
}

struct DecayFit {
    double psi_rate = 0.0;
    double c0 = 0.0;
};

DecayFit fit_decay(const PeriodicCurve& init, const PeriodicCurve& reference, FlowKind kind, double rate_guess) {
    StoppingMonitor mon;
    mon.reference = reference;
    const double t_end = 3.0 / rate_guess;
    const auto res = run(FlowState::make(init, kind, 0.0), mon, t_end, ssd_params());
    return {fit_exponential(res.trace, "psi_c1", 0.2 * t_end, t_end).c0,
            fit_exponential(res.trace, "dissipation", 0.2 * t_end, t_end).c0};
}

void decay_rates(Outcome& o) {
    const auto flat = shapes::strip(0.25, 0.5, 32);
    for (int k : {1, 2}) {
        const double q = 2 * pi * k;
        const double sd_oracle = std::pow(q, 4);
        const auto sd = fit_decay(wavy_top(1e-3, k, 32), flat, FlowKind::sd, sd_oracle);

        // both interfaces shifted alike: an eigenmode of the two-interface strip problem
        const double h = 0.5;
        const double ms_oracle = q * q * q *
                                 (1 / std::tanh(q * h) + 1 / std::tanh(q * (1 - h)) + 1 / std::sinh(q * h) +
                                  1 / std::sinh(q * (1 - h)));
        const auto zig = shapes::graph_strip(0.25, 0.75, [=](double x) { return 1e-3 * std::cos(q * x); },
                                             [=](double x) { return 1e-3 * std::cos(q * x); }, 32);
        const auto ms = fit_decay(zig, flat, FlowKind::ms, ms_oracle);

        o.detail << " k=" << k << ": sd_rate=" << sd.psi_rate << "/" << sd_oracle << " sd_c0=" << sd.c0
                 << " ms_rate=" << ms.psi_rate << "/" << ms_oracle << " ms_c0=" << ms.c0;
        o.require(std::abs(sd.psi_rate / sd_oracle - 1) <= 0.05, "SD rate within 5%");
        o.require(std::abs(ms.psi_rate / ms_oracle - 1) <= 0.05, "MS rate within 5%");
        o.require(std::abs(sd.c0 / (2 * sd.psi_rate) - 1) <= 0.05, "SD c0 = 2 rate within 5%");
        o.require(std::abs(ms.c0 / (2 * ms.psi_rate) - 1) <= 0.05, "MS c0 = 2 rate within 5%");
    }
}

void asymptotic_stability(Outcome& o) {
    const double r = 0.2;
    const int k = 2;
    const auto init = shapes::perturbed_circle({0.5, 0.5}, r, k, 5e-3, 64);
    struct Case {
        const char* name;
        FlowKind kind;
        double psi_rate, s, t_end;
    };
    const std::vector<Case> cases{
        {"sd", FlowKind::sd, k * k * (k * k - 1) / std::pow(r, 4), 3.0, 1.2e-3},
        {"ms", FlowKind::ms, 2 * k * (k * k - 1) / std::pow(r, 3), 2.5, 6e-3},
    };
    for (const auto& c : cases) {
        StoppingMonitor mon;
        mon.eps0 = 0.1;
        mon.reference = shapes::circle({0.5, 0.5}, r, 64);
        const auto res = run(FlowState::make(init, c.kind, 0.0), mon, c.t_end, ssd_params());
        const auto& fin = res.final_state.curve;
        const double radius = std::sqrt(enclosed_area(fin) / pi);
        const auto ref = shapes::circle(centroid(fin), radius, fin.total_markers());
        const double norm2 = discrete_sobolev_norm(height_function(fin, ref), ref, c.s);
        const double c0 = fit_exponential(res.trace, "dissipation", 0.1 * c.t_end, 0.6 * c.t_end).c0;
        const double oracle = 2 * c.psi_rate;
        o.detail << " " << c.name << ": reason=" << to_string(res.reason) << " steps=" << res.steps
                 << " sobolev2=" << norm2 << " c0=" << c0 << "/" << oracle;
        o.require(res.reason == StopReason::none, std::string(c.name) + " no stopping event");
        o.require(norm2 < 1e-5, std::string(c.name) + " Sobolev norm < 1e-5");
        o.require(std::abs(c0 / oracle - 1) <= 0.1, std::string(c.name) + " c0 within 10%");
    }
}

void threshold(Outcome& o) {
    std::vector<int> ks;
    for (double g : {0.0, 1.0, 5.0, 10.0, 25.0, 50.0}) {
        const auto t = lamella_threshold(g);
        ks.push_back(t.k.value_or(0));
        o.detail << " k(" << g << ")=" << (t.k ? std::to_string(*t.k) : "none");
    }
    bool nondecreasing = true, some_two = false;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] == 0 || (i > 0 && ks[i] < ks[i - 1])) nondecreasing = false;
        if (ks[i] >= 2) some_two = true;
    }
    // informational only: where the first multi-strip state shows up
    const auto beyond = lamella_threshold(100.0);
    o.detail << " (outside the list: k(100)=" << (beyond.k ? std::to_string(*beyond.k) : "none") << ")";
    o.require(nondecreasing, "k nondecreasing");
    o.require(ks[0] == 1, "k(0) = 1");
    o.require(some_two, "some k >= 2");
}

void poincare(Outcome& o) {
    const double target = 1 / (4 * pi * pi);
    std::vector<double> err;
    for (double e : {1e-2, 1e-3, 1e-4}) {
        const auto c = shapes::graph_strip(0.25, 0.75, [](double) { return 0.0; },
                                           [=](double x) { return e * std::sin(2 * pi * x); }, 64);
        const auto pr = geometric_poincare_ratio(c);
        err.push_back(std::abs(pr.ratio / target - 1));
        o.detail << " eps=" << e << " rel_err=" << err.back();
        o.require(!pr.infinite, "graph ratio finite");
    }
    o.require(err[2] <= err[1] && err[1] <= err[0], "converges as eps -> 0");
    o.require(err.back() <= 0.02, "within 2%");

    std::vector<MarkerLoop> loops{shapes::circle({0.5, 0.5}, 0.3, 64).loop(0),
                                  shapes::circle({0.5, 0.5}, 0.15, 64, -1).loop(0)};
    const auto ann = geometric_poincare_ratio(PeriodicCurve(loops));
    o.detail << " annulus_infinite=" << (ann.infinite ? "true" : "false");
    o.require(ann.infinite, "piecewise-constant H flagged infinite");
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    void (*fn)(Outcome&);
};

const Criterion kCriteria[] = {
    {1, "stationary equilibria", 10, stationary},
    {2, "conservation and monotonicity", 120, conservation},
    {3, "first energy identity", 120, first_identity},
    {4, "second energy identities", 180, second_identities},
    {5, "spectral oracles", 30, spectral},
    {6, "finite-difference Hessian", 60, hessian},
    {7, "linearized decay rates", 300, decay_rates},
    {8, "asymptotic stability", 600, asymptotic_stability},
    {9, "k(gamma) threshold sweep", 600, threshold},
    {10, "geometric Poincare ratio", 60, poincare},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        Outcome o;
        o.detail.precision(4);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.budget_s, "runtime budget");
        std::printf("criterion %2d %s: %s (%.1f s)%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures;
}
