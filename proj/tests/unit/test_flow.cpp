#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "torusflow/errors.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/shapes.hpp"

using namespace torusflow;
using std::numbers::pi;

namespace {

PeriodicCurve wavy_lamella(double eps, std::size_t n, int k = 1) {
    return shapes::graph_strip(0.25, 0.75, [](double) { return 0.0; },
                               [=](double x) { return eps * std::cos(2 * pi * k * x); }, n);
}

PeriodicCurve flat_lamella(std::size_t n) { return wavy_lamella(0.0, n); }

double max_height_gap(const PeriodicCurve& a, const PeriodicCurve& b, const PeriodicCurve& ref) {
    auto x = height_function(a, ref), y = height_function(b, ref);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

double max_marker_gap(const PeriodicCurve& a, const PeriodicCurve& b) {
    double m = 0.0;
    for (std::size_t l = 0; l < a.num_loops(); ++l)
        for (std::size_t j = 0; j < a.loop(l).size(); ++j) m = std::max(m, norm(a.loop(l).point(j) - b.loop(l).point(j)));
    return m;
}

PeriodicCurve advance(const PeriodicCurve& c, double total, int steps, const FlowParams& p = {}) {
    auto s = FlowState::make(c, FlowKind::sd, 0.0);
    for (int i = 0; i < steps; ++i) s = step(s, total / steps, p).state;
    return s.curve;
}

}  // namespace

TEST_CASE("sd velocity: equilibria and the flat-interface linearization") {
    for (auto c : {shapes::circle({0.4, 0.6}, 0.2, 64), flat_lamella(64)}) {
        auto v = sd_normal_velocity(c);
        for (double x : v.values) CHECK(std::abs(x) < 1e-8);
    }
    const double eps = 1e-4;
    for (int k : {1, 2}) {
        auto c = shapes::graph_strip(0.25, 0.75, [](double) { return 0.0; },
                                     [=](double x) { return eps * std::sin(2 * pi * k * x); }, 64);
        auto v = sd_normal_velocity(c);
        CHECK(std::abs(integrate(c, v)) < 1e-8);
        const double q4 = std::pow(2 * pi * k, 4);
        // top loop: normal points up, markers at x_j = j/64
        for (std::size_t j = 0; j < 64; ++j) {
            const double psi = eps * std::sin(2 * pi * k * c.loop(0).point(j).x);
            CHECK(std::abs(v[j] + q4 * psi) < 2e-3 * q4 * eps);
        }
        for (std::size_t j = 64; j < 128; ++j) CHECK(std::abs(v[j]) < 1e-8);
    }
    auto s = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 32), FlowKind::sd, 3.0);
    CHECK(s.gamma == 0.0);
    auto ms = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 32), FlowKind::ms, 0.0);
    CHECK_THROWS_AS(sd_normal_velocity(ms), ConfigError);
    CHECK_THROWS_AS(FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 32), FlowKind::ms, -1.0), ConfigError);
}

TEST_CASE("adaptive dt follows the stiffness scaling") {
    for (auto kind : {FlowKind::sd, FlowKind::ms}) {
        auto a = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 64), kind, 0.0);
        auto b = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 128), kind, 0.0);
        const double ha = min_marker_spacing(a.curve), hb = min_marker_spacing(b.curve);
        const double p = kind == FlowKind::sd ? 4.0 : 3.0;
        FlowParams params;
        params.scheme = Scheme::ssd;
        // max|V| is round-off on a circle, so only the stiffness cap is active
        CHECK(adaptive_dt(a, params) == doctest::Approx(default_c_cfl(Scheme::ssd, kind) * std::pow(ha, p)).epsilon(1e-14));
        CHECK(adaptive_dt(a, params) / adaptive_dt(b, params) == doctest::Approx(std::pow(ha / hb, p)).epsilon(1e-12));
        CHECK(std::pow(ha / hb, p) == doctest::Approx(kind == FlowKind::sd ? 16.0 : 8.0).epsilon(0.01));
    }
    CHECK(default_c_cfl(Scheme::ssd, FlowKind::sd) == 0.2);
    CHECK(default_c_cfl(Scheme::ssd, FlowKind::ms) == 0.5);
    // velocity cap: max|V| dt <= h/4
    auto s = FlowState::make(wavy_lamella(0.05, 32, 3), FlowKind::sd, 0.0);
    FlowParams big;
    big.c_cfl = 1e6;
    const double dt = adaptive_dt(s, big);
    double vmax = 0.0;
    for (double v : s.velocity().velocity.values) vmax = std::max(vmax, std::abs(v));
    CHECK(vmax * dt == doctest::Approx(min_marker_spacing(s.curve) / 4).epsilon(1e-12));
}

TEST_CASE("enforce_volume: exact, first order and idempotent") {
    auto s = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 64), FlowKind::sd, 0.0);
    CHECK(enforce_volume(s).delta == 0.0);
    const double dA = 1e-4;
    s.target_area += dA;
    auto v = enforce_volume(s);
    CHECK(v.delta == doctest::Approx(dA / perimeter(s.curve)).epsilon(1e-3));
    CHECK(std::abs(enclosed_area(v.state.curve) - s.target_area) < 1e-13);
    auto again = enforce_volume(v.state);
    CHECK(std::abs(again.delta) < 1e-12);
    CHECK(max_marker_gap(again.state.curve, v.state.curve) < 1e-12);
}

TEST_CASE("step: stationary states") {
    for (auto scheme : {Scheme::rk4, Scheme::ssd}) {
        FlowParams p;
        p.scheme = scheme;
        auto s = FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 64), FlowKind::sd, 0.0);
        const double a0 = s.target_area;
        FlowState cur = s;
        for (int i = 0; i < 10; ++i) {
            const double dt = adaptive_dt(cur, p);
            cur = step(cur, dt, p).state;
        }
        CHECK(std::abs(enclosed_area(cur.curve) - a0) <= 1e-10);
        CHECK(max_marker_gap(cur.curve, s.curve) <= 1e-12);
        auto lam = FlowState::make(flat_lamella(32), FlowKind::ms, 2.0);
        auto next = step(lam, adaptive_dt(lam, p), p).state;
        CHECK(max_marker_gap(next.curve, lam.curve) <= 1e-12);
    }
}

TEST_CASE("step: RK4 self-convergence and time reversal") {
    auto c = shapes::perturbed_circle({0.5, 0.5}, 0.2, 4, 0.03, 64);
    auto ref = shapes::circle({0.5, 0.5}, 0.2, 128);
    auto s = FlowState::make(c, FlowKind::sd, 0.0);
    const double dt = adaptive_dt(s);
    const auto one = advance(c, dt, 1), two = advance(c, dt, 2), four = advance(c, dt, 4);
    const double order = std::log2(max_height_gap(one, two, ref) / max_height_gap(two, four, ref));
    MESSAGE("Richardson order " << order);
    CHECK(order >= 3.8);

    FlowParams raw;
    raw.resample = false;
    raw.enforce_volume = false;
    std::vector<double> err;
    for (double f : {1.0, 0.5}) {
        auto fwd = step(s, f * dt, raw).state;
        auto back = step(fwd, -f * dt, raw).state;
        err.push_back(max_marker_gap(back.curve, c));
    }
    MESSAGE("reversal errors " << err[0] << " " << err[1]);
    CHECK(err[0] / err[1] > std::pow(2.0, 4.5));
}

TEST_CASE("step: SSD agrees with RK4 on a smooth trajectory") {
    auto c = wavy_lamella(0.01, 32);
    FlowParams ssd;
    ssd.scheme = Scheme::ssd;
    ssd.c_cfl = 0.02;
    const double t = 200 * 0.02 * std::pow(1.0 / 32, 4);
    auto a = advance(c, t, 200), b = advance(c, t, 200, ssd);
    auto ref = flat_lamella(32);
    auto ha = height_function(a, ref);
    const double amp = *std::max_element(ha.values.begin(), ha.values.end());
    CHECK(max_height_gap(a, b, ref) < 1e-3 * amp);
}

TEST_CASE("run: stationary circle, energy and volume along a perturbed lamella") {
    FlowParams ssd;
    ssd.scheme = Scheme::ssd;
    auto circ = run(FlowState::make(shapes::circle({0.5, 0.5}, 0.2, 32), FlowKind::sd, 0.0), {}, 1e-3, ssd);
    CHECK(circ.reason == StopReason::none);
    CHECK(circ.trace.records.back().t == doctest::Approx(1e-3).epsilon(1e-14));
    for (const auto& r : circ.trace.records) {
        CHECK(r.event.empty());
        CHECK(std::abs(r.J - circ.trace.records.front().J) <= 1e-9);
    }

    for (auto kind : {FlowKind::sd, FlowKind::ms}) {
        auto s = FlowState::make(wavy_lamella(0.01, 32), kind, 0.5);
        StoppingMonitor mon;
        mon.reference = flat_lamella(32);
        mon.eps0 = 0.5;
        mon.delta0 = 100.0;
        FlowParams p;
        p.max_steps = 150;
        auto r = run(s, mon, 1.0, p);
        CHECK(r.reason == StopReason::max_steps);
        const auto& rec = r.trace.records;
        REQUIRE(rec.size() == 151);
        for (std::size_t i = 1; i < rec.size(); ++i) {
            CHECK(rec[i].t > rec[i - 1].t);
            CHECK(rec[i].J <= rec[i - 1].J + 1e-9 * std::abs(rec[i].J));
            CHECK(rec[i].dissipation >= 0.0);
            CHECK(std::abs(rec[i].area - s.target_area) <= 1e-6 * s.target_area);
        }
        CHECK(rec.back().psi_c1 < rec.front().psi_c1);
        CHECK(rec.back().event == "max_steps");
    }
}

TEST_CASE("run: stopping events") {
    auto s = FlowState::make(wavy_lamella(0.01, 32), FlowKind::sd, 0.0);
    StoppingMonitor zero;
    zero.delta0 = 0.0;
    auto r = run(s, zero, 1.0);
    CHECK(r.reason == StopReason::dissipation_exceeded);
    CHECK(r.steps == 0);
    CHECK(r.trace.records.size() == 1);
    CHECK(r.trace.records[0].event == "dissipation_exceeded");

    StoppingMonitor tight;
    tight.reference = flat_lamella(32);
    tight.eps0 = 0.01;  // sup|psi| + sup|psi'| = 0.01 (1 + 2 pi)
    CHECK(run(s, tight, 1.0).reason == StopReason::c1_exceeded);

    StoppingMonitor far;
    far.reference = shapes::strip(0.0, 0.2, 32);  // interfaces outside the tubular neighbourhood
    auto g = run(s, far, 1.0);
    CHECK(g.reason == StopReason::graph_failure);
    CHECK(!g.message.empty());

    FlowParams p;
    p.dt_min = 1.0;
    CHECK(run(s, {}, 1.0, p).reason == StopReason::dt_underflow);

    // a pinch-off cannot be represented: the step fails and the last valid state is reported
    auto neck = shapes::graph_strip(0.45, 0.55, [](double x) { return 0.045 * std::cos(2 * pi * 3 * x); },
                                    [](double x) { return -0.045 * std::cos(2 * pi * 3 * x); }, 32);
    FlowParams fast;
    fast.scheme = Scheme::ssd;
    fast.c_cfl = 50.0;
    bool saw_failure = false;
    RunSinks sinks;
    sinks.on_failure = [&](const FlowState&) { saw_failure = true; };
    auto pinch = run(FlowState::make(neck, FlowKind::sd, 0.0), {}, 1.0, fast, sinks);
    if (pinch.reason == StopReason::graph_failure) CHECK(saw_failure);
    CHECK(pinch.reason != StopReason::max_steps);
}

TEST_CASE("run: snapshots, determinism and trace round trip") {
    auto s = FlowState::make(wavy_lamella(0.01, 32), FlowKind::sd, 0.0);
    FlowParams p;
    p.max_steps = 40;
    std::vector<std::size_t> seen;
    RunSinks sinks;
    sinks.snapshot_every = 10;
    sinks.on_snapshot = [&](const FlowState&, std::size_t k) { seen.push_back(k); };
    auto a = run(s, {}, 1.0, p, sinks);
    auto b = run(s, {}, 1.0, p);
    CHECK(seen == std::vector<std::size_t>{10, 20, 30, 40});
    CHECK(a.trace.csv() == b.trace.csv());

    const auto path = std::filesystem::temp_directory_path() / "torusflow_trace_roundtrip.csv";
    a.trace.write_csv(path.string());
    auto back = EnergyTrace::read_csv(path.string());
    CHECK(back.csv() == a.trace.csv());
    std::filesystem::remove(path);
}

TEST_CASE("run: golden perturbed-lamella trace") {
    const std::string golden = std::string(TORUSFLOW_TEST_DATA) + "/golden_sd_lamella.csv";
    auto s = FlowState::make(wavy_lamella(0.01, 32), FlowKind::sd, 0.0);
    FlowParams p;
    p.max_steps = 200;
    auto r = run(s, {}, 1.0, p);
    auto g = EnergyTrace::read_csv(golden);
    REQUIRE(g.records.size() == r.trace.records.size());
    for (std::size_t i = 0; i < g.records.size(); ++i) {
        const auto &x = g.records[i], &y = r.trace.records[i];
        CHECK(y.t == doctest::Approx(x.t).epsilon(1e-12));
        CHECK(y.J == doctest::Approx(x.J).epsilon(1e-12));
        CHECK(y.area == doctest::Approx(x.area).epsilon(1e-12));
        CHECK(y.dissipation == doctest::Approx(x.dissipation).epsilon(1e-9));
        CHECK(y.event == x.event);
    }
}
