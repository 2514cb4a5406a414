#include "torusflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "torusflow/energy.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/fourier.hpp"
#include "torusflow/geometry.hpp"

namespace torusflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Points = std::vector<Vec2>;

Points flatten(const PeriodicCurve& c) {
    Points x;
    x.reserve(c.total_markers());
    for (const auto& lp : c.loops()) x.insert(x.end(), lp.lifted().begin(), lp.lifted().end());
    return x;
}

PeriodicCurve rebuild(const PeriodicCurve& like, const Points& x, Validation v) {
    std::vector<MarkerLoop> loops;
    loops.reserve(like.num_loops());
    for (std::size_t l = 0; l < like.num_loops(); ++l) {
        const auto& lp = like.loop(l);
        const auto first = x.begin() + long(like.offset(l));
        loops.emplace_back(Points(first, first + long(lp.size())), lp.winding(), lp.orientation());
    }
    return PeriodicCurve(std::move(loops), v);
}

Points normal_motion(const PeriodicCurve& c, const CurveSamples& v) {
    auto nu = normals(c);
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = v[i] * nu[i];
    return nu;
}

// x + a * k, elementwise
Points axpy(const Points& x, double a, const Points& k) {
    Points y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * k[i];
    return y;
}

// Leading-order stiff operator acting on the periodic part of each loop, in Fourier space.
// SD: -d_s^4, MS: -2 |d_s|^3, with the arclength scale of the loop length at the start of the step.
class StiffPart {
public:
    StiffPart(const PeriodicCurve& c, FlowKind kind) : curve_(c), kind_(kind), lengths_(loop_lengths(c)) {}

    Points apply(const Points& x) const {
        return transform(x, [](double s) { return s; }, false);
    }
    /// Solves (I - a L) y = r.
    Points solve(double a, const Points& r) const {
        return transform(r, [a](double s) { return 1.0 / (1.0 - a * s); }, true);
    }

private:
    double symbol(int k, double length) const {
        const double w = kTwoPi * std::abs(double(k)) / length;
        return kind_ == FlowKind::sd ? -w * w * w * w : -2.0 * w * w * w;
    }

    template <class F>
    Points transform(const Points& x, F f, bool keep_linear) const {
        Points out(x.size());
        for (std::size_t l = 0; l < curve_.num_loops(); ++l) {
            const auto& lp = curve_.loop(l);
            const std::size_t n = lp.size(), off = curve_.offset(l);
            const Vec2 w = lp.winding().vec();
            std::vector<double> px(n), py(n);
            for (std::size_t j = 0; j < n; ++j) {
                const Vec2 p = x[off + j] - (double(j) / double(n)) * w;
                px[j] = p.x;
                py[j] = p.y;
            }
            auto cx = fourier::forward(std::span<const double>(px));
            auto cy = fourier::forward(std::span<const double>(py));
            for (std::size_t k = 0; k < n; ++k) {
                const double m = f(symbol(fourier::wavenumber(k, n), lengths_[l]));
                cx[k] *= m;
                cy[k] *= m;
            }
            auto qx = fourier::inverse_real(cx), qy = fourier::inverse_real(cy);
            for (std::size_t j = 0; j < n; ++j) {
                out[off + j] = {qx[j], qy[j]};
                if (keep_linear) out[off + j] = out[off + j] + (double(j) / double(n)) * w;
            }
        }
        return out;
    }

    const PeriodicCurve& curve_;
    FlowKind kind_;
    std::vector<double> lengths_;
};

Points rk4(const PeriodicCurve& c, const Points& x, const Points& k1, double dt, FlowKind kind, double gamma) {
    auto stage = [&](const Points& y) {
        auto cy = rebuild(c, y, Validation::skip);
        return normal_motion(cy, evaluate_velocity(cy, kind, gamma).velocity);
    };
    const Points k2 = stage(axpy(x, 0.5 * dt, k1));
    const Points k3 = stage(axpy(x, 0.5 * dt, k2));
    const Points k4 = stage(axpy(x, dt, k3));
    Points y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

// IMEX ARS(2,2,2): the stiff part implicitly, the remainder V nu - L x explicitly.
Points ssd(const PeriodicCurve& c, const Points& x, const Points& k1, double dt, FlowKind kind, double gamma) {
    const double g = 1.0 - 1.0 / std::numbers::sqrt2;
    const double d = 1.0 - 1.0 / (2.0 * g);
    const StiffPart L(c, kind);

    const Points lx = L.apply(x);
    Points n0(x.size()), r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        n0[i] = k1[i] - lx[i];
        r[i] = x[i] + dt * g * n0[i];
    }
    const Points y1 = L.solve(dt * g, r);

    auto c1 = rebuild(c, y1, Validation::skip);
    const Points v1 = normal_motion(c1, evaluate_velocity(c1, kind, gamma).velocity);
    const Points ly1 = L.apply(y1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Vec2 n1 = v1[i] - ly1[i];
        r[i] = x[i] + dt * (d * n0[i] + (1.0 - d) * n1 + (1.0 - g) * ly1[i]);
    }
    return L.solve(dt * g, r);
}

// Krasny filter: drop curvature modes below the level that double-precision positions can
// resolve. Curvature carries two derivatives of the positions, so the floor at arclength
// wavenumber K is about u |X| K^2; the surface Laplacian would amplify that noise by another K^2.
CurveSamples denoised_curvature(const PeriodicCurve& curve) {
    auto kappa = curvature(curve);
    const auto lengths = loop_lengths(curve);
    constexpr double kSafety = 10.0;
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& lp = curve.loop(l);
        const std::size_t n = lp.size(), off = curve.offset(l);
        double scale = 0.0;
        for (const Vec2& p : lp.lifted()) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
        const double floor0 = kSafety * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
        auto c = fourier::forward(kappa.loop_span(curve, l));
        bool changed = false;
        for (std::size_t k = 0; k < n; ++k) {
            const int m = fourier::wavenumber(k, n);
            if (m == 0) continue;
            const double K = kTwoPi * double(m) / lengths[l];
            if (std::abs(c[k]) < floor0 * K * K) {
                c[k] = 0.0;
                changed = true;
            }
        }
        if (!changed) continue;
        const auto v = fourier::inverse_real(c);
        std::copy(v.begin(), v.end(), kappa.values.begin() + long(off));
    }
    return kappa;
}

double sup_abs(const CurveSamples& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

std::string to_string(FlowKind k) { return k == FlowKind::ms ? "MS" : "SD"; }
std::string to_string(Scheme s) { return s == Scheme::rk4 ? "RK4" : "SSD"; }

FlowKind parse_flow_kind(const std::string& s) {
    if (s == "MS" || s == "ms") return FlowKind::ms;
    if (s == "SD" || s == "sd") return FlowKind::sd;
    throw ConfigError("unknown flow kind '" + s + "' (expected MS or SD)");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "RK4" || s == "rk4") return Scheme::rk4;
    if (s == "SSD" || s == "ssd") return Scheme::ssd;
    throw ConfigError("unknown scheme '" + s + "' (expected RK4 or SSD)");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::none: return "";
        case StopReason::graph_failure: return "graph_failure";
        case StopReason::c1_exceeded: return "c1_exceeded";
        case StopReason::dissipation_exceeded: return "dissipation_exceeded";
        case StopReason::dt_underflow: return "dt_underflow";
        case StopReason::max_steps: return "max_steps";
    }
    return "";
}

CurveSamples sd_normal_velocity(const PeriodicCurve& curve) {
    auto v = surface_laplacian(curve, denoised_curvature(curve));
    v.kind = SampleKind::velocity;
    return v;
}

CurveSamples sd_normal_velocity(FlowState& state) {
    if (state.flow_kind != FlowKind::sd) throw ConfigError("sd_normal_velocity on a non-SD state");
    return state.velocity().velocity;
}

VelocityEval evaluate_velocity(const PeriodicCurve& curve, FlowKind kind, double gamma) {
    VelocityEval e;
    if (kind == FlowKind::sd) {
        e.curvature = denoised_curvature(curve);
        e.velocity = surface_laplacian(curve, e.curvature);
        e.velocity.kind = SampleKind::velocity;
        e.dissipation = integrate(curve, [&] {
            auto ds = arclength_derivative(curve, e.curvature);
            for (double& x : ds.values) x *= x;
            return ds;
        }());
    } else {
        auto ms = ms_normal_velocity(curve, gamma, false);
        e.curvature = curvature(curve);
        e.velocity = ms.velocity;
        e.dissipation = dissipation_ms(ms.solution);
        e.jump = std::move(ms.solution);
    }
    return e;
}

FlowState FlowState::make(PeriodicCurve curve, FlowKind kind, double gamma) {
    if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
    FlowState s;
    s.target_area = enclosed_area(curve);
    s.curve = std::move(curve);
    s.flow_kind = kind;
    s.gamma = kind == FlowKind::sd ? 0.0 : gamma;
    return s;
}

const VelocityEval& FlowState::velocity() {
    if (!cached) cached = evaluate_velocity(curve, flow_kind, gamma);
    return *cached;
}

double default_c_cfl(Scheme scheme, FlowKind kind) {
    if (scheme == Scheme::ssd) return kind == FlowKind::sd ? 0.2 : 0.5;
    // explicit RK4: the real-axis stability limit 2.785 against (pi/h)^4 and 2 (pi/h)^3
    return kind == FlowKind::sd ? 0.02 : 0.04;
}

double min_marker_spacing(const PeriodicCurve& curve) {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& lp : curve.loops()) {
        const auto& p = lp.lifted();
        for (std::size_t j = 0; j < p.size(); ++j) {
            const Vec2 next = j + 1 < p.size() ? p[j + 1] : p[0] + lp.winding().vec();
            h = std::min(h, norm(next - p[j]));
        }
    }
    return h;
}

double adaptive_dt(FlowState& state, const FlowParams& params) {
    const double c = params.c_cfl > 0.0 ? params.c_cfl : default_c_cfl(params.scheme, state.flow_kind);
    const double h = min_marker_spacing(state.curve);
    double dt = state.flow_kind == FlowKind::sd ? c * h * h * h * h : c * h * h * h;
    const double vmax = sup_abs(state.velocity().velocity);
    if (vmax > 0.0) dt = std::min(dt, h / (4.0 * vmax));
    return dt;
}

VolumeCorrection enforce_volume(const FlowState& state, double area_tol) {
    VolumeCorrection out{state, 0.0};
    FlowState& s = out.state;
    for (int it = 0; it < 4; ++it) {
        const double err = s.target_area - enclosed_area(s.curve);
        if (err == 0.0) break;
        const double cap = 0.25 * min_marker_spacing(s.curve);
        const double d = std::clamp(err / perimeter(s.curve), -cap, cap);
        if (std::abs(d) < 1e-16) break;
        s.curve = displace_normal(s.curve, std::vector<double>(s.curve.total_markers(), d));
        out.delta += d;
    }
    if (out.delta != 0.0) s.cached.reset();
    if (std::abs(enclosed_area(s.curve) - s.target_area) > area_tol)
        throw ResolutionError("enforce_volume: area constraint not reached");
    return out;
}

StepResult step(FlowState& state, double dt, const FlowParams& params) {
    const Points x = flatten(state.curve);
    const Points k1 = normal_motion(state.curve, state.velocity().velocity);
    const Points y = params.scheme == Scheme::rk4 ? rk4(state.curve, x, k1, dt, state.flow_kind, state.gamma)
                                                  : ssd(state.curve, x, k1, dt, state.flow_kind, state.gamma);
    StepResult r;
    r.state.time = state.time + dt;
    r.state.target_area = state.target_area;
    r.state.flow_kind = state.flow_kind;
    r.state.gamma = state.gamma;
    r.state.curve = rebuild(state.curve, y, Validation::full);
    if (params.resample) r.state.curve = resample_equal_arclength(r.state.curve);
    if (params.enforce_volume) {
        auto vc = enforce_volume(r.state, params.area_tol);
        r.state = std::move(vc.state);
        r.volume_correction = vc.delta;
    }
    return r;
}

C1Distance c1_distance(const PeriodicCurve& curve, const PeriodicCurve& reference) {
    const auto psi = height_function(curve, reference);
    const auto dpsi = arclength_derivative(reference, psi);
    C1Distance d;
    double fd = 0.0;
    for (std::size_t l = 0; l < reference.num_loops(); ++l) {
        const auto& lp = reference.loop(l);
        const std::size_t n = lp.size(), off = reference.offset(l);
        const Vec2 w = lp.winding().vec();
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
            const Vec2 xp = lp.point(jp) + (j + 1 == n ? w : Vec2{0.0, 0.0});
            const Vec2 xm = lp.point(jm) - (j == 0 ? w : Vec2{0.0, 0.0});
            fd = std::max(fd, std::abs(psi[off + jp] - psi[off + jm]) / norm(xp - xm));
        }
    }
    d.spectral = sup_abs(psi) + sup_abs(dpsi);
    d.finite_difference = sup_abs(psi) + fd;
    return d;
}

RunResult run(const FlowState& initial, const StoppingMonitor& monitor, double t_end, const FlowParams& params,
              const RunSinks& sinks) {
    RunResult r;
    FlowState s = initial;

    auto check = [&](TraceRecord& rec) -> StopReason {
        if (monitor.reference) {
            try {
                rec.psi_c1 = c1_distance(s.curve, *monitor.reference).spectral;
            } catch (const GraphError& e) {
                r.message = e.what();
                return StopReason::graph_failure;
            }
            if (rec.psi_c1 >= monitor.eps0) return StopReason::c1_exceeded;
        }
        if (rec.dissipation >= 2.0 * monitor.delta0) return StopReason::dissipation_exceeded;
        return StopReason::none;
    };
    auto record = [&](double vc) -> StopReason {
        const auto e = energy(s.curve, s.gamma);
        TraceRecord rec;
        rec.t = s.time;
        rec.J = e.J;
        rec.perimeter = e.perimeter;
        rec.nonlocal = e.nonlocal;
        rec.area = enclosed_area(s.curve);
        rec.dissipation = s.velocity().dissipation;
        rec.volume_correction = vc;
        const StopReason why = check(rec);
        rec.event = to_string(why);
        r.trace.records.push_back(std::move(rec));
        return why;
    };
    auto finish = [&](StopReason why) {
        r.reason = why;
        if (!r.trace.records.empty() && r.trace.records.back().event.empty()) r.trace.records.back().event = to_string(why);
        r.final_state = s;
        return r;
    };

    if (StopReason why = record(0.0); why != StopReason::none) return finish(why);
    while (s.time < t_end) {
        if (params.max_steps && r.steps >= params.max_steps) return finish(StopReason::max_steps);
        double dt = adaptive_dt(s, params);
        if (dt < params.dt_min) {
            r.message = "adaptive dt below dt_min";
            return finish(StopReason::dt_underflow);
        }
        dt = std::min(dt, t_end - s.time);
        StepResult next;
        try {
            next = step(s, dt, params);
        } catch (const TopologyError& e) {
            r.message = e.what();
            if (sinks.on_failure) sinks.on_failure(s);
            return finish(StopReason::graph_failure);
        } catch (const GraphError& e) {
            r.message = e.what();
            if (sinks.on_failure) sinks.on_failure(s);
            return finish(StopReason::graph_failure);
        }
        s = std::move(next.state);
        ++r.steps;
        const StopReason why = record(next.volume_correction);
        if (sinks.snapshot_every && sinks.on_snapshot && r.steps % sinks.snapshot_every == 0) sinks.on_snapshot(s, r.steps);
        if (why != StopReason::none) {
            if (why == StopReason::graph_failure && sinks.on_failure) sinks.on_failure(s);
            return finish(why);
        }
    }
    return finish(StopReason::none);
}

}  // namespace torusflow
