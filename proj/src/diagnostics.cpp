#include "torusflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <json.hpp>

#include "torusflow/errors.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/fourier.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/ms_solver.hpp"
#include "torusflow/variation.hpp"

namespace torusflow {

namespace {

double relative(double lhs, double rhs, double floor) {
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + long(m), v.end());
    if (v.size() % 2 == 1) return v[m];
    const double hi = v[m];
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + long(m)));
}

double weighted_sum(const std::vector<double>& w, const std::function<double(std::size_t)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f(i);
    return s;
}

std::vector<double> scaled(const CurveSamples& v, double c) {
    std::vector<double> out(v.values);
    for (double& x : out) x *= c;
    return out;
}

double default_virtual_dt(const PeriodicCurve& curve, FlowKind kind, double gamma) {
    auto st = FlowState::make(curve, kind, gamma);
    FlowParams p;
    p.scheme = Scheme::ssd;
    return adaptive_dt(st, p) / 10.0;
}

// (D(X + dt V nu) - D(X - dt V nu)) / (4 dt). The straight-line states agree with the
// trajectory to first order, and the second-order offset cancels in the centered difference.
double half_dissipation_rate(const PeriodicCurve& curve, const CurveSamples& v, FlowKind kind, double gamma,
                             double dt) {
    const auto plus = displace_normal(curve, scaled(v, dt), Validation::skip);
    const auto minus = displace_normal(curve, scaled(v, -dt), Validation::skip);
    const double dp = evaluate_velocity(plus, kind, gamma).dissipation;
    const double dm = evaluate_velocity(minus, kind, gamma).dissipation;
    return (dp - dm) / (4.0 * dt);
}

void add_form_terms(IdentityReport& r, const QuadraticFormTerms& q) {
    r.terms.emplace_back("d2J_local", q.local);
    r.terms.emplace_back("d2J_curvature", q.curvature);
    r.terms.emplace_back("d2J_nonlocal", q.nonlocal);
    r.terms.emplace_back("d2J_potential", q.potential);
    r.terms.emplace_back("d2J_total", q.total());
}

// Logged, never asserted: d2J[V] against ||V||_H1^2 and the cubic terms against the same norm.
void add_bounds(IdentityReport& r, const PeriodicCurve& curve, const CurveSamples& v, double q, double cubic) {
    const auto w = arclength_weights(curve);
    const auto vs = arclength_derivative(curve, v);
    const double h1 = weighted_sum(w, [&](std::size_t i) { return v[i] * v[i] + vs[i] * vs[i]; });
    r.terms.emplace_back("velocity_h1_norm2", h1);
    r.terms.emplace_back("d2J_over_h1", h1 > 0.0 ? q / h1 : 0.0);
    r.terms.emplace_back("cubic_over_h1", h1 > 0.0 ? cubic / h1 : 0.0);
}

void finish(IdentityReport& r, double scale) {
    r.residual = r.lhs - r.rhs;
    r.relative_residual = relative(r.lhs, r.rhs, 1e-14 * std::max(1.0, scale));
}

}  // namespace

std::string FirstIdentityReport::json() const {
    nlohmann::ordered_json j;
    j["median_relative_residual"] = median;
    j["max_relative_residual"] = max;
    j["residuals"] = residuals;
    return j.dump(2);
}

FirstIdentityReport verify_first_identity(const EnergyTrace& trace) {
    const auto& rec = trace.records;
    if (rec.size() < 3) throw ConfigError("verify_first_identity needs at least 3 records");
    double jmax = 0.0;
    for (const auto& r : rec) jmax = std::max(jmax, std::abs(r.J));
    FirstIdentityReport out;
    for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
        // compared as energy changes over the interval, so the floor is in units of J
        const double span = rec[i + 1].t - rec[i - 1].t;
        const double dj = -(rec[i + 1].J - rec[i - 1].J);
        out.residuals.push_back(relative(dj, rec[i].dissipation * span, 1e-14 * std::max(1.0, jmax)));
    }
    out.median = median_of(out.residuals);
    out.max = *std::max_element(out.residuals.begin(), out.residuals.end());
    return out;
}

FirstIdentityReport verify_first_identity(EnergyTrace& trace, bool annotate) {
    auto out = verify_first_identity(static_cast<const EnergyTrace&>(trace));
    if (annotate) {
        auto& rec = trace.records;
        rec.front().identity1_residual = std::numeric_limits<double>::quiet_NaN();
        rec.back().identity1_residual = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 1; i + 1 < rec.size(); ++i) rec[i].identity1_residual = out.residuals[i - 1];
    }
    return out;
}

double IdentityReport::term(const std::string& name) const {
    for (const auto& [k, v] : terms)
        if (k == name) return v;
    throw ConfigError("IdentityReport has no term " + name);
}

std::string IdentityReport::json() const {
    nlohmann::ordered_json j;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["residual"] = residual;
    j["relative_residual"] = relative_residual;
    j["dt"] = dt;
    j["criticality_linf"] = criticality_linf;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : terms) t[k] = v;
    j["terms"] = t;
    return j.dump(2);
}

IdentityReport verify_second_identity_ms(const PeriodicCurve& curve, double gamma, double dt) {
    if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
    IdentityReport r;
    r.dt = dt > 0.0 ? dt : default_virtual_dt(curve, FlowKind::ms, gamma);
    const auto ms = ms_normal_velocity(curve, gamma, true);
    const auto& v = ms.velocity;
    const auto w = arclength_weights(curve);
    const auto& [plus, minus] = ms.solution.one_sided;

    const auto q = second_variation_form(curve, gamma, v);
    const double cubic = 0.5 * weighted_sum(w, [&](std::size_t i) { return (plus[i] + minus[i]) * v[i] * v[i]; });
    r.lhs = half_dissipation_rate(curve, v, FlowKind::ms, gamma, r.dt);
    r.rhs = -q.total() + cubic;
    r.criticality_linf = criticality_residual(curve, gamma).linf;
    add_form_terms(r, q);
    r.terms.emplace_back("one_sided_cubic", cubic);
    r.terms.emplace_back("dissipation", dissipation_ms(ms.solution));
    add_bounds(r, curve, v, q.total(), cubic);
    finish(r, std::abs(q.local) + std::abs(q.curvature) + std::abs(q.nonlocal) + std::abs(q.potential));
    return r;
}

IdentityReport verify_second_identity_sd(const PeriodicCurve& curve, double dt) {
    IdentityReport r;
    r.dt = dt > 0.0 ? dt : default_virtual_dt(curve, FlowKind::sd, 0.0);
    const auto ev = evaluate_velocity(curve, FlowKind::sd, 0.0);
    const auto& v = ev.velocity;
    const auto& h = ev.curvature;
    const auto hs = arclength_derivative(curve, h);
    const auto w = arclength_weights(curve);

    const auto q = second_variation_form(curve, 0.0, v);
    // in the plane B[D_tau H] = kappa |H_s|^2 and H = kappa
    const double second_form = -weighted_sum(w, [&](std::size_t i) { return h[i] * hs[i] * hs[i] * v[i]; });
    const double mean_curv = 0.5 * weighted_sum(w, [&](std::size_t i) { return h[i] * hs[i] * hs[i] * v[i]; });
    r.lhs = half_dissipation_rate(curve, v, FlowKind::sd, 0.0, r.dt);
    r.rhs = -q.total() + second_form + mean_curv;
    r.criticality_linf = criticality_residual(curve, 0.0).linf;
    add_form_terms(r, q);
    r.terms.emplace_back("second_fundamental_form_cubic", second_form);
    r.terms.emplace_back("mean_curvature_cubic", mean_curv);
    r.terms.emplace_back("dissipation", ev.dissipation);
    add_bounds(r, curve, v, q.total(), second_form + mean_curv);
    finish(r, std::abs(q.local) + std::abs(q.curvature));
    return r;
}

namespace {

// Membership of the grid nodes in E by scanlines: along each row, the crossing to the left of a node
// decides it (the outer normal points in -x where the row enters E). Rows without crossings fall back
// to one signed-distance query.
std::vector<char> indicator_nodes(const PeriodicCurve& curve, std::size_t n) {
    std::vector<std::vector<std::pair<double, char>>> rows(n);
    for (const auto& lp : curve.loops()) {
        const std::size_t m = lp.size();
        const double o = double(lp.orientation());
        for (std::size_t k = 0; k < m; ++k) {
            const Vec2 a = lp.point(k);
            const Vec2 b = k + 1 < m ? lp.point(k + 1) : lp.point(0) + lp.winding().vec();
            if (a.y == b.y) continue;
            const double lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
            const char enters = o * (b.y - a.y) < 0.0;
            // rows y_j + q inside [lo, hi) for integer image shifts q
            for (auto j = long(std::ceil(lo * double(n))); double(j) < hi * double(n); ++j) {
                const double y = double(j) / double(n);
                if (y < lo || y >= hi) continue;
                const double x = a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
                const auto row = std::size_t(((j % long(n)) + long(n)) % long(n));
                rows[row].emplace_back(x - std::floor(x), enters);
            }
        }
    }
    std::vector<char> inside(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& r = rows[j];
        std::sort(r.begin(), r.end());
        if (r.empty()) {
            const bool in = signed_distance(curve, {Vec2{0.0, double(j) / double(n)}})[0] < 0.0;
            std::fill_n(inside.begin() + long(j * n), n, char(in));
            continue;
        }
        std::size_t c = 0;
        char state = r.back().second;  // wraps around from the last crossing of the row
        for (std::size_t i = 0; i < n; ++i) {
            const double x = double(i) / double(n);
            while (c < r.size() && r[c].first <= x) state = r[c++].second;
            inside[j * n + i] = state;
        }
    }
    return inside;
}

}  // namespace

AsymmetryDistance asymmetry_distance(const PeriodicCurve& curve, const PeriodicCurve& reference, std::size_t grid_n) {
    if (grid_n < 16) throw ResolutionError("asymmetry_distance requires grid_n >= 16");
    const auto in_e = indicator_nodes(curve, grid_n);
    const auto in_f = indicator_nodes(reference, grid_n);
    std::vector<Vec2> diff;
    for (std::size_t j = 0; j < grid_n; ++j)
        for (std::size_t i = 0; i < grid_n; ++i)
            if (in_e[j * grid_n + i] != in_f[j * grid_n + i])
                diff.push_back({double(i) / double(grid_n), double(j) / double(grid_n)});
    const double cell = 1.0 / double(grid_n * grid_n);
    AsymmetryDistance out;
    out.sym_diff_area = double(diff.size()) * cell;
    for (double d : signed_distance(reference, diff)) out.D += std::abs(d) * cell;
    return out;
}

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& values) {
    if (t.size() != values.size() || t.size() < 2) throw ConfigError("fit_exponential needs at least 2 points");
    const double n = double(t.size());
    double st = 0.0, sy = 0.0;
    std::vector<double> y(values.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(values[i] > 0.0)) throw ConfigError("fit_exponential: column must be positive on the window");
        y[i] = std::log(values[i]) - std::log(values[0]);  // exact zeros for a constant column
        st += t[i];
        sy += y[i];
    }
    const double tm = st / n, ym = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    if (stt == 0.0) throw ConfigError("fit_exponential: window has zero time extent");
    const double slope = sty / stt;
    ExponentialFit f;
    f.c0 = -slope;
    const double ss_res = std::max(0.0, syy - slope * sty);
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.t_begin = t.front();
    f.t_end = t.back();
    return f;
}

ExponentialFit fit_exponential(const EnergyTrace& trace, const std::string& column, double t_begin, double t_end) {
    double TraceRecord::*field = nullptr;
    if (column == "J") field = &TraceRecord::J;
    else if (column == "perimeter") field = &TraceRecord::perimeter;
    else if (column == "nonlocal") field = &TraceRecord::nonlocal;
    else if (column == "area") field = &TraceRecord::area;
    else if (column == "dissipation") field = &TraceRecord::dissipation;
    else if (column == "volume_correction") field = &TraceRecord::volume_correction;
    else if (column == "psi_c1") field = &TraceRecord::psi_c1;
    else throw ConfigError("fit_exponential: unknown column " + column);
    std::vector<double> t, v;
    for (const auto& r : trace.records) {
        if (r.t < t_begin || r.t > t_end) continue;
        t.push_back(r.t);
        v.push_back(r.*field);
    }
    return fit_exponential(t, v);
}

double discrete_sobolev_norm(const CurveSamples& psi, const PeriodicCurve& reference, double s) {
    if (psi.size() != reference.total_markers()) throw ConfigError("discrete_sobolev_norm: size mismatch");
    const auto lengths = loop_lengths(reference);
    double total = 0.0;
    for (std::size_t l = 0; l < reference.num_loops(); ++l) {
        const auto c = fourier::forward(psi.loop_span(reference, l));
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double om = 2.0 * std::numbers::pi * double(fourier::wavenumber(j, c.size())) / lengths[l];
            total += std::pow(1.0 + om * om, s) * std::norm(c[j]);
        }
    }
    return total;
}

}  // namespace torusflow
