#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torusflow/errors.hpp"
#include "torusflow/field_solver.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/layer.hpp"
#include "torusflow/ms_solver.hpp"
#include "torusflow/shapes.hpp"

using namespace torusflow;
using std::numbers::pi;

namespace {

// Periodic 1D Green function, -G'' = delta - 1, zero mean.
double green1(double y) {
    y -= std::floor(y + 0.5);
    return 0.5 * (std::abs(y) - 0.5) * (std::abs(y) - 0.5) - 1.0 / 24.0;
}

CurveSamples on_curve(const PeriodicCurve& c, double (*f)(Vec2)) {
    std::vector<double> v;
    for (const auto& loop : c.loops())
        for (std::size_t j = 0; j < loop.size(); ++j) v.push_back(f(loop.point(j)));
    return CurveSamples(v);
}

double weighted_dot(const PeriodicCurve& c, const std::vector<double>& a, const CurveSamples& b) {
    auto w = arclength_weights(c);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

std::vector<Vec2> markers(const PeriodicCurve& c) {
    std::vector<Vec2> p;
    for (const auto& loop : c.loops())
        for (std::size_t j = 0; j < loop.size(); ++j) p.push_back(loop.torus_point(j));
    return p;
}

}  // namespace

TEST_CASE("rasterize: strip values and mean") {
    auto c = shapes::strip(0.0, 0.3, 64);
    auto u = rasterize_indicator(c, 256);
    CHECK(u.at(128, 38) == 1.0);   // (0.5, 0.148)
    CHECK(u.at(128, 166) == -1.0); // (0.5, 0.648)
    CHECK(std::abs(u.mean() - (2 * 0.3 - 1)) <= 2.0 / 256);
    CHECK_THROWS_AS(rasterize_indicator(c, 64), ConfigError);
}

TEST_CASE("poisson: single modes and constants") {
    GridField rhs(64), c(64, 3.0);
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t i = 0; i < 64; ++i) rhs.at(i, j) = std::cos(2 * pi * double(i) / 64);
    auto v = solve_poisson_zero_mean(rhs);
    double err = 0.0;
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t i = 0; i < 64; ++i) err = std::max(err, std::abs(v.at(i, j) - std::cos(2 * pi * double(i) / 64) / (4 * pi * pi)));
    CHECK(err < 1e-15);
    CHECK(v.zero_mean);
    CHECK(solve_poisson_zero_mean(c).max_abs() < 1e-15);
    CHECK(dirichlet_energy(v) == doctest::Approx(1 / (8 * pi * pi)).epsilon(1e-13));
    CHECK(dirichlet_energy(GridField(32, 2.0)) == 0.0);
}

TEST_CASE("poisson: strip energy converges to the 1D oracle") {
    const double h = 0.3, exact = h * h * (1 - h) * (1 - h) / 3;
    double prev = 1.0;
    for (std::size_t n : {128u, 256u, 512u}) {
        auto c = shapes::strip(0.1, h, 32);
        const double e = dirichlet_energy(solve_poisson_zero_mean(rasterize_indicator(c, n)));
        const double err = std::abs(e - exact) / exact;
        CHECK(err < 0.6 * prev);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("potential_of_set: strip and circle cross-checks") {
    const double h = 0.3;
    auto c = shapes::strip(0.1, h, 32);
    auto gp = potential_of_set(c, 256);
    for (std::size_t i = 0; i < c.total_markers(); ++i)
        CHECK(gp.trace.normal_derivative[i] == doctest::Approx(-h * (1 - h)).epsilon(0.03));
    // circle: agree with the boundary-integral route to a few percent, keep the 4-fold symmetry
    auto circ = shapes::circle({0.5, 0.5}, 0.2, 64);
    auto g = potential_of_set(circ, 256);
    auto b = potential_trace(circ);
    for (std::size_t i = 0; i < 64; i += 5) {
        CHECK(g.trace.normal_derivative[i] == doctest::Approx(b.normal_derivative[i]).epsilon(0.03));
        CHECK(g.trace.boundary_values[i] == doctest::Approx(b.boundary_values[i]).epsilon(0.03));
    }
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(g.trace.boundary_values[i] - g.trace.boundary_values[i + 16]) < 1e-8);
}

TEST_CASE("potential_of_set: translation equivariance") {
    const std::size_t n = 128;
    auto c = shapes::perturbed_circle({0.5, 0.5}, 0.2, 3, 0.02, 64);
    auto v0 = potential_of_set(c, n).v;
    auto v1 = potential_of_set(translate(c, {3.0 / n, -5.0 / n}), n).v;
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(v1.at((i + 3) % n, (j + n - 5) % n) - v0.at(i, j)));
    CHECK(err < 1e-12);
}

TEST_CASE("line potential: zero density and two-line oracle") {
    auto c = shapes::strip(0.3, 0.4, 32);
    auto z = line_measure_potential(c, CurveSamples(std::vector<double>(64, 0.0)), 128);
    CHECK(z.v.max_abs() == 0.0);
    std::vector<double> phi(64, 1.0);
    for (std::size_t j = 32; j < 64; ++j) phi[j] = -1.0;  // +1 on the top line y = 0.7, -1 on the bottom y = 0.3
    auto lp = line_measure_potential(c, CurveSamples(phi), 256);
    CHECK(std::abs(lp.removed_mean) < 1e-14);
    const double sigma = 2.0 / 256;
    double err = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
        const double y = double(j) / 256;
        if (std::abs(y - 0.7) < 8 * sigma || std::abs(y - 0.3) < 8 * sigma) continue;
        err = std::max(err, std::abs(lp.v.at(17, j) - (green1(y - 0.7) - green1(y - 0.3))));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("line potential: reciprocity, positivity and the boundary-integral cross-check") {
    auto a = shapes::circle({0.3, 0.3}, 0.12, 64);
    auto b = shapes::ellipse({0.72, 0.68}, 0.15, 0.08, 64);
    auto phi = on_curve(a, [](Vec2 p) { return std::cos(2 * pi * p.x) + 0.2; });
    auto psi = on_curve(b, [](Vec2 p) { return std::sin(2 * pi * p.y); });
    auto va = line_measure_potential(a, phi, 256), vb = line_measure_potential(b, psi, 256);
    CurveSamples pa(phi), pb(psi);
    for (auto& x : pa.values) x -= va.removed_mean;
    for (auto& x : pb.values) x -= vb.removed_mean;
    const double ab = weighted_dot(b, interpolate(va.v, markers(b)), pb);
    const double ba = weighted_dot(a, interpolate(vb.v, markers(a)), pa);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-6));

    const double e = dirichlet_energy(va.v);
    CHECK(e >= 0.0);
    // int int G phi phi by the single layer
    auto s = assemble_single_layer(a);
    Eigen::VectorXd f = Eigen::VectorXd::Map(pa.values.data(), 64);
    auto w = arclength_weights(a);
    Eigen::VectorXd wf = f.cwiseProduct(Eigen::VectorXd::Map(w.data(), 64));
    CHECK(e == doctest::Approx(wf.dot(s * f)).epsilon(0.05));
}

TEST_CASE("ms dissipation: grid reconstruction of w") {
    auto c = shapes::perturbed_circle({0.5, 0.5}, 0.2, 3, 0.03, 64);
    auto sol = solve_jump(c, curvature(c));
    // -Laplace w = sigma on the curve; the smoothed delta biases the energy at first order in the
    // width, so combine two grids by Richardson extrapolation
    const double e256 = dirichlet_energy(line_measure_potential(c, sol.density, 256).v);
    const double e512 = dirichlet_energy(line_measure_potential(c, sol.density, 512).v);
    CHECK(2 * e512 - e256 == doctest::Approx(dissipation_ms(sol)).epsilon(0.01));
    CHECK(e512 < dissipation_ms(sol));
}
