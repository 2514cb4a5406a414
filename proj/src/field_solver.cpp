#include "torusflow/field_solver.hpp"

#include <cmath>
#include <numbers>

#include "torusflow/errors.hpp"
#include "torusflow/fourier.hpp"
#include "torusflow/geometry.hpp"

namespace torusflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using fourier::cplx;

void require_power_of_two(std::size_t n) {
    if (n < 2 || (n & (n - 1)) != 0) throw ConfigError("grid size must be a power of two");
}

// Normalized coefficients c with v(x) = sum c_k exp(2 pi i k.x); Nyquist rows and columns dropped.
std::vector<cplx> coefficients(const GridField& v) {
    auto c = fourier::forward2(v.values, v.n);
    const double inv = 1.0 / double(v.n * v.n);
    for (std::size_t ky = 0; ky < v.n; ++ky)
        for (std::size_t kx = 0; kx < v.n; ++kx) {
            auto& z = c[ky * v.n + kx];
            z = (kx == v.n / 2 || ky == v.n / 2) ? cplx(0.0) : z * inv;
        }
    return c;
}

// Evaluates sum_k c_k m(k) e^{2 pi i k.x} at p with m(k) = 1, 2 pi i kx or 2 pi i ky.
template <class Mult>
double evaluate(const std::vector<cplx>& c, std::size_t n, Vec2 p, Mult mult) {
    std::vector<cplx> ex(n), ey(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int w = fourier::wavenumber(k, n);
        ex[k] = std::polar(1.0, kTwoPi * w * p.x);
        ey[k] = std::polar(1.0, kTwoPi * w * p.y);
    }
    cplx s = 0.0;
    for (std::size_t ky = 0; ky < n; ++ky) {
        cplx row = 0.0;
        for (std::size_t kx = 0; kx < n; ++kx) row += mult(fourier::wavenumber(kx, n), fourier::wavenumber(ky, n)) * c[ky * n + kx] * ex[kx];
        s += row * ey[ky];
    }
    return s.real();
}

}  // namespace

GridField rasterize_indicator(const PeriodicCurve& curve, std::size_t n, double width_cells) {
    require_power_of_two(n);
    if (n < 128) throw ConfigError("rasterize_indicator requires n >= 128");
    GridField u = signed_distance_grid(curve, n);
    const double w = width_cells / double(n);
    for (double& d : u.values) d = std::abs(d) < 6.0 * w ? -std::erf(d / w) : (d < 0.0 ? 1.0 : -1.0);
    u.zero_mean = false;
    return u;
}

GridField solve_poisson_zero_mean(const GridField& rhs) {
    require_power_of_two(rhs.n);
    const std::size_t n = rhs.n;
    auto c = fourier::forward2(rhs.values, n);
    for (std::size_t ky = 0; ky < n; ++ky)
        for (std::size_t kx = 0; kx < n; ++kx) {
            const double kk = double(fourier::wavenumber(kx, n)) * fourier::wavenumber(kx, n) +
                              double(fourier::wavenumber(ky, n)) * fourier::wavenumber(ky, n);
            c[ky * n + kx] = kk == 0.0 ? cplx(0.0) : c[ky * n + kx] / (kTwoPi * kTwoPi * kk);
        }
    auto f = fourier::inverse2(c, n);
    GridField v(n, 0.0, true);
    for (std::size_t i = 0; i < n * n; ++i) v.values[i] = f[i].real();
    const double m = v.mean();
    for (double& x : v.values) x -= m;
    return v;
}

double dirichlet_energy(const GridField& v) {
    const std::size_t n = v.n;
    auto c = fourier::forward2(v.values, n);
    const double inv = 1.0 / double(n * n);
    double e = 0.0;
    for (std::size_t ky = 0; ky < n; ++ky)
        for (std::size_t kx = 0; kx < n; ++kx) {
            const double kk = double(fourier::wavenumber(kx, n)) * fourier::wavenumber(kx, n) +
                              double(fourier::wavenumber(ky, n)) * fourier::wavenumber(ky, n);
            e += kTwoPi * kTwoPi * kk * std::norm(c[ky * n + kx] * inv);
        }
    return e;
}

std::vector<double> interpolate(const GridField& v, const std::vector<Vec2>& points) {
    auto c = coefficients(v);
    std::vector<double> out;
    out.reserve(points.size());
    for (Vec2 p : points) out.push_back(evaluate(c, v.n, p, [](int, int) { return cplx(1.0); }));
    return out;
}

std::vector<Vec2> interpolate_gradient(const GridField& v, const std::vector<Vec2>& points) {
    auto c = coefficients(v);
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (Vec2 p : points)
        out.push_back({evaluate(c, v.n, p, [](int kx, int) { return cplx(0.0, kTwoPi * kx); }),
                       evaluate(c, v.n, p, [](int, int ky) { return cplx(0.0, kTwoPi * ky); })});
    return out;
}

GridPotential potential_of_set(const PeriodicCurve& curve, std::size_t n, double width_cells) {
    GridPotential out;
    out.v = solve_poisson_zero_mean(rasterize_indicator(curve, n, width_cells));
    std::vector<Vec2> pts;
    for (const auto& loop : curve.loops())
        for (std::size_t j = 0; j < loop.size(); ++j) pts.push_back(loop.torus_point(j));
    auto nu = normals(curve);
    auto grad = interpolate_gradient(out.v, pts);
    std::vector<double> dn(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) dn[i] = dot(nu[i], grad[i]);
    out.trace = {CurveSamples(interpolate(out.v, pts)), CurveSamples(std::move(dn))};
    return out;
}

LinePotential line_measure_potential(const PeriodicCurve& curve, const CurveSamples& phi, std::size_t n,
                                     double width_cells) {
    require_power_of_two(n);
    LinePotential out;
    const auto w = arclength_weights(curve);
    double total = 0.0, len = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        total += w[i] * phi[i];
        len += w[i];
    }
    out.removed_mean = total / len;

    const double h = 1.0 / double(n);
    const double sigma = width_cells * h;
    const int reach = int(std::ceil(6.0 * sigma / h));
    GridField rhs(n, 0.0);
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& loop = curve.loop(l);
        LoopFourier f(loop);
        std::vector<double> local(phi.values.begin() + long(curve.offset(l)),
                                  phi.values.begin() + long(curve.offset(l) + loop.size()));
        for (double& x : local) x -= out.removed_mean;
        // oversample the loop so that the spread points are at most h/2 apart
        double length = 0.0;
        for (std::size_t j = 0; j < loop.size(); ++j) length += w[curve.offset(l) + j];
        std::size_t m = loop.size();
        while (length / double(m) > 0.5 * h) m *= 2;
        auto fine = fourier::upsample(fourier::forward(std::span<const double>(local)), m);
        for (std::size_t q = 0; q < m; ++q) {
            const double t = kTwoPi * double(q) / double(m);
            const Vec2 p = reduce(f.position(t));
            const double mass = fine[q] * norm(f.derivative(t, 1)) * kTwoPi / double(m);
            const int ci = int(std::floor(p.x * double(n))), cj = int(std::floor(p.y * double(n)));
            for (int dj = -reach; dj <= reach + 1; ++dj)
                for (int di = -reach; di <= reach + 1; ++di) {
                    const int gi = ci + di, gj = cj + dj;
                    const Vec2 d{double(gi) * h - p.x, double(gj) * h - p.y};
                    const double r2 = norm2(d);
                    const std::size_t ii = std::size_t((gi % int(n) + int(n)) % int(n));
                    const std::size_t jj = std::size_t((gj % int(n) + int(n)) % int(n));
                    rhs.at(ii, jj) += mass * std::exp(-r2 / (2.0 * sigma * sigma)) / (kTwoPi * sigma * sigma);
                }
        }
    }
    out.v = solve_poisson_zero_mean(rhs);
    return out;
}

}  // namespace torusflow
