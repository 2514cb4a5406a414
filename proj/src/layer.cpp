#include "torusflow/layer.hpp"

#include <cmath>
#include <numbers>

#include "torusflow/geometry.hpp"
#include "torusflow/green.hpp"

namespace torusflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Marker {
    Vec2 x;      // lifted position
    Vec2 nu;     // outer unit normal
    double speed;
    double kappa;
};

struct LoopView {
    std::size_t offset, n;
    Vec2 winding;
    std::vector<double> kress;
};

struct Discretization {
    std::vector<Marker> m;
    std::vector<LoopView> loops;
    std::vector<double> weight;  // arclength weights
};

Discretization discretize(const PeriodicCurve& curve) {
    Discretization d;
    auto nu = normals(curve);
    auto kap = curvature(curve);
    d.weight = arclength_weights(curve);
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& loop = curve.loop(l);
        auto fr = loop_frame(loop);
        const std::size_t off = curve.offset(l);
        for (std::size_t j = 0; j < loop.size(); ++j)
            d.m.push_back({loop.point(j), nu[off + j], fr.speed[j], kap[off + j]});
        d.loops.push_back({off, loop.size(), loop.winding().vec(), kress_log_weights(loop.size())});
    }
    return d;
}

// Smooth periodic replacement for t - tau that agrees with it to O(delta^7).
double s5(double delta) {
    return 1.5 * std::sin(delta) - 0.3 * std::sin(2.0 * delta) + std::sin(3.0 * delta) / 30.0;
}

// Lifted chord X_i - X_j made periodic in the parameter difference delta = t_i - t_j.
Vec2 periodic_chord(const Marker& a, const Marker& b, double delta, Vec2 winding) {
    return a.x - b.x - ((delta - s5(delta)) / kTwoPi) * winding;
}

// log(4 sin^2(delta/2)) - log|z|^2, smooth through delta = 0.
double log_ratio(double delta, double r2) { return std::log(4.0 * std::sin(0.5 * delta) * std::sin(0.5 * delta) / r2); }

}  // namespace

std::vector<double> kress_log_weights(std::size_t n) {
    std::vector<double> r(n, 0.0);
    const std::size_t half = n / 2;
    const std::size_t top = n % 2 == 0 ? half - 1 : half;
    for (std::size_t m = 0; m < n; ++m) {
        const double t = kTwoPi * double(m) / double(n);
        double s = 0.0;
        for (std::size_t p = 1; p <= top; ++p) s += std::cos(double(p) * t) / double(p);
        s *= -4.0 * kPi / double(n);
        if (n % 2 == 0) s -= 4.0 * kPi / (double(n) * double(n)) * std::cos(double(half) * t);
        r[m] = s;
    }
    return r;
}

Eigen::MatrixXd assemble_single_layer(const PeriodicCurve& curve) {
    const auto d = discretize(curve);
    const std::size_t total = d.m.size();
    Eigen::MatrixXd a(total, total);
    for (const auto& li : d.loops)
        for (std::size_t i = 0; i < li.n; ++i) {
            const Marker& xi = d.m[li.offset + i];
            for (const auto& lj : d.loops) {
                const double h = kTwoPi / double(lj.n);
                for (std::size_t j = 0; j < lj.n; ++j) {
                    const Marker& yj = d.m[lj.offset + j];
                    double v;
                    if (&li != &lj) {
                        v = green::green(xi.x - yj.x) * d.weight[lj.offset + j];
                    } else if (i == j) {
                        v = h * (green::remainder_rg(Vec2{}) - std::log(xi.speed * xi.speed) / (4.0 * kPi)) * xi.speed +
                            li.kress[0] * (-xi.speed / (4.0 * kPi));
                    } else {
                        const std::size_t m = (i + li.n - j) % li.n;
                        const double delta = kTwoPi * double(m) / double(li.n);
                        const Vec2 z = min_image(xi.x - yj.x);
                        const double smooth = green::remainder_rg(z) + log_ratio(delta, norm2(z)) / (4.0 * kPi);
                        v = li.kress[m] * (-yj.speed / (4.0 * kPi)) + h * smooth * yj.speed;
                    }
                    a(Eigen::Index(li.offset + i), Eigen::Index(lj.offset + j)) = v;
                }
            }
        }
    return a;
}

Eigen::MatrixXd assemble_adjoint_double_layer(const PeriodicCurve& curve) {
    const auto d = discretize(curve);
    const std::size_t total = d.m.size();
    Eigen::MatrixXd k(total, total);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < total; ++j) {
            const Marker& xi = d.m[i];
            k(Eigen::Index(i), Eigen::Index(j)) =
                i == j ? -xi.kappa / (4.0 * kPi) * d.weight[i]
                       : dot(xi.nu, green::green_gradient(xi.x - d.m[j].x)) * d.weight[j];
        }
    return k;
}

PotentialTrace potential_trace(const PeriodicCurve& curve) {
    return potential_trace(curve, assemble_single_layer(curve));
}

PotentialTrace potential_trace(const PeriodicCurve& curve, const Eigen::MatrixXd& single_layer) {
    const auto d = discretize(curve);
    const std::size_t total = d.m.size();
    std::vector<double> v(total, 0.0);
    for (const auto& li : d.loops)
        for (std::size_t i = 0; i < li.n; ++i) {
            const Marker& xi = d.m[li.offset + i];
            double s = 0.0;
            for (const auto& lj : d.loops) {
                const double h = kTwoPi / double(lj.n);
                for (std::size_t j = 0; j < lj.n; ++j) {
                    const Marker& yj = d.m[lj.offset + j];
                    if (&li != &lj) {
                        s += -2.0 * dot(yj.nu, green::phi_gradient(xi.x - yj.x)) * d.weight[lj.offset + j];
                    } else if (i != j) {
                        const std::size_t m = (i + li.n - j) % li.n;
                        const double delta = kTwoPi * double(m) / double(li.n);
                        const double signed_delta = kTwoPi * (double(i) - double(j)) / double(li.n);
                        const Vec2 dd = periodic_chord(xi, yj, signed_delta, li.winding);
                        const double k1 = yj.speed * dot(yj.nu, dd) / (4.0 * kPi);
                        const double full = -2.0 * dot(yj.nu, green::phi_gradient(xi.x - yj.x)) * yj.speed;
                        const double k2 = full - k1 * std::log(4.0 * std::sin(0.5 * delta) * std::sin(0.5 * delta));
                        s += li.kress[m] * k1 + h * k2;
                    }
                }
            }
            v[li.offset + i] = s;
        }

    Eigen::VectorXd nx(total), ny(total);
    for (std::size_t j = 0; j < total; ++j) {
        nx[Eigen::Index(j)] = d.m[j].nu.x;
        ny[Eigen::Index(j)] = d.m[j].nu.y;
    }
    const Eigen::VectorXd sx = single_layer * nx, sy = single_layer * ny;
    std::vector<double> dn(total);
    for (std::size_t i = 0; i < total; ++i)
        dn[i] = -2.0 * (d.m[i].nu.x * sx[Eigen::Index(i)] + d.m[i].nu.y * sy[Eigen::Index(i)]);
    return {CurveSamples(std::move(v)), CurveSamples(std::move(dn))};
}

double nonlocal_energy(const PeriodicCurve& curve) {
    const auto d = discretize(curve);
    const green::Sym2 h0 = green::remainders(Vec2{}).hpsi;
    double total = 0.0;
    for (const auto& li : d.loops)
        for (std::size_t i = 0; i < li.n; ++i) {
            const Marker& xi = d.m[li.offset + i];
            double s = 0.0;
            for (const auto& lj : d.loops) {
                const double h = kTwoPi / double(lj.n);
                for (std::size_t j = 0; j < lj.n; ++j) {
                    const Marker& yj = d.m[lj.offset + j];
                    const double full = -4.0 * green::psi_hessian(xi.x - yj.x).form(xi.nu, yj.nu);
                    if (&li != &lj) {
                        s += full * d.weight[lj.offset + j];
                    } else if (i == j) {
                        s += h * (-4.0 * h0.form(xi.nu, xi.nu)) * xi.speed;
                    } else {
                        const std::size_t m = (i + li.n - j) % li.n;
                        const double delta = kTwoPi * double(m) / double(li.n);
                        const double signed_delta = kTwoPi * (double(i) - double(j)) / double(li.n);
                        const Vec2 dd = periodic_chord(xi, yj, signed_delta, li.winding);
                        const double k1 = (4.0 * dot(xi.nu, dd) * dot(yj.nu, dd) + 2.0 * norm2(dd) * dot(xi.nu, yj.nu)) /
                                          (32.0 * kPi) * yj.speed;
                        const double k2 = full * yj.speed - k1 * std::log(4.0 * std::sin(0.5 * delta) * std::sin(0.5 * delta));
                        s += li.kress[m] * k1 + h * k2;
                    }
                }
            }
            total += s * d.weight[li.offset + i];
        }
    return total;
}

}  // namespace torusflow
