#include "torusflow/green.hpp"

#include <array>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "torusflow/errors.hpp"

namespace torusflow::green {

namespace {

constexpr double kPi = std::numbers::pi;
// Ewald splitting time; r^2 / (4 t0) = pi r^2 balances real and reciprocal decay.
constexpr double kT0 = 1.0 / (4.0 * kPi);
constexpr double kLogPi = 1.1447298858494002;  // log(pi)

double e1(double x) { return boost::math::expint(1, x); }

constexpr int kPatches = 8;
constexpr int kNodes = 13;
constexpr int kComponents = 8;

struct Table {
    // coeff[((patch * kComponents + comp) * kNodes + k) * kNodes + l]
    std::vector<double> coeff;
    Table();
};

std::array<double, kComponents> flatten(const Remainders& r) {
    return {r.rg, r.drg.x, r.drg.y, r.dphi.x, r.dphi.y, r.hpsi.xx, r.hpsi.xy, r.hpsi.yy};
}

Table::Table() : coeff(std::size_t(kPatches * kPatches * kComponents * kNodes * kNodes)) {
    const double width = 1.0 / kPatches;
    std::array<double, kNodes> xs;
    std::array<std::array<double, kNodes>, kNodes> tk;  // tk[k][i] = T_k(x_i)
    for (int i = 0; i < kNodes; ++i) xs[i] = std::cos(kPi * (i + 0.5) / kNodes);
    for (int k = 0; k < kNodes; ++k)
        for (int i = 0; i < kNodes; ++i) tk[k][i] = std::cos(k * kPi * (i + 0.5) / kNodes);

    std::vector<std::array<double, kComponents>> vals(kNodes * kNodes);
    for (int px = 0; px < kPatches; ++px)
        for (int py = 0; py < kPatches; ++py) {
            const double cx = -0.5 + (px + 0.5) * width, cy = -0.5 + (py + 0.5) * width;
            for (int i = 0; i < kNodes; ++i)
                for (int j = 0; j < kNodes; ++j)
                    vals[i * kNodes + j] = flatten(ewald_remainders({cx + 0.5 * width * xs[i], cy + 0.5 * width * xs[j]}));
            const int patch = px * kPatches + py;
            for (int c = 0; c < kComponents; ++c)
                for (int k = 0; k < kNodes; ++k)
                    for (int l = 0; l < kNodes; ++l) {
                        double s = 0.0;
                        for (int i = 0; i < kNodes; ++i)
                            for (int j = 0; j < kNodes; ++j) s += vals[i * kNodes + j][c] * tk[k][i] * tk[l][j];
                        s *= 4.0 / (kNodes * kNodes);
                        if (k == 0) s *= 0.5;
                        if (l == 0) s *= 0.5;
                        coeff[std::size_t(((patch * kComponents + c) * kNodes + k) * kNodes + l)] = s;
                    }
        }
}

const Table& table() {
    static const Table t;
    return t;
}

struct Basis {
    const double* base;
    std::array<double, kNodes> tu, tv;
};

Basis basis(Vec2 z) {
    const double width = 1.0 / kPatches;
    int px = std::min(kPatches - 1, std::max(0, int(std::floor((z.x + 0.5) / width))));
    int py = std::min(kPatches - 1, std::max(0, int(std::floor((z.y + 0.5) / width))));
    double u = 2.0 * (z.x + 0.5 - (px + 0.5) * width) / width;
    double v = 2.0 * (z.y + 0.5 - (py + 0.5) * width) / width;
    Basis b;
    b.base = table().coeff.data() + std::size_t(px * kPatches + py) * kComponents * kNodes * kNodes;
    b.tu[0] = b.tv[0] = 1.0;
    b.tu[1] = u;
    b.tv[1] = v;
    for (int k = 2; k < kNodes; ++k) {
        b.tu[k] = 2.0 * u * b.tu[k - 1] - b.tu[k - 2];
        b.tv[k] = 2.0 * v * b.tv[k - 1] - b.tv[k - 2];
    }
    return b;
}

double component(const Basis& b, int c) {
    const double* p = b.base + c * kNodes * kNodes;
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) {
        double inner = 0.0;
        for (int l = 0; l < kNodes; ++l) inner += p[k * kNodes + l] * b.tv[l];
        s += b.tu[k] * inner;
    }
    return s;
}

}  // namespace

Remainders ewald_remainders(Vec2 z, int m) {
    Remainders out;
    for (int lx = -m; lx <= m; ++lx)
        for (int ly = -m; ly <= m; ++ly) {
            const Vec2 w = z + Vec2{double(lx), double(ly)};
            const double r2 = norm2(w);
            const double x = kPi * r2;
            if (x > 60.0) continue;
            if (lx == 0 && ly == 0) {
                // real-space term of the central cell minus the singular part
                const double a = r2 > 0.0 ? e1(x) + std::log(x) : -std::numbers::egamma;
                out.rg += (a - kLogPi) / (4.0 * kPi);
                const double g = r2 > 0.0 ? -std::expm1(-x) / (2.0 * kPi * r2) : 0.5;
                out.drg += g * w;
                out.dphi += ((a - kLogPi - 1.0) / (8.0 * kPi)) * w;
                const double cw = (a - kLogPi - 1.5) / (32.0 * kPi);
                const double ci = -kT0 * std::exp(-x) / (16.0 * kPi) + r2 * (a - kLogPi - 2.5) / (64.0 * kPi);
                out.hpsi.xx += cw * w.x * w.x + ci;
                out.hpsi.xy += cw * w.x * w.y;
                out.hpsi.yy += cw * w.y * w.y + ci;
            } else {
                const double e = e1(x), ex = std::exp(-x);
                out.rg += e / (4.0 * kPi);
                out.drg += (-ex / (2.0 * kPi * r2)) * w;
                out.dphi += (e / (8.0 * kPi)) * w;
                const double cw = e / (32.0 * kPi);
                const double ci = -(kT0 * ex - 0.25 * r2 * e) / (16.0 * kPi);
                out.hpsi.xx += cw * w.x * w.x + ci;
                out.hpsi.xy += cw * w.x * w.y;
                out.hpsi.yy += cw * w.y * w.y + ci;
            }
        }
    out.rg -= kT0;
    for (int kx = -m; kx <= m; ++kx)
        for (int ky = -m; ky <= m; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double k2 = double(kx * kx + ky * ky);
            const double c = 4.0 * kPi * kPi * k2;
            const double e = std::exp(-c * kT0);
            const double th = 2.0 * kPi * (kx * z.x + ky * z.y);
            const double cs = std::cos(th), sn = std::sin(th);
            const Vec2 tk{2.0 * kPi * kx, 2.0 * kPi * ky};
            out.rg += e / c * cs;
            out.drg += (-e / c * sn) * tk;
            out.dphi += (e * (kT0 / c + 1.0 / (c * c)) * sn) * tk;
            const double d = e * (kT0 * kT0 / (2.0 * c) + kT0 / (c * c) + 1.0 / (c * c * c)) * cs;
            out.hpsi.xx -= d * tk.x * tk.x;
            out.hpsi.xy -= d * tk.x * tk.y;
            out.hpsi.yy -= d * tk.y * tk.y;
        }
    return out;
}

double ewald_green(Vec2 z, int m) {
    double g = -kT0;
    for (int lx = -m; lx <= m; ++lx)
        for (int ly = -m; ly <= m; ++ly) {
            const double r2 = norm2(z + Vec2{double(lx), double(ly)});
            if (r2 == 0.0) throw SingularityError("Green kernel evaluated at coincident points");
            const double x = kPi * r2;
            if (x < 60.0) g += e1(x) / (4.0 * kPi);
        }
    for (int kx = -m; kx <= m; ++kx)
        for (int ky = -m; ky <= m; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double c = 4.0 * kPi * kPi * double(kx * kx + ky * ky);
            g += std::exp(-c * kT0) / c * std::cos(2.0 * kPi * (kx * z.x + ky * z.y));
        }
    return g;
}

Remainders remainders(Vec2 z) {
    const Basis b = basis(min_image(z));
    Remainders r;
    r.rg = component(b, 0);
    r.drg = {component(b, 1), component(b, 2)};
    r.dphi = {component(b, 3), component(b, 4)};
    r.hpsi = {component(b, 5), component(b, 6), component(b, 7)};
    return r;
}

double remainder_rg(Vec2 z) { return component(basis(min_image(z)), 0); }

double green(Vec2 z) {
    const Vec2 zm = min_image(z);
    const double r2 = norm2(zm);
    if (r2 == 0.0) throw SingularityError("Green kernel evaluated at coincident points");
    return -std::log(r2) / (4.0 * kPi) + component(basis(zm), 0);
}

Vec2 green_gradient(Vec2 z) {
    const Vec2 zm = min_image(z);
    const double r2 = norm2(zm);
    if (r2 == 0.0) throw SingularityError("Green gradient evaluated at coincident points");
    const Basis b = basis(zm);
    return (-1.0 / (2.0 * kPi * r2)) * zm + Vec2{component(b, 1), component(b, 2)};
}

Vec2 phi0_gradient(Vec2 z) {
    const double r2 = norm2(z);
    if (r2 == 0.0) return {};
    return (-(std::log(r2) - 1.0) / (8.0 * kPi)) * z;
}

Sym2 psi0_hessian(Vec2 z) {
    const double r2 = norm2(z);
    if (r2 == 0.0) return {};
    const double lg = std::log(r2);
    const double cw = (-4.0 * lg + 6.0) / (128.0 * kPi);
    const double ci = r2 * (-2.0 * lg + 5.0) / (128.0 * kPi);
    return {cw * z.x * z.x + ci, cw * z.x * z.y, cw * z.y * z.y + ci};
}

Vec2 phi_gradient(Vec2 z) {
    const Vec2 zm = min_image(z);
    const Basis b = basis(zm);
    return phi0_gradient(zm) + Vec2{component(b, 3), component(b, 4)};
}

Sym2 psi_hessian(Vec2 z) {
    const Vec2 zm = min_image(z);
    const Basis b = basis(zm);
    Sym2 h = psi0_hessian(zm);
    h.xx += component(b, 5);
    h.xy += component(b, 6);
    h.yy += component(b, 7);
    return h;
}

double periodic_green_kernel(Vec2 x, Vec2 y) { return green(x - y); }

}  // namespace torusflow::green
