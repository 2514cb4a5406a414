#pragma once

#include "torusflow/vec2.hpp"

/// Periodic kernels on the unit torus, all as functions of z = x - y:
///   G   with -Laplace G = delta - 1, mean zero
///   Phi with Laplace Phi = G,  mean zero
///   Psi with Laplace Psi = Phi, mean zero
/// Near z = 0 each splits into a radial singular part plus a remainder that is analytic on
/// [-1/2, 1/2]^2. Remainders are tabulated as piecewise Chebyshev series built from a direct
/// Ewald (heat kernel) evaluation.
namespace torusflow::green {

struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double form(Vec2 a, Vec2 b) const { return dot(a, apply(b)); }
};

/// Smooth remainders at a point of [-1/2, 1/2]^2:
///   rg   = G + log|z| / (2 pi)
///   drg  = grad rg
///   dphi = grad Phi - grad Phi0,  Phi0 = -r^2 (log r - 1) / (8 pi)
///   hpsi = Hess Psi - Hess Psi0,  Psi0 = -r^4 log r / (128 pi) + 3 r^4 / (256 pi)
struct Remainders {
    double rg = 0.0;
    Vec2 drg;
    Vec2 dphi;
    Sym2 hpsi;
};

/// Direct Ewald evaluation with images and wavevectors in [-m, m]^2 (slow; oracle and table source).
Remainders ewald_remainders(Vec2 z, int m = 4);
/// Direct Ewald evaluation of G itself; z must not be a lattice point.
double ewald_green(Vec2 z, int m = 4);

/// Tabulated remainders; z is reduced to its minimal image first.
Remainders remainders(Vec2 z);
double remainder_rg(Vec2 z);

/// Full kernels through the tables (z reduced to its minimal image).
/// green throws SingularityError at lattice points.
double green(Vec2 z);
Vec2 green_gradient(Vec2 z);
Vec2 phi_gradient(Vec2 z);
Sym2 psi_hessian(Vec2 z);

/// Singular parts (for the quadrature splits).
Vec2 phi0_gradient(Vec2 z);
Sym2 psi0_hessian(Vec2 z);

/// Periodic Green kernel G(x, y).
double periodic_green_kernel(Vec2 x, Vec2 y);

}  // namespace torusflow::green
