#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "torusflow/curve.hpp"

/// Boundary integral operators with the periodic Green kernel on a marker curve.
/// Self-loop log singularities use Kress product quadrature; distinct loops use the trapezoid rule.
namespace torusflow {

/// v_E and its normal derivative sampled on the interface.
struct PotentialTrace {
    CurveSamples boundary_values;
    CurveSamples normal_derivative;
};

/// Kress weights R(t_m) for the integral of log(4 sin^2((t - tau)/2)) f(tau) over one period,
/// m = 0..n-1, t_m = 2 pi m / n.
std::vector<double> kress_log_weights(std::size_t n);

/// Nystrom matrix of (S psi)(x) = int G(x - y) psi(y) ds(y): (S psi)_i = sum_j A_ij psi_j.
/// diag(w) A is symmetric for arclength weights w; A itself is symmetric for equal weights.
Eigen::MatrixXd assemble_single_layer(const PeriodicCurve& curve);

/// Nystrom matrix of the adjoint double layer (K* psi)(x) = int d_nu_x G(x - y) psi(y) ds(y),
/// principal value only (the -+ psi/2 jump terms are not included).
Eigen::MatrixXd assemble_adjoint_double_layer(const PeriodicCurve& curve);

/// v_E on the interface from v = -2 int nu_y . grad Phi(x - y) ds, and d_nu v = -2 nu . S[nu].
PotentialTrace potential_trace(const PeriodicCurve& curve);
PotentialTrace potential_trace(const PeriodicCurve& curve, const Eigen::MatrixXd& single_layer);

/// int |D v_E|^2 = -4 int int nu_x^T Hess Psi(x - y) nu_y ds ds.
double nonlocal_energy(const PeriodicCurve& curve);

}  // namespace torusflow
