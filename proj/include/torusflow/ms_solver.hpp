#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "torusflow/curve.hpp"

namespace torusflow {

/// Solution of the harmonic problem w = g on the interface, w harmonic off it.
/// w = S[sigma] + c with int sigma ds = 0, so [d_nu w] = -sigma. The + side is the one
/// the outer normal points into (the complement of E).
struct JumpSolution {
    CurveSamples density;
    CurveSamples boundary_data;
    CurveSamples jump;
    std::pair<CurveSamples, CurveSamples> one_sided;  // (d_nu w+, d_nu w-)
    double additive_constant = 0.0;
    double residual = 0.0;         // relative residual of the bordered solve
    std::vector<double> weights;   // arclength quadrature weights of the curve
};

/// Throws ResolutionError when the bordered system is too ill-conditioned (estimate > 1e12).
/// With one_sided = false the adjoint double layer is skipped and one_sided is left empty.
JumpSolution solve_jump(const PeriodicCurve& curve, const CurveSamples& g, bool one_sided = true);
JumpSolution solve_jump(const PeriodicCurve& curve, const CurveSamples& g, const Eigen::MatrixXd& single_layer,
                        bool one_sided = true);

struct MsVelocity {
    CurveSamples velocity;
    JumpSolution solution;
};

/// Mullins-Sekerka normal velocity V = [d_nu w] with w = kappa + 4 gamma v_E on the interface.
MsVelocity ms_normal_velocity(const PeriodicCurve& curve, double gamma, bool one_sided = true);

/// -int g [d_nu w] ds = int |D w|^2 >= 0.
double dissipation_ms(const JumpSolution& solution);

/// CSV with columns loop,idx,s,g,sigma,jump,dnw_plus,dnw_minus.
void write_jump_csv(const PeriodicCurve& curve, const JumpSolution& solution, const std::string& path);

}  // namespace torusflow
