#pragma once

#include <string>
#include <utility>
#include <vector>

#include "torusflow/curve.hpp"
#include "torusflow/energy.hpp"
#include "torusflow/trace.hpp"

namespace torusflow {

/// -dJ/dt by centered differences against the recorded dissipation at the middle record.
struct FirstIdentityReport {
    std::vector<double> residuals;  // one per interior record, relative
    double median = 0.0;
    double max = 0.0;
    std::string json() const;
};
/// Needs at least 3 records. Residuals compare energy changes, with the floor 1e-14 * max|J|.
FirstIdentityReport verify_first_identity(const EnergyTrace& trace);
/// Same, and writes the residuals into identity1_residual (NaN at the two ends).
FirstIdentityReport verify_first_identity(EnergyTrace& trace, bool annotate);

struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double relative_residual = 0.0;
    double dt = 0.0;                // virtual step used for the left side
    double criticality_linf = 0.0;  // of the evaluation curve
    std::vector<std::pair<std::string, double>> terms;  // right-hand side breakdown and logged bounds

    double term(const std::string& name) const;
    std::string json() const;
};

/// d/dt (D/2) = -Q[V] + 1/2 int (d_nu w+ + d_nu w-) V^2 with V the jump, D the MS dissipation.
/// dt <= 0 picks adaptive_dt / 10 at the semi-implicit default stiffness.
IdentityReport verify_second_identity_ms(const PeriodicCurve& curve, double gamma, double dt = 0.0);
/// d/dt (1/2 int H_s^2) = -Q[V] - int kappa H_s^2 V + 1/2 int H H_s^2 V with V = Laplace_s H, gamma = 0.
IdentityReport verify_second_identity_sd(const PeriodicCurve& curve, double dt = 0.0);

struct AsymmetryDistance {
    double D = 0.0;              // integral of dist(x, reference) over the symmetric difference
    double sym_diff_area = 0.0;
};
AsymmetryDistance asymmetry_distance(const PeriodicCurve& curve, const PeriodicCurve& reference,
                                     std::size_t grid_n = 512);

/// Least-squares line through log(column) on records with t in [t_begin, t_end]; c0 = -slope.
/// Columns: J, perimeter, nonlocal, area, dissipation, volume_correction, psi_c1.
ExponentialFit fit_exponential(const EnergyTrace& trace, const std::string& column, double t_begin, double t_end);
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& values);

/// Sum over loops and Fourier modes of (1 + w_k^2)^s |psi_k|^2 with w_k = 2 pi k / L.
/// psi_k are the normalized DFT coefficients of the samples on each reference loop.
double discrete_sobolev_norm(const CurveSamples& psi, const PeriodicCurve& reference, double s);

}  // namespace torusflow
