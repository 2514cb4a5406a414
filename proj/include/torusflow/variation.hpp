#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "torusflow/curve.hpp"

namespace torusflow {

struct CriticalityResidual {
    CurveSamples residual;  // H + 4 gamma v_E - lambda
    double lambda = 0.0;    // arclength mean of H + 4 gamma v_E
    double linf = 0.0;
    double l2 = 0.0;
};
CriticalityResidual criticality_residual(const PeriodicCurve& curve, double gamma);

struct TranslationBasis {
    std::vector<CurveSamples> functions;  // L2-orthonormal normal traces eta . nu
    std::vector<Vec2> directions;         // eta for each function (unit vectors)
    std::vector<int> index_set;           // I_F: indices of the retained principal directions
    double gram_condition = 1.0;          // of the 2x2 Gram matrix of e_i . nu
};
TranslationBasis translation_basis(const PeriodicCurve& curve);

/// Test functions: on every loop, 1, cos(m t), sin(m t) for m = 1..n_modes in the marker parameter.
/// All parts include their coefficients, so full() = local - int kappa^2 + 8 gamma G + 4 gamma d_nu v.
struct SecondVariationMatrix {
    std::size_t n_modes = 0;
    double gamma = 0.0;
    Eigen::MatrixXd values;      // basis functions at the markers (markers x basis)
    Eigen::VectorXd weights;     // arclength quadrature weights
    Eigen::MatrixXd gram;        // L2 Gram matrix of the basis
    Eigen::VectorXd mean_row;    // int phi_j ds, the zero-mean constraint
    Eigen::MatrixXd local_part;
    Eigen::MatrixXd curvature_part;
    Eigen::MatrixXd nonlocal_kernel_part;
    Eigen::MatrixXd potential_part;
    double criticality_linf = 0.0;
    std::vector<std::string> warnings;

    Eigen::MatrixXd full() const { return local_part + curvature_part + nonlocal_kernel_part + potential_part; }
};

/// Default n_modes = 0 picks min(16, smallest loop size / 4).
SecondVariationMatrix assemble_second_variation(const PeriodicCurve& curve, double gamma, std::size_t n_modes = 0,
                                                double criticality_tol = 1e-6);

struct QuadraticFormTerms {
    double local = 0.0;      // int |phi_s|^2
    double curvature = 0.0;  // -int kappa^2 phi^2
    double nonlocal = 0.0;   // 8 gamma int int G phi phi
    double potential = 0.0;  // 4 gamma int d_nu v_E phi^2
    double total() const { return local + curvature + nonlocal + potential; }
};
/// Direct evaluation of the second-variation form at one function sampled on the markers.
QuadraticFormTerms second_variation_form(const PeriodicCurve& curve, double gamma, const CurveSamples& phi);

enum class Stability { strictly_stable, marginal, unstable };
std::string to_string(Stability s);

struct SpectrumReport {
    Eigen::VectorXd eigenvalues;   // ascending, on the zero-mean subspace
    Eigen::MatrixXd eigenvectors;  // basis coefficients, L2-normalized
    std::vector<double> translation_overlap;
    std::vector<int> translation_modes;  // eigenvector indices identified as translations
    std::vector<int> index_set;          // I_F
    double gap_on_T_perp = 0.0;
    double stab_tol = 0.0;
    double gram_condition = 1.0;
    Stability classification = Stability::marginal;
    bool classification_withheld = false;  // non-critical input
    std::vector<std::string> warnings;
    double gamma = 0.0;
    std::size_t n_modes = 0;

    std::string json() const;
};

/// stab_tol = rel_tol * max |eigenvalue|.
SpectrumReport spectrum(const SecondVariationMatrix& m, const PeriodicCurve& curve, double rel_tol = 1e-6);

/// L2 distance of phi from the translation span, divided by ||phi||.
double min_translation_distance(const CurveSamples& phi, const PeriodicCurve& curve);

struct PoincareRatio {
    double ratio = 0.0;
    bool infinite = false;  // H piecewise constant but not constant: D_tau H = 0 with H != mean
};
PoincareRatio geometric_poincare_ratio(const PeriodicCurve& curve);

struct ThresholdRow {
    int k = 0;
    double gap = 0.0;
    Stability classification = Stability::marginal;
    double criticality_linf = 0.0;
};
struct ThresholdResult {
    std::optional<int> k;  // smallest strictly stable strip count
    std::vector<ThresholdRow> rows;
};
/// k equispaced strips of total phase fraction h, k = 1..k_max (k_max <= 16).
ThresholdResult lamella_threshold(double gamma, int k_max = 16, double h = 0.5, std::size_t markers_per_interface = 64,
                                  std::size_t n_modes = 8);

}  // namespace torusflow
