#pragma once

#include <cstddef>
#include <vector>

#include "torusflow/curve.hpp"
#include "torusflow/grid_field.hpp"
#include "torusflow/layer.hpp"

/// Grid (FFT) route for the periodic potentials. Smoothed indicator and smoothed line delta
/// carry an O(1/n) bias; the boundary integral route in layer.hpp is the accurate one.
namespace torusflow {

/// u_E = +1 in E, -1 outside, with an erf profile -erf(d / w), w = width_cells / n, for |d| < 6 w.
GridField rasterize_indicator(const PeriodicCurve& curve, std::size_t n, double width_cells = 1.5);

/// -Laplace v = rhs - mean(rhs), v zero mean, solved spectrally.
GridField solve_poisson_zero_mean(const GridField& rhs);

/// sum over k of 4 pi^2 |k|^2 |v_k|^2 = int |D v|^2.
double dirichlet_energy(const GridField& v);

/// Spectral interpolation of a grid field and its gradient at arbitrary points.
std::vector<double> interpolate(const GridField& v, const std::vector<Vec2>& points);
std::vector<Vec2> interpolate_gradient(const GridField& v, const std::vector<Vec2>& points);

struct GridPotential {
    GridField v;
    PotentialTrace trace;
};
GridPotential potential_of_set(const PeriodicCurve& curve, std::size_t n, double width_cells = 1.5);

struct LinePotential {
    GridField v;
    double removed_mean = 0.0;  // mean of phi projected out before spreading
};
/// v_phi = int G(x - y) phi(y) ds(y) with phi spread by a Gaussian of standard deviation
/// width_cells / n. phi is made mean-free (in arclength) first.
LinePotential line_measure_potential(const PeriodicCurve& curve, const CurveSamples& phi, std::size_t n,
                                     double width_cells = 2.0);

}  // namespace torusflow
