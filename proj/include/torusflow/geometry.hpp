#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "torusflow/curve.hpp"
#include "torusflow/grid_field.hpp"

namespace torusflow {

/// Redistribute markers to equal arclength with n_per_loop markers on every loop.
/// Marker 0 of each loop stays fixed. Throws TopologyError on self-intersection.
PeriodicCurve resample_equal_arclength(const PeriodicCurve& curve, std::size_t n_per_loop);
/// Same, keeping each loop's current marker count.
PeriodicCurve resample_equal_arclength(const PeriodicCurve& curve);

/// Signed curvature, positive for a disk-phase circle.
CurveSamples curvature(const PeriodicCurve& curve);
CurveSamples arclength_derivative(const PeriodicCurve& curve, const CurveSamples& f);
CurveSamples surface_laplacian(const PeriodicCurve& curve, const CurveSamples& f);

double perimeter(const PeriodicCurve& curve);
std::vector<double> loop_lengths(const PeriodicCurve& curve);
/// Area of the phase E in (0,1); throws OrientationError for inconsistent orientations.
double enclosed_area(const PeriodicCurve& curve);

/// Outer unit normals and unit tangents (d x / ds along the parametrization).
std::vector<Vec2> normals(const PeriodicCurve& curve);
std::vector<Vec2> tangents(const PeriodicCurve& curve);
/// Trapezoid arclength weights |x'(t_j)| 2pi/n, spectrally accurate for periodic integrands.
std::vector<double> arclength_weights(const PeriodicCurve& curve);
double integrate(const PeriodicCurve& curve, const CurveSamples& f);

/// Signed torus distance to the marker polygon, negative inside E.
GridField signed_distance_grid(const PeriodicCurve& curve, std::size_t grid_n);
/// Signed distance at arbitrary points (same convention).
std::vector<double> signed_distance(const PeriodicCurve& curve, const std::vector<Vec2>& points);

/// psi with curve = {x + psi(x) nu_ref(x)}, sampled at the reference markers.
/// Throws GraphError when a reference normal meets the curve zero or several times
/// inside the tubular radius.
CurveSamples height_function(const PeriodicCurve& curve, const PeriodicCurve& reference);
double tubular_radius(const PeriodicCurve& reference);

/// Move every marker by delta_j along its outer normal.
PeriodicCurve displace_normal(const PeriodicCurve& curve, const std::vector<double>& delta,
                              Validation v = Validation::full);
PeriodicCurve translate(const PeriodicCurve& curve, Vec2 shift);

/// Snapshot CSV: loop,idx,x,y,wind_x,wind_y,orient with reduced coordinates.
void write_snapshot(const PeriodicCurve& curve, const std::string& path);
PeriodicCurve read_snapshot(const std::string& path);
std::string snapshot_string(const PeriodicCurve& curve);
PeriodicCurve parse_snapshot(const std::string& text);

}  // namespace torusflow
