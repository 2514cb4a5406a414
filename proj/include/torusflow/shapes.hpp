#pragma once

#include <cstddef>
#include <functional>

#include "torusflow/curve.hpp"

namespace torusflow::shapes {

/// Disk-phase circle (orientation +1) or its complement (orientation -1), equal arclength.
PeriodicCurve circle(Vec2 center, double r, std::size_t n, int orientation = 1);
PeriodicCurve ellipse(Vec2 center, double a, double b, std::size_t n);
/// Star-shaped loop r(theta) about center, resampled to equal arclength.
PeriodicCurve polar(Vec2 center, const std::function<double(double)>& radius, std::size_t n);
/// r(theta) = r + eps cos(mode theta).
PeriodicCurve perturbed_circle(Vec2 center, double r, int mode, double eps, std::size_t n);

enum class StripAngle { horizontal, vertical, diagonal };

/// Phase {y0 <= y <= y0 + h} (rotated for the other angles); two lamellar loops.
PeriodicCurve strip(double y0, double h, std::size_t n_per_interface, StripAngle angle = StripAngle::horizontal);
/// Phase {y_bot + psi_bot(x) <= y <= y_top + psi_top(x)} with 1-periodic psi.
PeriodicCurve graph_strip(double y_bot, double y_top, const std::function<double(double)>& psi_bot,
                          const std::function<double(double)>& psi_top, std::size_t n_per_interface);
/// k equispaced strips of total phase fraction h, strip j centred at (j + 1/2)/k.
PeriodicCurve lamellae(int k, double h, std::size_t n_per_interface);

}  // namespace torusflow::shapes
