#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "torusflow/fourier.hpp"
#include "torusflow/vec2.hpp"

namespace torusflow {

/// Homology class of a loop on the torus; (0,0) for contractible loops.
struct Winding {
    int x = 0;
    int y = 0;
    bool operator==(const Winding&) const = default;
    bool contractible() const { return x == 0 && y == 0; }
    Vec2 vec() const { return {double(x), double(y)}; }
};

/// One closed component. Markers are stored lifted to R^2; the loop closes as
/// point(n) = point(0) + winding. The outer normal is orientation * (y', -x') / |x'|,
/// so orientation +1 with a counterclockwise parametrization puts E on the left.
class MarkerLoop {
public:
    MarkerLoop(std::vector<Vec2> lifted, Winding winding = {}, int orientation = 1);
    /// Construct with explicitly supplied reduced coordinates (used by snapshot loading so that
    /// torus coordinates survive a write/read cycle bit for bit).
    MarkerLoop(std::vector<Vec2> lifted, std::vector<Vec2> reduced, Winding winding, int orientation);

    std::size_t size() const { return pts_.size(); }
    const std::vector<Vec2>& lifted() const { return pts_; }
    Vec2 point(std::size_t i) const { return pts_[i]; }
    /// Marker i reduced to [0,1)^2.
    Vec2 torus_point(std::size_t i) const { return reduced_[i]; }
    Winding winding() const { return winding_; }
    int orientation() const { return orientation_; }
    bool contractible() const { return winding_.contractible(); }

private:
    void check() const;

    std::vector<Vec2> pts_;
    std::vector<Vec2> reduced_;
    Winding winding_;
    int orientation_;
};

enum class Validation { full, skip };

/// Oriented interface on the unit torus, possibly with several components.
class PeriodicCurve {
public:
    PeriodicCurve() = default;
    explicit PeriodicCurve(std::vector<MarkerLoop> loops, Validation v = Validation::full);

    const std::vector<MarkerLoop>& loops() const { return loops_; }
    const MarkerLoop& loop(std::size_t l) const { return loops_[l]; }
    std::size_t num_loops() const { return loops_.size(); }
    std::size_t total_markers() const { return offsets_.empty() ? 0 : offsets_.back(); }
    /// Index of the first marker of loop l in flattened per-marker arrays.
    std::size_t offset(std::size_t l) const { return offsets_[l]; }
    /// Flattened index -> (loop, local index).
    std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;

    /// Segment-pair intersection test on the lifted polygons; throws TopologyError.
    void validate() const;

private:
    std::vector<MarkerLoop> loops_;
    std::vector<std::size_t> offsets_;
};

enum class SampleKind { generic, curvature, velocity, density, boundary_data, height };

/// One scalar per marker, flattened over loops in loop order.
struct CurveSamples {
    std::vector<double> values;
    SampleKind kind = SampleKind::generic;

    CurveSamples() = default;
    explicit CurveSamples(std::vector<double> v, SampleKind k = SampleKind::generic)
        : values(std::move(v)), kind(k) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::span<const double> loop_span(const PeriodicCurve& c, std::size_t l) const {
        return std::span<const double>(values).subspan(c.offset(l), c.loop(l).size());
    }
};

/// Spectral representation of one loop in the parameter t in [0, 2pi):
/// X(t) = p(t) + W t / (2 pi) with p periodic.
struct LoopFourier {
    std::size_t n = 0;
    Vec2 winding;
    std::vector<fourier::cplx> px, py;

    explicit LoopFourier(const MarkerLoop& loop);
    Vec2 position(double t) const;
    Vec2 derivative(double t, int order) const;
};

/// Parametric derivatives at the nodes of a loop.
struct LoopFrame {
    std::vector<Vec2> d1, d2;
    std::vector<double> speed;
};
LoopFrame loop_frame(const MarkerLoop& loop);

}  // namespace torusflow
