#include "torusflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool segments_intersect(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2) {
    double d1 = orient(b1, b2, a1), d2 = orient(b1, b2, a2);
    double d3 = orient(a1, a2, b1), d4 = orient(a1, a2, b2);
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) return false;  // collinear, not crossing
    return d1 * d2 <= 0 && d3 * d4 <= 0;
}

struct Segment {
    Vec2 a, b;
    std::size_t loop, index;
};

}  // namespace

MarkerLoop::MarkerLoop(std::vector<Vec2> lifted, Winding winding, int orientation)
    : pts_(std::move(lifted)), winding_(winding), orientation_(orientation) {
    reduced_.reserve(pts_.size());
    for (auto p : pts_) reduced_.push_back(reduce(p));
    check();
}

MarkerLoop::MarkerLoop(std::vector<Vec2> lifted, std::vector<Vec2> reduced, Winding winding, int orientation)
    : pts_(std::move(lifted)), reduced_(std::move(reduced)), winding_(winding), orientation_(orientation) {
    if (reduced_.size() != pts_.size()) throw ConfigError("reduced and lifted marker counts differ");
    check();
}

void MarkerLoop::check() const {
    if (orientation_ != 1 && orientation_ != -1)
        throw ConfigError("loop orientation must be +1 or -1");
    if (pts_.size() < 16)
        throw ResolutionError("loop has " + std::to_string(pts_.size()) +
                              " markers; at least 16 are required");
    if (!winding_.contractible() && std::gcd(std::abs(winding_.x), std::abs(winding_.y)) != 1)
        throw TopologyError("lamellar loop winding must be primitive");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        Vec2 next = i + 1 < pts_.size() ? pts_[i + 1] : pts_[0] + winding_.vec();
        if (norm(next - pts_[i]) == 0.0)
            throw TopologyError("consecutive markers coincide at index " + std::to_string(i));
    }
}

PeriodicCurve::PeriodicCurve(std::vector<MarkerLoop> loops, Validation v) : loops_(std::move(loops)) {
    if (loops_.empty()) throw TopologyError("curve has no loops");
    offsets_.resize(loops_.size() + 1, 0);
    for (std::size_t l = 0; l < loops_.size(); ++l) offsets_[l + 1] = offsets_[l] + loops_[l].size();
    if (v == Validation::full) validate();
}

std::pair<std::size_t, std::size_t> PeriodicCurve::locate(std::size_t flat) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    std::size_t l = std::size_t(it - offsets_.begin()) - 1;
    return {l, flat - offsets_[l]};
}

void PeriodicCurve::validate() const {
    std::vector<Segment> segs;
    segs.reserve(total_markers());
    for (std::size_t l = 0; l < loops_.size(); ++l) {
        const auto& lp = loops_[l];
        for (std::size_t i = 0; i < lp.size(); ++i) {
            Vec2 b = i + 1 < lp.size() ? lp.point(i + 1) : lp.point(0) + lp.winding().vec();
            segs.push_back({lp.point(i), b, l, i});
        }
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto& A = segs[s];
        Vec2 ma = 0.5 * (A.a + A.b);
        double la = norm(A.b - A.a);
        for (std::size_t q = s + 1; q < segs.size(); ++q) {
            const auto& B = segs[q];
            if (A.loop == B.loop) {
                std::size_t n = loops_[A.loop].size();
                if (B.index == A.index + 1 || (A.index == 0 && B.index == n - 1)) continue;
            }
            Vec2 mb = 0.5 * (B.a + B.b);
            Vec2 d = min_image(mb - ma);
            double lb = norm(B.b - B.a);
            if (norm(d) > 0.5 * (la + lb)) continue;
            Vec2 shift = (ma + d) - mb;
            if (segments_intersect(A.a, A.b, B.a + shift, B.b + shift)) {
                std::ostringstream msg;
                msg << "self-intersection between loop " << A.loop << " segment " << A.index
                    << " and loop " << B.loop << " segment " << B.index;
                throw TopologyError(msg.str());
            }
        }
    }
}

LoopFourier::LoopFourier(const MarkerLoop& loop) : n(loop.size()), winding(loop.winding().vec()) {
    std::vector<double> x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        double frac = double(j) / double(n);
        Vec2 p = loop.point(j) - frac * winding;
        x[j] = p.x;
        y[j] = p.y;
    }
    px = fourier::forward(std::span<const double>(x));
    py = fourier::forward(std::span<const double>(y));
}

Vec2 LoopFourier::position(double t) const {
    return Vec2{fourier::evaluate(px, t), fourier::evaluate(py, t)} + (t / kTwoPi) * winding;
}

Vec2 LoopFourier::derivative(double t, int order) const {
    auto dx = fourier::derivative_coeffs(px, order);
    auto dy = fourier::derivative_coeffs(py, order);
    Vec2 d{fourier::evaluate(dx, t), fourier::evaluate(dy, t)};
    if (order == 1) d += (1.0 / kTwoPi) * winding;
    return d;
}

LoopFrame loop_frame(const MarkerLoop& loop) {
    LoopFourier f(loop);
    auto x1 = fourier::inverse_real(fourier::derivative_coeffs(f.px, 1));
    auto y1 = fourier::inverse_real(fourier::derivative_coeffs(f.py, 1));
    auto x2 = fourier::inverse_real(fourier::derivative_coeffs(f.px, 2));
    auto y2 = fourier::inverse_real(fourier::derivative_coeffs(f.py, 2));
    LoopFrame fr;
    fr.d1.resize(f.n);
    fr.d2.resize(f.n);
    fr.speed.resize(f.n);
    Vec2 w = (1.0 / kTwoPi) * f.winding;
    for (std::size_t j = 0; j < f.n; ++j) {
        fr.d1[j] = Vec2{x1[j], y1[j]} + w;
        fr.d2[j] = Vec2{x2[j], y2[j]};
        fr.speed[j] = norm(fr.d1[j]);
    }
    return fr;
}

}  // namespace torusflow
