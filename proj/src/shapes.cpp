#include "torusflow/shapes.hpp"

#include <cmath>
#include <numbers>

#include "torusflow/errors.hpp"
#include "torusflow/geometry.hpp"

namespace torusflow::shapes {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

MarkerLoop horizontal_line(double y, const std::function<double(double)>& psi, std::size_t n, int orientation) {
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        double x = double(j) / double(n);
        pts[j] = {x, y + psi(x)};
    }
    return MarkerLoop(std::move(pts), Winding{1, 0}, orientation);
}
}  // namespace

PeriodicCurve circle(Vec2 center, double r, std::size_t n, int orientation) {
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = kTwoPi * double(j) / double(n);
        pts[j] = center + r * Vec2{std::cos(t), std::sin(t)};
    }
    return PeriodicCurve({MarkerLoop(std::move(pts), {}, orientation)});
}

PeriodicCurve ellipse(Vec2 center, double a, double b, std::size_t n) {
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = kTwoPi * double(j) / double(n);
        pts[j] = center + Vec2{a * std::cos(t), b * std::sin(t)};
    }
    return resample_equal_arclength(PeriodicCurve({MarkerLoop(std::move(pts))}), n);
}

PeriodicCurve polar(Vec2 center, const std::function<double(double)>& radius, std::size_t n) {
    const std::size_t m = 2 * n;
    std::vector<Vec2> pts(m);
    for (std::size_t j = 0; j < m; ++j) {
        double t = kTwoPi * double(j) / double(m);
        pts[j] = center + radius(t) * Vec2{std::cos(t), std::sin(t)};
    }
    return resample_equal_arclength(PeriodicCurve({MarkerLoop(std::move(pts))}), n);
}

PeriodicCurve perturbed_circle(Vec2 center, double r, int mode, double eps, std::size_t n) {
    return polar(center, [=](double t) { return r + eps * std::cos(mode * t); }, n);
}

PeriodicCurve strip(double y0, double h, std::size_t n, StripAngle angle) {
    if (!(h > 0.0 && h < 1.0)) throw ConfigError("strip fraction must lie in (0,1)");
    std::vector<Vec2> top(n), bot(n);
    Winding w;
    for (std::size_t j = 0; j < n; ++j) {
        double s = double(j) / double(n);
        switch (angle) {
            case StripAngle::horizontal:
                bot[j] = {s, y0};
                top[j] = {s, y0 + h};
                w = {1, 0};
                break;
            case StripAngle::vertical:
                bot[j] = {y0 + h, s};
                top[j] = {y0, s};
                w = {0, 1};
                break;
            case StripAngle::diagonal:
                bot[j] = {s, y0 + s};
                top[j] = {s, y0 + h + s};
                w = {1, 1};
                break;
        }
    }
    return PeriodicCurve({MarkerLoop(std::move(top), w, -1), MarkerLoop(std::move(bot), w, 1)});
}

PeriodicCurve graph_strip(double y_bot, double y_top, const std::function<double(double)>& psi_bot,
                          const std::function<double(double)>& psi_top, std::size_t n) {
    PeriodicCurve raw({horizontal_line(y_top, psi_top, 2 * n, -1), horizontal_line(y_bot, psi_bot, 2 * n, 1)});
    return resample_equal_arclength(raw, n);
}

PeriodicCurve lamellae(int k, double h, std::size_t n) {
    if (k < 1) throw ConfigError("lamellae: k must be positive");
    if (!(h > 0.0 && h < 1.0)) throw ConfigError("lamellae: fraction must lie in (0,1)");
    std::vector<MarkerLoop> loops;
    auto zero = [](double) { return 0.0; };
    for (int j = 0; j < k; ++j) {
        double c = (double(j) + 0.5) / double(k);
        double half = 0.5 * h / double(k);
        loops.push_back(horizontal_line(c + half, zero, n, -1));
        loops.push_back(horizontal_line(c - half, zero, n, 1));
    }
    return PeriodicCurve(std::move(loops));
}

}  // namespace torusflow::shapes
