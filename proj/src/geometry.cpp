#include "torusflow/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using fourier::cplx;

// One equal-arclength pass; returns the new markers of the loop.
std::vector<Vec2> equidistribute_once(const MarkerLoop& loop, std::size_t m) {
    LoopFourier f(loop);
    const std::size_t n = f.n;
    const std::size_t big = std::max<std::size_t>(8 * std::max(n, m), 128);
    auto dx = fourier::upsample(fourier::derivative_coeffs(f.px, 1), big);
    auto dy = fourier::upsample(fourier::derivative_coeffs(f.py, 1), big);
    std::vector<double> speed(big);
    for (std::size_t j = 0; j < big; ++j)
        speed[j] = norm(Vec2{dx[j], dy[j]} + (1.0 / kTwoPi) * f.winding);
    auto sc = fourier::forward(std::span<const double>(speed));
    // antiderivative of the oscillatory part of the speed
    std::vector<cplx> anti(big, 0.0);
    for (std::size_t j = 1; j < big; ++j) {
        if (j == big / 2) continue;
        anti[j] = sc[j] / cplx(0.0, double(fourier::wavenumber(j, big)));
    }
    const double mean_speed = sc[0].real();
    const double length = kTwoPi * mean_speed;
    const double anti0 = fourier::evaluate(anti, 0.0);
    auto arc = [&](double t) { return mean_speed * t + fourier::evaluate(anti, t) - anti0; };

    std::vector<Vec2> out(m);
    out[0] = loop.point(0);
    double t = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        const double target = length * double(j) / double(m);
        t = kTwoPi * double(j) / double(m);
        for (int it = 0; it < 60; ++it) {
            double g = arc(t) - target;
            double dg = fourier::evaluate(sc, t);
            double step = g / dg;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        out[j] = f.position(t);
    }
    return out;
}

double spacing_variation(const MarkerLoop& loop) {
    auto fr = loop_frame(loop);
    double mean = 0.0;
    for (double s : fr.speed) mean += s;
    mean /= double(fr.speed.size());
    double dev = 0.0;
    for (double s : fr.speed) dev = std::max(dev, std::abs(s - mean));
    return dev / mean;
}

// Repeat passes until the parametric speed is uniform or stops improving (resolution limit).
MarkerLoop equidistribute(const MarkerLoop& loop, std::size_t m) {
    MarkerLoop cur(equidistribute_once(loop, m), loop.winding(), loop.orientation());
    double var = spacing_variation(cur);
    for (int pass = 1; pass < 4 && var > 1e-13; ++pass) {
        MarkerLoop next(equidistribute_once(cur, m), loop.winding(), loop.orientation());
        double v = spacing_variation(next);
        if (v >= 0.5 * var) {
            if (v < var) cur = std::move(next);
            break;
        }
        cur = std::move(next);
        var = v;
    }
    return cur;
}

template <class F>
CurveSamples per_loop(const PeriodicCurve& curve, SampleKind kind, F&& fn) {
    CurveSamples out(std::vector<double>(curve.total_markers()), kind);
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& lp = curve.loop(l);
        auto fr = loop_frame(lp);
        fn(l, lp, fr, std::span<double>(out.values).subspan(curve.offset(l), lp.size()));
    }
    return out;
}

Vec2 loop_normal(const LoopFrame& fr, std::size_t j, int orientation) {
    return (double(orientation) / fr.speed[j]) * rot_cw(fr.d1[j]);
}

}  // namespace

PeriodicCurve resample_equal_arclength(const PeriodicCurve& curve, std::size_t n_per_loop) {
    if (n_per_loop < 16) throw ResolutionError("resample: at least 16 markers per loop are required");
    std::vector<MarkerLoop> loops;
    loops.reserve(curve.num_loops());
    for (const auto& lp : curve.loops()) {
        loops.push_back(equidistribute(lp, n_per_loop));
    }
    return PeriodicCurve(std::move(loops), Validation::full);
}

PeriodicCurve resample_equal_arclength(const PeriodicCurve& curve) {
    std::vector<MarkerLoop> loops;
    for (const auto& lp : curve.loops()) {
        loops.push_back(equidistribute(lp, lp.size()));
    }
    return PeriodicCurve(std::move(loops), Validation::full);
}

CurveSamples curvature(const PeriodicCurve& curve) {
    return per_loop(curve, SampleKind::curvature, [](std::size_t, const MarkerLoop& lp, const LoopFrame& fr, std::span<double> out) {
        for (std::size_t j = 0; j < lp.size(); ++j) {
            double s = fr.speed[j];
            out[j] = double(lp.orientation()) * cross(fr.d1[j], fr.d2[j]) / (s * s * s);
        }
    });
}

CurveSamples arclength_derivative(const PeriodicCurve& curve, const CurveSamples& f) {
    if (f.size() != curve.total_markers()) throw ConfigError("sample count does not match curve");
    return per_loop(curve, f.kind, [&](std::size_t l, const MarkerLoop& lp, const LoopFrame& fr, std::span<double> out) {
        auto d = fourier::derivative(f.loop_span(curve, l), 1);
        for (std::size_t j = 0; j < lp.size(); ++j) out[j] = d[j] / fr.speed[j];
    });
}

CurveSamples surface_laplacian(const PeriodicCurve& curve, const CurveSamples& f) {
    if (f.size() != curve.total_markers()) throw ConfigError("sample count does not match curve");
    return per_loop(curve, f.kind, [&](std::size_t l, const MarkerLoop& lp, const LoopFrame& fr, std::span<double> out) {
        auto d = fourier::derivative(f.loop_span(curve, l), 1);
        for (std::size_t j = 0; j < lp.size(); ++j) d[j] /= fr.speed[j];
        auto dd = fourier::derivative(std::span<const double>(d), 1);
        for (std::size_t j = 0; j < lp.size(); ++j) out[j] = dd[j] / fr.speed[j];
    });
}

std::vector<double> loop_lengths(const PeriodicCurve& curve) {
    std::vector<double> out;
    for (const auto& lp : curve.loops()) {
        auto fr = loop_frame(lp);
        double sum = 0.0;
        for (double s : fr.speed) sum += s;
        out.push_back(sum * kTwoPi / double(lp.size()));
    }
    return out;
}

double perimeter(const PeriodicCurve& curve) {
    double p = 0.0;
    for (double l : loop_lengths(curve)) p += l;
    return p;
}

double enclosed_area(const PeriodicCurve& curve) {
    // Integrate (x.n)(n.nu) over the boundary with n orthogonal to the lamellar winding, so the
    // integrand is single valued on every lifted loop; the result is the area modulo 1.
    Vec2 n{1.0, 0.0};
    bool lamellar = false;
    for (const auto& lp : curve.loops())
        if (!lp.contractible()) {
            Vec2 w = lp.winding().vec();
            n = Vec2{-w.y, w.x} / norm(w);
            lamellar = true;
            break;
        }
    double raw = 0.0;
    int up = 0, down = 0;
    for (const auto& lp : curve.loops()) {
        if (lamellar && !lp.contractible() && std::abs(cross(lp.winding().vec(), n)) < 1e-12)
            throw TopologyError("lamellar loops with non-parallel windings");
        LoopFourier f(lp);
        std::vector<cplx> a(f.n), b(f.n);
        auto dx = fourier::derivative_coeffs(f.px, 1);
        auto dy = fourier::derivative_coeffs(f.py, 1);
        for (std::size_t k = 0; k < f.n; ++k) {
            a[k] = n.x * f.px[k] + n.y * f.py[k];
            b[k] = n.x * dy[k] - n.y * dx[k];
        }
        Vec2 w = (1.0 / kTwoPi) * f.winding;
        double bconst = n.x * w.y - n.y * w.x;
        b[0] += bconst;
        double contrib = double(lp.orientation()) * kTwoPi * fourier::mean_product(a, b);
        raw += contrib;
        if (!lp.contractible()) (double(lp.orientation()) * bconst > 0 ? up : down) += 1;
    }
    double area;
    if (lamellar) {
        if (up != down) throw OrientationError("lamellar loop normals do not alternate");
        area = raw - std::floor(raw);
    } else {
        area = raw > 0.0 ? raw : raw + 1.0;
    }
    if (!(area > 0.0 && area < 1.0))
        throw OrientationError("enclosed area " + std::to_string(area) + " outside (0,1)");
    return area;
}

std::vector<Vec2> normals(const PeriodicCurve& curve) {
    std::vector<Vec2> out;
    out.reserve(curve.total_markers());
    for (const auto& lp : curve.loops()) {
        auto fr = loop_frame(lp);
        for (std::size_t j = 0; j < lp.size(); ++j) out.push_back(loop_normal(fr, j, lp.orientation()));
    }
    return out;
}

std::vector<Vec2> tangents(const PeriodicCurve& curve) {
    std::vector<Vec2> out;
    out.reserve(curve.total_markers());
    for (const auto& lp : curve.loops()) {
        auto fr = loop_frame(lp);
        for (std::size_t j = 0; j < lp.size(); ++j) out.push_back(fr.d1[j] / fr.speed[j]);
    }
    return out;
}

std::vector<double> arclength_weights(const PeriodicCurve& curve) {
    std::vector<double> out;
    out.reserve(curve.total_markers());
    for (const auto& lp : curve.loops()) {
        auto fr = loop_frame(lp);
        for (double s : fr.speed) out.push_back(s * kTwoPi / double(lp.size()));
    }
    return out;
}

double integrate(const PeriodicCurve& curve, const CurveSamples& f) {
    auto w = arclength_weights(curve);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * f[i];
    return sum;
}

std::vector<double> signed_distance(const PeriodicCurve& curve, const std::vector<Vec2>& points) {
    struct Seg {
        Vec2 a, b, nrm, na, nb;
    };
    std::vector<Seg> segs;
    for (const auto& lp : curve.loops()) {
        const std::size_t n = lp.size();
        const double o = double(lp.orientation());
        std::vector<Vec2> segn(n);
        auto pt = [&](std::size_t i) { return i < n ? lp.point(i) : lp.point(i - n) + lp.winding().vec(); };
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 d = pt(i + 1) - pt(i);
            segn[i] = (o / norm(d)) * rot_cw(d);
        }
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 na = segn[i] + segn[(i + n - 1) % n];
            Vec2 nb = segn[i] + segn[(i + 1) % n];
            segs.push_back({pt(i), pt(i + 1), segn[i], na, nb});
        }
    }
    // Uniform buckets over the unit cell; each segment goes into every bucket its reduced
    // bounding box touches. Queries scan rings of buckets until the ring is farther than the best hit.
    const int nb = std::clamp(int(std::sqrt(double(segs.size())) / 2.0), 1, 64);
    const double cell = 1.0 / double(nb);
    std::vector<std::vector<std::uint32_t>> bucket(std::size_t(nb * nb));
    auto wrap_index = [nb](int i) { return ((i % nb) + nb) % nb; };
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Vec2 a = segs[k].a, b = segs[k].b;
        const Vec2 shift{std::floor(a.x), std::floor(a.y)};
        const Vec2 ar = a - shift, br = b - shift;
        const int x0 = int(std::floor(std::min(ar.x, br.x) * nb)), x1 = int(std::floor(std::max(ar.x, br.x) * nb));
        const int y0 = int(std::floor(std::min(ar.y, br.y) * nb)), y1 = int(std::floor(std::max(ar.y, br.y) * nb));
        for (int j = y0; j <= std::min(y1, y0 + nb - 1); ++j)
            for (int i = x0; i <= std::min(x1, x0 + nb - 1); ++i)
                bucket[std::size_t(wrap_index(j) * nb + wrap_index(i))].push_back(std::uint32_t(k));
    }

    std::vector<double> out(points.size());
    std::vector<std::size_t> seen(segs.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t q = 0; q < points.size(); ++q) {
        const Vec2 p = points[q];
        double best = std::numeric_limits<double>::infinity();
        double sign = 1.0;
        auto visit = [&](std::uint32_t k) {
            if (seen[k] == q) return;
            seen[k] = q;
            const auto& s = segs[k];
            // place the segment at the image closest to p
            Vec2 shift = min_image(s.a - p) - (s.a - p);
            Vec2 a = s.a + shift, b = s.b + shift;
            Vec2 ab = b - a;
            double u = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
            Vec2 c = a + u * ab;
            double d = norm(p - c);
            if (d < best) {
                best = d;
                Vec2 nn = u <= 0.0 ? s.na : (u >= 1.0 ? s.nb : s.nrm);
                sign = dot(p - c, nn) >= 0.0 ? 1.0 : -1.0;
            }
        };
        const int pi_ = int(std::floor((p.x - std::floor(p.x)) * nb)), pj = int(std::floor((p.y - std::floor(p.y)) * nb));
        for (int r = 0;; ++r) {
            if (2 * r + 1 >= nb) {
                for (std::uint32_t k = 0; k < segs.size(); ++k) visit(k);
                break;
            }
            auto scan = [&](int di, int dj) {
                for (auto k : bucket[std::size_t(wrap_index(pj + dj) * nb + wrap_index(pi_ + di))]) visit(k);
            };
            if (r == 0) scan(0, 0);
            for (int d = -r; d <= r && r > 0; ++d) {
                scan(d, -r);
                scan(d, r);
                if (d != -r && d != r) {
                    scan(-r, d);
                    scan(r, d);
                }
            }
            // everything outside rings 0..r is at least r cells away
            if (best <= double(r) * cell) break;
        }
        out[q] = sign * best;
    }
    return out;
}

GridField signed_distance_grid(const PeriodicCurve& curve, std::size_t grid_n) {
    if (grid_n < 64) throw ResolutionError("signed_distance_grid requires n >= 64");
    std::vector<Vec2> pts;
    pts.reserve(grid_n * grid_n);
    GridField g(grid_n);
    for (std::size_t j = 0; j < grid_n; ++j)
        for (std::size_t i = 0; i < grid_n; ++i) pts.push_back(g.node(i, j));
    g.values = signed_distance(curve, pts);
    return g;
}

double tubular_radius(const PeriodicCurve& reference) {
    auto kappa = curvature(reference);
    double kmax = 0.0;
    for (double k : kappa.values) kmax = std::max(kmax, std::abs(k));
    double r = kmax > 0.0 ? 0.45 / kmax : 0.25;
    r = std::min(r, 0.25);
    if (reference.num_loops() > 1) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < reference.num_loops(); ++a)
            for (std::size_t b = a + 1; b < reference.num_loops(); ++b)
                for (auto p : reference.loop(a).lifted())
                    for (auto q : reference.loop(b).lifted()) dmin = std::min(dmin, norm(min_image(p - q)));
        r = std::min(r, 0.5 * dmin);
    }
    return r;
}

CurveSamples height_function(const PeriodicCurve& curve, const PeriodicCurve& reference) {
    const double radius = tubular_radius(reference);
    auto ref_normals = normals(reference);
    std::vector<LoopFourier> fl;
    for (const auto& lp : curve.loops()) fl.emplace_back(lp);

    CurveSamples psi(std::vector<double>(reference.total_markers()), SampleKind::height);
    std::size_t flat = 0;
    for (const auto& rl : reference.loops()) {
        for (std::size_t i = 0; i < rl.size(); ++i, ++flat) {
            const Vec2 x = rl.point(i);
            const Vec2 nu = ref_normals[flat];
            const Vec2 tau{-nu.y, nu.x};
            struct Hit {
                std::size_t loop;
                double t;
                Vec2 shift;
                double s;
            };
            std::vector<Hit> hits;
            for (std::size_t l = 0; l < curve.num_loops(); ++l) {
                const auto& lp = curve.loop(l);
                const std::size_t n = lp.size();
                for (std::size_t k = 0; k < n; ++k) {
                    Vec2 a = lp.point(k);
                    Vec2 shift = min_image(a - x) - (a - x);
                    // the closing segment ends at point(0); fold the winding into the integer shift so
                    // that marker 0 is evaluated identically by both of its segments
                    Vec2 ar = a + shift - x;
                    Vec2 br = k + 1 < n ? lp.point(k + 1) + shift - x : lp.point(0) + (shift + lp.winding().vec()) - x;
                    double ga = dot(ar, tau), gb = dot(br, tau);
                    if ((ga > 0.0) == (gb > 0.0)) continue;  // half-open: zero counts as nonpositive
                    double u = ga / (ga - gb);
                    double s = dot(ar + u * (br - ar), nu);
                    if (std::abs(s) > radius) continue;
                    hits.push_back({l, kTwoPi * (double(k) + u) / double(n), shift, s});
                }
            }
            if (hits.size() != 1) {
                std::ostringstream msg;
                msg << "height function: reference marker " << flat << " has " << hits.size()
                    << " crossings within tubular radius " << radius;
                throw GraphError(msg.str());
            }
            const Hit& h = hits.front();
            const auto& f = fl[h.loop];
            double t = h.t;
            for (int it = 0; it < 50; ++it) {
                Vec2 r = f.position(t) + h.shift - x;
                double g = dot(r, tau);
                double dg = dot(f.derivative(t, 1), tau);
                double step = g / dg;
                t -= step;
                if (std::abs(step) < 1e-15) break;
            }
            psi[flat] = dot(f.position(t) + h.shift - x, nu);
        }
    }
    return psi;
}

PeriodicCurve displace_normal(const PeriodicCurve& curve, const std::vector<double>& delta, Validation v) {
    if (delta.size() != curve.total_markers()) throw ConfigError("displacement count does not match curve");
    auto nu = normals(curve);
    std::vector<MarkerLoop> loops;
    std::size_t flat = 0;
    for (const auto& lp : curve.loops()) {
        std::vector<Vec2> pts(lp.size());
        for (std::size_t j = 0; j < lp.size(); ++j, ++flat) pts[j] = lp.point(j) + delta[flat] * nu[flat];
        loops.emplace_back(std::move(pts), lp.winding(), lp.orientation());
    }
    return PeriodicCurve(std::move(loops), v);
}

PeriodicCurve translate(const PeriodicCurve& curve, Vec2 shift) {
    std::vector<MarkerLoop> loops;
    for (const auto& lp : curve.loops()) {
        std::vector<Vec2> pts = lp.lifted();
        for (auto& p : pts) p += shift;
        loops.emplace_back(std::move(pts), lp.winding(), lp.orientation());
    }
    return PeriodicCurve(std::move(loops), Validation::skip);
}

std::string snapshot_string(const PeriodicCurve& curve) {
    std::ostringstream out;
    out << "loop,idx,x,y,wind_x,wind_y,orient\n" << std::setprecision(17);
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& lp = curve.loop(l);
        for (std::size_t j = 0; j < lp.size(); ++j) {
            Vec2 p = lp.torus_point(j);
            out << l << ',' << j << ',' << p.x << ',' << p.y << ',' << lp.winding().x << ','
                << lp.winding().y << ',' << lp.orientation() << '\n';
        }
    }
    return out.str();
}

PeriodicCurve parse_snapshot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("loop,idx,x,y", 0) != 0)
        throw ConfigError("snapshot: missing header");
    struct Row {
        std::vector<Vec2> pts;
        Winding w;
        int orient = 1;
    };
    std::map<std::size_t, Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ls, field, ',')) f.push_back(field);
        if (f.size() != 7) throw ConfigError("snapshot line " + std::to_string(lineno) + ": expected 7 fields");
        try {
            std::size_t l = std::stoul(f[0]);
            std::size_t idx = std::stoul(f[1]);
            auto& r = rows[l];
            if (idx != r.pts.size())
                throw ConfigError("snapshot line " + std::to_string(lineno) + ": marker index out of order");
            r.pts.push_back({std::stod(f[2]), std::stod(f[3])});
            r.w = {std::stoi(f[4]), std::stoi(f[5])};
            r.orient = std::stoi(f[6]);
        } catch (const std::logic_error&) {
            throw ConfigError("snapshot line " + std::to_string(lineno) + ": malformed number");
        }
    }
    std::vector<MarkerLoop> loops;
    for (auto& [l, r] : rows) {
        std::vector<Vec2> lifted(r.pts.size());
        lifted[0] = r.pts[0];
        for (std::size_t j = 1; j < r.pts.size(); ++j) {
            Vec2 d = lifted[j - 1] - r.pts[j];
            lifted[j] = r.pts[j] + Vec2{std::round(d.x), std::round(d.y)};
        }
        loops.emplace_back(std::move(lifted), std::move(r.pts), r.w, r.orient);
    }
    return PeriodicCurve(std::move(loops), Validation::full);
}

void write_snapshot(const PeriodicCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << snapshot_string(curve);
}

PeriodicCurve read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_snapshot(buf.str());
}

}  // namespace torusflow
