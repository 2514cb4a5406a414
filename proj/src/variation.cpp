#include "torusflow/variation.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/layer.hpp"
#include "torusflow/shapes.hpp"

namespace torusflow {

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) { return Eigen::VectorXd::Map(v.data(), long(v.size())); }
Eigen::VectorXd to_vec(const CurveSamples& v) { return to_vec(v.values); }

// Basis values and arclength derivatives at the markers.
struct Basis {
    Eigen::MatrixXd phi, dphi;
};

Basis build_basis(const PeriodicCurve& curve, std::size_t n_modes) {
    const std::size_t per = 2 * n_modes + 1;
    const long n_total = long(curve.total_markers());
    Basis b{Eigen::MatrixXd::Zero(n_total, long(per * curve.num_loops())),
            Eigen::MatrixXd::Zero(n_total, long(per * curve.num_loops()))};
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        const auto& lp = curve.loop(l);
        const auto fr = loop_frame(lp);
        const std::size_t n = lp.size(), off = curve.offset(l);
        const long col0 = long(l * per);
        for (std::size_t j = 0; j < n; ++j) {
            const long row = long(off + j);
            const double t = 2.0 * std::numbers::pi * double(j) / double(n);
            const double inv_speed = 1.0 / fr.speed[j];
            b.phi(row, col0) = 1.0;
            for (std::size_t m = 1; m <= n_modes; ++m) {
                const double c = std::cos(double(m) * t), s = std::sin(double(m) * t);
                b.phi(row, col0 + long(2 * m - 1)) = c;
                b.phi(row, col0 + long(2 * m)) = s;
                b.dphi(row, col0 + long(2 * m - 1)) = -double(m) * s * inv_speed;
                b.dphi(row, col0 + long(2 * m)) = double(m) * c * inv_speed;
            }
        }
    }
    return b;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd g = a.transpose() * w.asDiagonal() * b;
    return 0.5 * (g + g.transpose());
}

double weighted_dot(const Eigen::VectorXd& w, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (w.array() * a.array() * b.array()).sum();
}

}  // namespace

std::string to_string(Stability s) {
    switch (s) {
        case Stability::strictly_stable: return "strictly_stable";
        case Stability::marginal: return "marginal";
        case Stability::unstable: return "unstable";
    }
    return "";
}

CriticalityResidual criticality_residual(const PeriodicCurve& curve, double gamma) {
    CriticalityResidual out;
    auto h = curvature(curve);
    if (gamma != 0.0) {
        const auto v = potential_trace(curve).boundary_values;
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += 4.0 * gamma * v[i];
    }
    const auto w = arclength_weights(curve);
    double total = 0.0, len = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        total += w[i] * h[i];
        len += w[i];
    }
    out.lambda = total / len;
    double l2 = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] -= out.lambda;
        out.linf = std::max(out.linf, std::abs(h[i]));
        l2 += w[i] * h[i] * h[i];
    }
    out.l2 = std::sqrt(l2);
    h.kind = SampleKind::generic;
    out.residual = std::move(h);
    return out;
}

TranslationBasis translation_basis(const PeriodicCurve& curve) {
    const auto nu = normals(curve);
    const Eigen::VectorXd w = to_vec(arclength_weights(curve));
    Eigen::VectorXd nx(w.size()), ny(w.size());
    for (long i = 0; i < w.size(); ++i) {
        nx[i] = nu[std::size_t(i)].x;
        ny[i] = nu[std::size_t(i)].y;
    }
    Eigen::Matrix2d g;
    g << weighted_dot(w, nx, nx), weighted_dot(w, nx, ny), weighted_dot(w, nx, ny), weighted_dot(w, ny, ny);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
    const double per = w.sum();
    TranslationBasis tb;
    const double lo = std::max(es.eigenvalues()[0], 0.0), hi = std::max(es.eigenvalues()[1], 0.0);
    tb.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    // largest first, so that the retained direction of a lamella is index 0
    for (int idx : {1, 0}) {
        // round-off in the normals leaves about eps * per in a degenerate direction
        const double norm_e = std::sqrt(std::max(es.eigenvalues()[idx], 0.0));
        if (es.eigenvalues()[idx] <= 1e-10 * std::max(hi, per)) continue;
        const Eigen::Vector2d e = es.eigenvectors().col(idx);
        Eigen::VectorXd f = (e[0] * nx + e[1] * ny) / norm_e;
        tb.functions.emplace_back(std::vector<double>(f.data(), f.data() + f.size()));
        tb.directions.push_back({e[0], e[1]});
        tb.index_set.push_back(1 - idx);
    }
    return tb;
}

SecondVariationMatrix assemble_second_variation(const PeriodicCurve& curve, double gamma, std::size_t n_modes,
                                                double criticality_tol) {
    if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
    std::size_t min_loop = std::numeric_limits<std::size_t>::max();
    for (const auto& lp : curve.loops()) min_loop = std::min(min_loop, lp.size());
    if (n_modes == 0) n_modes = std::min<std::size_t>(16, min_loop / 4);
    if (4 * n_modes > min_loop) throw ResolutionError("assemble_second_variation: n_modes exceeds a quarter of the loop size");

    SecondVariationMatrix m;
    m.n_modes = n_modes;
    m.gamma = gamma;
    const Basis b = build_basis(curve, n_modes);
    m.values = b.phi;
    m.weights = to_vec(arclength_weights(curve));
    m.gram = weighted_gram(b.phi, m.weights, b.phi);
    m.mean_row = b.phi.transpose() * m.weights;
    m.local_part = weighted_gram(b.dphi, m.weights, b.dphi);
    const auto kappa = curvature(curve);
    Eigen::VectorXd k2 = to_vec(kappa).array().square();
    m.curvature_part = -weighted_gram(b.phi, m.weights.cwiseProduct(k2), b.phi);
    const long nb = b.phi.cols();
    m.nonlocal_kernel_part = Eigen::MatrixXd::Zero(nb, nb);
    m.potential_part = Eigen::MatrixXd::Zero(nb, nb);
    if (gamma > 0.0) {
        const Eigen::MatrixXd s = assemble_single_layer(curve);
        m.nonlocal_kernel_part = 8.0 * gamma * weighted_gram(b.phi, m.weights, s * b.phi);
        const auto tr = potential_trace(curve, s);
        const Eigen::VectorXd dnv = to_vec(tr.normal_derivative);
        m.potential_part = 4.0 * gamma * weighted_gram(b.phi, m.weights.cwiseProduct(dnv), b.phi);
    }
    const auto crit = criticality_residual(curve, gamma);
    m.criticality_linf = crit.linf;
    if (crit.linf > criticality_tol * std::max(1.0, std::abs(crit.lambda))) {
        std::ostringstream msg;
        msg << "curve is not critical (|H + 4 gamma v - lambda|_inf = " << crit.linf
            << "); the quadratic form omits the remainder term and is not the second variation";
        m.warnings.push_back(msg.str());
    }
    return m;
}

QuadraticFormTerms second_variation_form(const PeriodicCurve& curve, double gamma, const CurveSamples& phi) {
    QuadraticFormTerms q;
    const Eigen::VectorXd w = to_vec(arclength_weights(curve));
    const Eigen::VectorXd f = to_vec(phi);
    const Eigen::VectorXd fs = to_vec(arclength_derivative(curve, phi));
    const Eigen::VectorXd k = to_vec(curvature(curve));
    q.local = weighted_dot(w, fs, fs);
    q.curvature = -weighted_dot(w, k.cwiseProduct(f), k.cwiseProduct(f));
    if (gamma > 0.0) {
        const Eigen::MatrixXd s = assemble_single_layer(curve);
        q.nonlocal = 8.0 * gamma * weighted_dot(w, f, s * f);
        const Eigen::VectorXd dnv = to_vec(potential_trace(curve, s).normal_derivative);
        q.potential = 4.0 * gamma * weighted_dot(w, dnv, f.cwiseProduct(f));
    }
    return q;
}

SpectrumReport spectrum(const SecondVariationMatrix& m, const PeriodicCurve& curve, double rel_tol) {
    SpectrumReport rep;
    rep.gamma = m.gamma;
    rep.n_modes = m.n_modes;
    rep.warnings = m.warnings;
    rep.classification_withheld = !m.warnings.empty();

    // null space of the zero-mean constraint
    const long nb = m.gram.rows();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.mean_row);
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd z = q.rightCols(nb - 1);
    const Eigen::MatrixXd a = z.transpose() * m.full() * z;
    const Eigen::MatrixXd g = z.transpose() * m.gram * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), 0.5 * (g + g.transpose()));
    if (es.info() != Eigen::Success) throw ResolutionError("spectrum: generalized eigensolver failed (Gram matrix not positive)");
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::MatrixXd vec = z * es.eigenvectors();  // G-orthonormal basis coefficients

    const double scale = std::max(lam.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    rep.stab_tol = rel_tol * scale;

    const auto tb = translation_basis(curve);
    rep.index_set = tb.index_set;
    rep.gram_condition = tb.gram_condition;
    Eigen::MatrixXd tf(m.values.rows(), long(tb.functions.size()));
    for (std::size_t i = 0; i < tb.functions.size(); ++i) tf.col(long(i)) = to_vec(tb.functions[i]);
    const Eigen::MatrixXd wt = m.weights.asDiagonal() * tf;

    // Within clusters of numerically equal eigenvalues, rotate the eigenvectors so that the
    // translation content is concentrated in as few of them as possible.
    for (long i = 0; i < lam.size();) {
        long j = i + 1;
        while (j < lam.size() && lam[j] - lam[j - 1] <= rep.stab_tol) ++j;
        if (j - i > 1 && tf.cols() > 0) {
            const Eigen::MatrixXd p = wt.transpose() * (m.values * vec.middleCols(i, j - i));
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(p, Eigen::ComputeFullV);
            vec.middleCols(i, j - i) = vec.middleCols(i, j - i) * svd.matrixV();
        }
        i = j;
    }

    rep.eigenvalues = lam;
    rep.eigenvectors = vec;
    rep.gap_on_T_perp = std::numeric_limits<double>::infinity();
    for (long i = 0; i < lam.size(); ++i) {
        const Eigen::VectorXd f = m.values * vec.col(i);
        const double nrm = weighted_dot(m.weights, f, f);
        double ov = 0.0;
        if (tf.cols() > 0) ov = (wt.transpose() * f).squaredNorm() / nrm;
        ov = std::clamp(ov, 0.0, 1.0);
        rep.translation_overlap.push_back(ov);
        if (ov > 0.99)
            rep.translation_modes.push_back(int(i));
        else
            rep.gap_on_T_perp = std::min(rep.gap_on_T_perp, lam[i]);
    }
    if (rep.translation_modes.size() != tb.functions.size()) {
        std::ostringstream msg;
        msg << "identified " << rep.translation_modes.size() << " translation modes, expected " << tb.functions.size();
        rep.warnings.push_back(msg.str());
    }
    for (int i : rep.translation_modes)
        if (std::abs(lam[i]) > rep.stab_tol) rep.warnings.push_back("translation mode with non-negligible eigenvalue");

    if (rep.gap_on_T_perp > rep.stab_tol)
        rep.classification = Stability::strictly_stable;
    else if (std::abs(rep.gap_on_T_perp) <= rep.stab_tol)
        rep.classification = Stability::marginal;
    else
        rep.classification = Stability::unstable;
    return rep;
}

std::string SpectrumReport::json() const {
    nlohmann::ordered_json j;
    j["gamma"] = gamma;
    j["n_modes"] = n_modes;
    j["eigenvalues"] = std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    j["translation_overlap"] = translation_overlap;
    j["translation_modes"] = translation_modes;
    j["I_F"] = index_set;
    j["gap_on_T_perp"] = gap_on_T_perp;
    j["classification"] = classification_withheld ? std::string("withheld") : to_string(classification);
    j["computed_classification"] = to_string(classification);
    j["stab_tol"] = stab_tol;
    j["gram_condition"] = std::isfinite(gram_condition) ? nlohmann::ordered_json(gram_condition) : nlohmann::ordered_json("inf");
    j["warnings"] = warnings;
    return j.dump(2);
}

double min_translation_distance(const CurveSamples& phi, const PeriodicCurve& curve) {
    const Eigen::VectorXd w = to_vec(arclength_weights(curve));
    const Eigen::VectorXd f = to_vec(phi);
    const double nrm2 = weighted_dot(w, f, f);
    if (!(nrm2 > 0.0)) throw ConfigError("min_translation_distance: phi must be nonzero");
    double proj = 0.0;
    for (const auto& b : translation_basis(curve).functions) {
        const double c = weighted_dot(w, f, to_vec(b));
        proj += c * c;
    }
    return std::sqrt(std::max(nrm2 - proj, 0.0) / nrm2);
}

PoincareRatio geometric_poincare_ratio(const PeriodicCurve& curve) {
    const auto h = curvature(curve);
    const auto hs = arclength_derivative(curve, h);
    const auto w = arclength_weights(curve);
    double mean = 0.0, len = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        mean += w[i] * h[i];
        len += w[i];
    }
    mean /= len;
    double num = 0.0, den = 0.0, hmax = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += w[i] * (h[i] - mean) * (h[i] - mean);
        den += w[i] * hs[i] * hs[i];
        hmax = std::max(hmax, std::abs(h[i]));
    }
    PoincareRatio r;
    // round-off floor of H relative to its size
    if (num <= 1e-24 * std::max(hmax * hmax, 1.0) * len) return r;
    if (den <= 1e-12 * num) {
        r.infinite = true;
        r.ratio = std::numeric_limits<double>::infinity();
        return r;
    }
    r.ratio = num / den;
    return r;
}

ThresholdResult lamella_threshold(double gamma, int k_max, double h, std::size_t markers_per_interface,
                                  std::size_t n_modes) {
    if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
    if (k_max < 1 || k_max > 16) throw ConfigError("k_max must lie in 1..16");
    ThresholdResult out;
    for (int k = 1; k <= k_max; ++k) {
        const auto curve = shapes::lamellae(k, h, markers_per_interface);
        const auto m = assemble_second_variation(curve, gamma, n_modes);
        const auto rep = spectrum(m, curve);
        out.rows.push_back({k, rep.gap_on_T_perp, rep.classification, m.criticality_linf});
        if (rep.classification == Stability::strictly_stable && !rep.classification_withheld) {
            out.k = k;
            break;
        }
    }
    return out;
}

}  // namespace torusflow
