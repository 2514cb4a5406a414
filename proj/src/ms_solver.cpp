#include "torusflow/ms_solver.hpp"

#include <fstream>
#include <iomanip>

#include "torusflow/errors.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/layer.hpp"

namespace torusflow {

JumpSolution solve_jump(const PeriodicCurve& curve, const CurveSamples& g, bool one_sided) {
    return solve_jump(curve, g, assemble_single_layer(curve), one_sided);
}

JumpSolution solve_jump(const PeriodicCurve& curve, const CurveSamples& g, const Eigen::MatrixXd& single_layer,
                        bool one_sided) {
    const auto n = Eigen::Index(curve.total_markers());
    if (Eigen::Index(g.size()) != n) throw ConfigError("solve_jump: boundary data length does not match the curve");
    auto w = arclength_weights(curve);

    Eigen::MatrixXd m(n + 1, n + 1);
    m.topLeftCorner(n, n) = single_layer;
    m.topRightCorner(n, 1).setOnes();
    for (Eigen::Index j = 0; j < n; ++j) m(n, j) = w[std::size_t(j)];
    m(n, n) = 0.0;
    Eigen::VectorXd rhs(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = g[std::size_t(i)];
    rhs[n] = 0.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw ResolutionError("single-layer system is ill-conditioned (estimated condition " + std::to_string(1.0 / rcond) +
                              "); increase the number of markers");
    const Eigen::VectorXd x = lu.solve(rhs);
    const double scale = std::max(rhs.norm(), 1e-300);

    JumpSolution s;
    s.residual = rhs.norm() > 0.0 ? (m * x - rhs).norm() / scale : 0.0;
    s.additive_constant = x[n];
    s.weights = std::move(w);
    s.boundary_data = CurveSamples(g.values, SampleKind::boundary_data);
    const std::size_t nn = curve.total_markers();
    std::vector<double> sigma(nn), jump(nn);
    for (Eigen::Index i = 0; i < n; ++i) {
        sigma[std::size_t(i)] = x[i];
        jump[std::size_t(i)] = -x[i];
    }
    s.density = CurveSamples(std::move(sigma), SampleKind::density);
    s.jump = CurveSamples(std::move(jump), SampleKind::velocity);
    if (one_sided) {
        const Eigen::VectorXd ks = assemble_adjoint_double_layer(curve) * x.head(n);
        std::vector<double> plus(nn), minus(nn);
        for (Eigen::Index i = 0; i < n; ++i) {
            plus[std::size_t(i)] = ks[i] - 0.5 * x[i];
            minus[std::size_t(i)] = ks[i] + 0.5 * x[i];
        }
        s.one_sided = {CurveSamples(std::move(plus)), CurveSamples(std::move(minus))};
    }
    return s;
}

MsVelocity ms_normal_velocity(const PeriodicCurve& curve, double gamma, bool one_sided) {
    if (gamma < 0.0) throw ConfigError("gamma must be non-negative");
    CurveSamples g = curvature(curve);
    g.kind = SampleKind::boundary_data;
    const Eigen::MatrixXd s = assemble_single_layer(curve);
    if (gamma > 0.0) {
        const auto v = potential_trace(curve, s).boundary_values;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += 4.0 * gamma * v[i];
    }
    MsVelocity out;
    out.solution = solve_jump(curve, g, s, one_sided);
    out.velocity = out.solution.jump;
    return out;
}

double dissipation_ms(const JumpSolution& solution) {
    double d = 0.0;
    for (std::size_t i = 0; i < solution.jump.size(); ++i)
        d -= solution.weights[i] * solution.boundary_data[i] * solution.jump[i];
    return d;
}

void write_jump_csv(const PeriodicCurve& curve, const JumpSolution& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "loop,idx,s,g,sigma,jump,dnw_plus,dnw_minus\n" << std::setprecision(17);
    for (std::size_t l = 0; l < curve.num_loops(); ++l) {
        double arc = 0.0;
        for (std::size_t j = 0; j < curve.loop(l).size(); ++j) {
            const std::size_t i = curve.offset(l) + j;
            out << l << ',' << j << ',' << arc << ',' << s.boundary_data[i] << ',' << s.density[i] << ',' << s.jump[i]
                << ',' << s.one_sided.first[i] << ',' << s.one_sided.second[i] << '\n';
            arc += s.weights[i];
        }
    }
}

}  // namespace torusflow
