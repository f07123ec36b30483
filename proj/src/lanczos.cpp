#include "netdos/lanczos.hpp"

#include "netdos/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace netdos {

namespace {
constexpr double kBreakdown = 1e-12;
}

LanczosFactorization lanczos(const SparseOperator& op, std::span<const double> z, std::size_t steps,
                             bool keep_basis) {
    const std::size_t n = op.dim();
    if (z.size() != n) throw InvalidInput("lanczos: start vector length does not match operator");
    if (steps < 1) throw InvalidInput("lanczos: need at least one step");
    const auto nn = static_cast<Eigen::Index>(n);

    const Eigen::Map<const Eigen::VectorXd> z0(z.data(), nn);
    LanczosFactorization f;
    f.z_norm = z0.norm();
    if (!(f.z_norm > 0.0)) throw InvalidInput("lanczos: start vector is zero");
    if (!std::isfinite(f.z_norm)) throw NumericalError("lanczos: start vector is not finite", 0);

    steps = std::min(steps, n);
    const double tol = kBreakdown * std::max(op.inf_norm(), std::numeric_limits<double>::min());
    Eigen::MatrixXd q(nn, static_cast<Eigen::Index>(steps));
    q.col(0) = z0 / f.z_norm;
    Eigen::VectorXd w(nn);

    for (std::size_t j = 0; j < steps; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        op.apply(std::span<const double>(q.col(jj).data(), n), std::span<double>(w.data(), n));
        const double alpha = q.col(jj).dot(w);
        w -= alpha * q.col(jj);
        if (j > 0) w -= f.betas.back() * q.col(jj - 1);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd h = q.leftCols(jj + 1).transpose() * w;
            w -= q.leftCols(jj + 1) * h;
        }
        const double beta = w.norm();
        if (!std::isfinite(alpha) || !std::isfinite(beta)) {
            throw NumericalError("lanczos: non-finite recurrence coefficient", j + 1);
        }
        f.alphas.push_back(alpha);
        if (j + 1 == steps) {
            f.residual_norm = beta;
            f.exhausted = steps == n && beta < tol;
            break;
        }
        if (beta < tol) {
            f.exhausted = true;
            f.residual_norm = 0.0;
            break;
        }
        f.betas.push_back(beta);
        q.col(jj + 1) = w / beta;
    }

    if (keep_basis) {
        const std::size_t k = f.steps();
        f.basis.assign(q.data(), q.data() + static_cast<std::ptrdiff_t>(n * k));
    }
    return f;
}

RitzQuadrature tridiagonal_quadrature(std::span<const double> alphas, std::span<const double> betas) {
    const auto m = static_cast<Eigen::Index>(alphas.size());
    if (m == 0 || betas.size() + 1 != alphas.size()) throw InvalidInput("tridiagonal_quadrature: bad sizes");
    RitzQuadrature quad;
    if (m == 1) {
        quad.nodes = {alphas[0]};
        quad.weights = {1.0};
        return quad;
    }
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alphas.data(), m);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(betas.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolve failed", alphas.size());
    quad.nodes.resize(static_cast<std::size_t>(m));
    quad.weights.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        quad.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double p = es.eigenvectors()(0, i);
        quad.weights[static_cast<std::size_t>(i)] = p * p;
    }
    return quad;
}

RitzQuadrature lanczos_quadrature(const SparseOperator& op, std::span<const double> z, std::size_t steps) {
    const LanczosFactorization f = lanczos(op, z, steps);
    RitzQuadrature quad = tridiagonal_quadrature(f.alphas, f.betas);
    quad.z_norm_sq = f.z_norm * f.z_norm;
    quad.exhausted = f.exhausted;
    return quad;
}

SpectralHistogram gql_dos(const SparseOperator& op, const ProbeMatrix& probes, std::size_t steps,
                          const BinEdges& edges) {
    if (probes.n() != op.dim()) throw InvalidInput("gql_dos: probe length does not match operator");
    std::vector<RitzQuadrature> quads(probes.nz());
    const auto nz = static_cast<std::int64_t>(probes.nz());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t j = 0; j < nz; ++j) {
        quads[static_cast<std::size_t>(j)] = lanczos_quadrature(op, probes.column(static_cast<std::size_t>(j)), steps);
    }
    std::vector<double> points;
    std::vector<double> weights;
    double total = 0.0;
    for (const auto& q : quads) {
        total += q.z_norm_sq;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            points.push_back(q.nodes[i]);
            weights.push_back(q.weights[i] * q.z_norm_sq);
        }
    }
    for (double& w : weights) w /= total;
    SpectralHistogram h = histogram_from_points(points, weights, edges);
    h.normalization = 1.0;
    return h;
}

RitzQuadrature gql_pdos(const SparseOperator& op, std::size_t node, std::size_t steps) {
    if (node >= op.dim()) {
        throw InvalidInput("gql_pdos: node " + std::to_string(node) + " out of range");
    }
    std::vector<double> e(op.dim(), 0.0);
    e[node] = 1.0;
    return lanczos_quadrature(op, e, steps);
}

ChebMoments quadrature_to_cheb_moments(const RitzQuadrature& quad, std::size_t m_max, const AffineMap& map,
                                       const SpectralRange& range, std::size_t n) {
    ChebMoments out;
    out.mode = MomentMode::Global;
    out.m_max = m_max;
    out.n = n;
    out.map = map;
    out.range = range;
    out.probes.method = "gql";
    out.values.assign(m_max + 1, 0.0);
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        double x = map.to_scaled(quad.nodes[i]);
        if (std::abs(x) > 1.0 + 1e-8) {
            throw InvalidInput("quadrature_to_cheb_moments: node " + std::to_string(quad.nodes[i]) +
                               " lies outside the scaled interval");
        }
        x = std::clamp(x, -1.0, 1.0);
        double t_prev = 1.0;
        double t_cur = x;
        out.values[0] += quad.weights[i];
        if (m_max >= 1) out.values[1] += quad.weights[i] * x;
        for (std::size_t m = 2; m <= m_max; ++m) {
            const double t_next = 2.0 * x * t_cur - t_prev;
            out.values[m] += quad.weights[i] * t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    return out;
}

ChebMoments gql_cheb_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t steps,
                             std::size_t m_max) {
    if (probes.n() != sop.matrix.dim()) throw InvalidInput("gql_cheb_moments: probe length does not match operator");
    const AffineMap identity{};
    const SpectralRange unit{};
    std::vector<ChebMoments> per_probe(probes.nz());
    std::vector<double> norms(probes.nz());
    const auto nz = static_cast<std::int64_t>(probes.nz());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t jj = 0; jj < nz; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const RitzQuadrature q = lanczos_quadrature(sop.matrix, probes.column(j), steps);
        per_probe[j] = quadrature_to_cheb_moments(q, m_max, identity, unit, sop.matrix.dim());
        norms[j] = q.z_norm_sq;
    }
    ChebMoments out;
    out.mode = MomentMode::Global;
    out.m_max = m_max;
    out.n = sop.matrix.dim();
    out.map = sop.map;
    out.range = sop.range;
    out.probes.method = "gql";
    out.probes.kind = probes.kind();
    out.probes.seed = probes.seed();
    out.probes.nz = probes.nz();
    out.probes.exact = probes.exact();
    out.values.assign(m_max + 1, 0.0);
    const double total = std::accumulate(norms.begin(), norms.end(), 0.0);
    for (std::size_t j = 0; j < per_probe.size(); ++j) {
        for (std::size_t m = 0; m <= m_max; ++m) out.values[m] += norms[j] * per_probe[j].values[m];
    }
    for (double& v : out.values) v /= total;
    return out;
}

} // namespace netdos
