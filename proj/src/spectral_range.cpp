#include "netdos/error.hpp"
#include "netdos/lanczos.hpp"
#include "netdos/sparse_operator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace netdos {

SpectralRange estimate_spectral_range(const SparseOperator& op, const RangeOptions& options) {
    if (const auto kind = op.kind()) {
        if (*kind == OperatorKind::NormalizedAdjacency) return {-1.0, 1.0};
        if (*kind == OperatorKind::NormalizedLaplacian) return {0.0, 2.0};
    }
    if (op.dim() == 0) throw InvalidInput("estimate_spectral_range: empty operator");
    if (options.steps < 2) throw InvalidInput("estimate_spectral_range: need at least two Lanczos steps");

    const ProbeMatrix start = make_probes(op.dim(), 1, ProbeKind::Gaussian, options.seed);
    const LanczosFactorization f = lanczos(op, start.column(0), options.steps);

    const auto m = static_cast<Eigen::Index>(f.steps());
    double lo = f.alphas[0];
    double hi = f.alphas[0];
    double res_lo = f.residual_norm;
    double res_hi = f.residual_norm;
    if (m > 1) {
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(f.alphas.data(), m);
        Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(f.betas.data(), m - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success) throw NumericalError("estimate_spectral_range: tridiagonal solve failed", f.steps());
        lo = es.eigenvalues()(0);
        hi = es.eigenvalues()(m - 1);
        // Ritz residual ||H y - theta y|| = beta_M |s_M|.
        res_lo = f.residual_norm * std::abs(es.eigenvectors()(m - 1, 0));
        res_hi = f.residual_norm * std::abs(es.eigenvectors()(m - 1, m - 1));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw NumericalError("estimate_spectral_range: non-finite Ritz values", f.steps());
    }
    const double pad = options.margin * (hi - lo);
    const auto [g_lo, g_hi] = op.gershgorin_bounds();
    SpectralRange r;
    r.min = std::max(lo - std::max(pad, res_lo), g_lo);
    r.max = std::min(hi + std::max(pad, res_hi), g_hi);
    return r;
}

} // namespace netdos
