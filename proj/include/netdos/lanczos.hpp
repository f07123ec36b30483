#pragma once

#include "netdos/chebyshev.hpp"
#include "netdos/histogram.hpp"
#include "netdos/probes.hpp"
#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace netdos {

/// M-step Lanczos tridiagonalization H Z_M = Z_M Gamma_M + r_M e_M^T.
struct LanczosFactorization {
    std::vector<double> alphas; ///< diagonal of Gamma_M
    std::vector<double> betas;  ///< off-diagonal of Gamma_M (size steps - 1)
    double z_norm = 0.0;
    double residual_norm = 0.0; ///< ||r_M||; zero after breakdown
    bool exhausted = false;     ///< Krylov space ran out before the requested steps
    std::vector<double> basis;  ///< n-by-steps, column-major; empty unless requested

    std::size_t steps() const noexcept { return alphas.size(); }
};

/// Lanczos with full (twice-iterated Gram-Schmidt) reorthogonalization.
/// Stops early when beta < 1e-12 * ||H||_inf; that run is flagged exhausted.
LanczosFactorization lanczos(const SparseOperator& op, std::span<const double> z, std::size_t steps,
                             bool keep_basis = false);

/// Gauss rule from Gamma_M: ||z||^2 sum_i w_i f(tau_i) ~ z^T f(H) z.
struct RitzQuadrature {
    std::vector<double> nodes;   ///< ascending
    std::vector<double> weights; ///< |p_{i1}|^2, sum to 1
    double z_norm_sq = 0.0;
    bool exhausted = false;
};

/// Eigendecomposition of a symmetric tridiagonal matrix; nodes ascending.
RitzQuadrature tridiagonal_quadrature(std::span<const double> alphas, std::span<const double> betas);

RitzQuadrature lanczos_quadrature(const SparseOperator& op, std::span<const double> z, std::size_t steps);

/// Per-probe quadratures averaged into a histogram, each probe weighted by ||z||^2.
SpectralHistogram gql_dos(const SparseOperator& op, const ProbeMatrix& probes, std::size_t steps,
                          const BinEdges& edges);

/// Quadrature for the local density of node k (start vector e_k).
RitzQuadrature gql_pdos(const SparseOperator& op, std::size_t node, std::size_t steps);

/// d_m = sum_i w_i T_m(tau~_i) with tau~ = map.to_scaled(tau); global mode, probe_meta "gql".
ChebMoments quadrature_to_cheb_moments(const RitzQuadrature& quad, std::size_t m_max, const AffineMap& map,
                                       const SpectralRange& range, std::size_t n);

/// Chebyshev moments from GQL: per-probe moments averaged with ||z||^2 weights.
ChebMoments gql_cheb_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t steps,
                             std::size_t m_max);

} // namespace netdos
