#pragma once

#include "netdos/filter_adjustment.hpp"
#include "netdos/histogram.hpp"
#include "netdos/probes.hpp"
#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netdos {

enum class MomentMode { Global, PerNode };

struct ProbeMeta {
    std::string method = "kpm"; ///< "kpm", "gql", "nd" or "dense"
    ProbeKind kind = ProbeKind::Rademacher;
    std::uint64_t seed = 0;
    std::size_t nz = 0;
    bool exact = false;
};

/// Chebyshev moments of the scaled operator.
///
/// Global: d_m = (1/N) trace T_m(H~). PerNode: c_{mk} = T_m(H~)_{kk}, stored
/// node-major so row k is contiguous.
struct ChebMoments {
    MomentMode mode = MomentMode::Global;
    std::size_t m_max = 0;
    std::size_t n = 0;
    std::vector<double> values;
    AffineMap map;
    SpectralRange range;
    ProbeMeta probes;
    /// Present when the moments describe the deflated (motif-free) spectrum.
    std::optional<FilterAdjustment> filter;

    double global(std::size_t m) const noexcept { return values[m]; }
    double node(std::size_t k, std::size_t m) const noexcept { return values[k * (m_max + 1) + m]; }
    std::span<const double> node_row(std::size_t k) const noexcept {
        return {values.data() + k * (m_max + 1), m_max + 1};
    }
    /// (1/N) sum_k c_{mk} for per-node moments; d_m itself for global ones.
    std::vector<double> global_moments() const;
};

struct KpmStats {
    std::size_t workspace_doubles = 0; ///< recurrence buffers, excluding the probes and the output
    std::size_t operator_applications = 0;
};

/// Columns processed per sweep of the recurrence.
inline constexpr std::size_t kProbeBatch = 32;

/// Global moments by the three-term vector recurrence, one sparse product per
/// degree per probe. Uses the self-normalized estimator
///   d_m = sum_j Z_j^T T_m(H~) Z_j / sum_j Z_j^T Z_j,
/// so d_0 = 1 exactly; for +-1 probes this is the plain (1/(N nz)) average.
ChebMoments dos_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t m_max,
                        KpmStats* stats = nullptr);

/// Per-node moments with the normalized diagonal estimator.
ChebMoments pdos_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t m_max,
                         KpmStats* stats = nullptr);

/// Jackson damping factors J_0..J_M.
std::vector<double> jackson_coefficients(std::size_t m_max);

/// Integral of w(x) T_m(x) over [a, b] inside [-1, 1], with w the
/// orthogonality weight (1/pi for m = 0, 2/pi otherwise, over sqrt(1 - x^2)).
double chebyshev_bin_integral(std::size_t m, double a, double b) noexcept;

struct HistogramOptions {
    std::size_t bins = 50;
    bool damping = true;
    /// Bin range in original units; defaults to the operator's spectral range.
    std::optional<SpectralRange> range;
    /// Put deflated motif mass back as spikes (only when moments carry a filter).
    bool reinsert_spikes = true;
};

BinEdges histogram_edges(const ChebMoments& moments, const HistogramOptions& options);

/// Histogram of a global moment sequence (per-node moments are averaged first).
SpectralHistogram histogram_from_moments(const ChebMoments& moments, const HistogramOptions& options = {});

/// One histogram per node from per-node moments.
std::vector<SpectralHistogram> node_histograms(const ChebMoments& moments, const HistogramOptions& options = {});

/// Mollified density (K_sigma * mu)(lambda) with a Gaussian kernel of width
/// sigma in original units.
struct SmoothedDensity {
    ChebMoments moments;
    double sigma = 0.05;
    bool damping = true;
    /// Gauss-Chebyshev nodes for the convolution integral (0 = automatic).
    std::size_t quadrature_nodes = 0;
};

std::vector<double> evaluate_density(const SmoothedDensity& sd, std::span<const double> at);

/// Gaussian kernel K(t) = exp(-t^2 / 2) / sqrt(2 pi).
double gaussian_kernel(double t) noexcept;

} // namespace netdos
