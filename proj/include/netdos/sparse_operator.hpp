#pragma once

#include "netdos/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netdos {

enum class OperatorKind { Adjacency, Laplacian, NormalizedAdjacency, NormalizedLaplacian };

std::string_view to_string(OperatorKind kind) noexcept;
/// Accepts the CLI spellings ("adjacency", "laplacian", "normalized-adjacency",
/// "normalized-laplacian").
OperatorKind parse_operator_kind(std::string_view name);

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Symmetric sparse matrix in CSR form; diagonal entries live in the CSR
/// arrays alongside the off-diagonal ones. Immutable once built.
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                   std::vector<double> values, std::optional<OperatorKind> kind = std::nullopt);

    /// Sums duplicate entries; throws unless the result is symmetric.
    static SparseOperator from_triplets(std::size_t n, std::span<const Triplet> entries);

    std::size_t dim() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    std::optional<OperatorKind> kind() const noexcept { return kind_; }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// y = H x.
    void apply(std::span<const double> x, std::span<double> y) const;
    /// Y = H X for a row-major n-by-width block.
    void apply_block(std::span<const double> x, std::span<double> y, std::size_t width) const;

    double entry(std::size_t i, std::size_t j) const noexcept;
    /// Max absolute row sum; an upper bound on the spectral norm.
    double inf_norm() const noexcept;
    /// Gershgorin enclosure of the spectrum.
    std::pair<double, double> gershgorin_bounds() const noexcept;

    /// a * H + b * I, keeping the sparsity pattern (diagonal inserted where absent).
    SparseOperator affine(double a, double b) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
    std::optional<OperatorKind> kind_;
};

/// Materializes A, L = D - A, Abar = D^{-1/2} A D^{-1/2} or Lbar = I - Abar.
/// Isolated nodes get D^{-1/2} = 0: a zero row in Abar, a unit diagonal in Lbar.
SparseOperator build_operator(const GraphCSR& g, OperatorKind kind);

struct SpectralRange {
    double min = -1.0;
    double max = 1.0;
};

/// Affine map between original eigenvalue units and the scaled domain [-1, 1]:
/// x = (lambda - shift) / scale.
struct AffineMap {
    double shift = 0.0;
    double scale = 1.0;

    double to_scaled(double lambda) const noexcept { return (lambda - shift) / scale; }
    double to_original(double x) const noexcept { return shift + scale * x; }
};

/// H~ = (H - shift I) / scale with its spectrum inside [-1, 1].
struct ScaledOperator {
    SparseOperator matrix;
    AffineMap map;
    SpectralRange range;
};

ScaledOperator rescale_operator(const SparseOperator& op, SpectralRange range);

struct RangeOptions {
    std::uint64_t seed = 0;
    std::size_t steps = 40;
    /// Inflation applied on each side, as a fraction of the Ritz spread.
    double margin = 0.01;
};

/// Extremal-eigenvalue bounds from a fully reorthogonalized Lanczos run.
///
/// Each Ritz extreme is pushed outward by max(margin * spread, residual norm)
/// and the result is clipped to the Gershgorin interval. Normalized adjacency
/// returns (-1, 1) and normalized Laplacian (0, 2) without iterating.
SpectralRange estimate_spectral_range(const SparseOperator& op, const RangeOptions& options = {});

} // namespace netdos
