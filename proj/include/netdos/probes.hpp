#pragma once

#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace netdos {

enum class ProbeKind { Gaussian, Rademacher, HadamardSigned, StandardBasis };

std::string_view to_string(ProbeKind kind) noexcept;
/// CLI spellings: "gaussian", "rademacher", "hadamard", "basis".
ProbeKind parse_probe_kind(std::string_view name);

/// n-by-nz probe block, column-major. Entry (i, j) is a pure function of
/// (kind, seed, j, i), so any column can be regenerated on its own.
class ProbeMatrix {
public:
    ProbeMatrix() = default;
    ProbeMatrix(std::size_t n, std::size_t nz, ProbeKind kind, std::uint64_t seed, std::vector<double> values,
                bool projected = false);

    std::size_t n() const noexcept { return n_; }
    std::size_t nz() const noexcept { return nz_; }
    ProbeKind kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }
    /// True once motif eigenvectors have been projected out.
    bool projected() const noexcept { return projected_; }
    /// StandardBasis with nz = n: estimators are exact.
    bool exact() const noexcept { return kind_ == ProbeKind::StandardBasis && nz_ == n_; }

    std::span<const double> column(std::size_t j) const noexcept { return {values_.data() + j * n_, n_}; }
    std::span<double> column(std::size_t j) noexcept { return {values_.data() + j * n_, n_}; }
    std::span<const double> values() const noexcept { return values_; }

    /// Copies columns [first, first + width) into a row-major n-by-width block.
    void gather_rows(std::size_t first, std::size_t width, std::span<double> block) const;

private:
    std::size_t n_ = 0;
    std::size_t nz_ = 0;
    ProbeKind kind_ = ProbeKind::Rademacher;
    std::uint64_t seed_ = 0;
    bool projected_ = false;
    std::vector<double> values_;
};

/// HadamardSigned: column j is column j of the Sylvester matrix of order
/// 2^ceil(log2 n), truncated to n rows, with row i multiplied by a random sign.
ProbeMatrix make_probes(std::size_t n, std::size_t nz, ProbeKind kind, std::uint64_t seed);

/// (1/nz) sum_j Z_j^T H Z_j; basis probes are scaled by n/nz instead, so nz = n
/// gives the exact trace.
double estimate_trace(const SparseOperator& op, const ProbeMatrix& probes);

enum class DiagonalScaling {
    Normalized, ///< (sum_j Z_j (.) H Z_j) / (sum_j Z_j (.) Z_j)
    Raw,        ///< (1/nz) sum_j Z_j (.) H Z_j
};

std::vector<double> estimate_diagonal(const SparseOperator& op, const ProbeMatrix& probes,
                                      DiagonalScaling scaling = DiagonalScaling::Normalized);

/// splitmix64 finalizer; the building block of the counter-based generator.
std::uint64_t mix64(std::uint64_t x) noexcept;
/// Uniform in [0, 1) from a 64-bit word.
double to_unit(std::uint64_t bits) noexcept;

} // namespace netdos
