#include "netdos/sparse_operator.hpp"

#include "netdos/error.hpp"
#include "netdos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace netdos {

std::string_view to_string(OperatorKind kind) noexcept {
    switch (kind) {
    case OperatorKind::Adjacency: return "adjacency";
    case OperatorKind::Laplacian: return "laplacian";
    case OperatorKind::NormalizedAdjacency: return "normalized-adjacency";
    case OperatorKind::NormalizedLaplacian: return "normalized-laplacian";
    }
    return "unknown";
}

OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "adjacency" || name == "A") return OperatorKind::Adjacency;
    if (name == "laplacian" || name == "L") return OperatorKind::Laplacian;
    if (name == "normalized-adjacency" || name == "nadj") return OperatorKind::NormalizedAdjacency;
    if (name == "normalized-laplacian" || name == "nlap") return OperatorKind::NormalizedLaplacian;
    throw InvalidInput("unknown operator kind '" + std::string(name) + "'");
}

SparseOperator::SparseOperator(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                               std::vector<double> values, std::optional<OperatorKind> kind)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)), kind_(kind) {
    if (row_ptr_.size() != n_ + 1 || row_ptr_.back() != col_idx_.size() || values_.size() != col_idx_.size()) {
        throw InvalidInput("SparseOperator: inconsistent array sizes");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] >= n_ || (p > row_ptr_[i] && col_idx_[p - 1] >= col_idx_[p])) {
                throw InvalidInput("SparseOperator: row " + std::to_string(i) + " has unsorted or out-of-range columns");
            }
        }
    }
}

SparseOperator SparseOperator::from_triplets(std::size_t n, std::span<const Triplet> entries) {
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const Triplet& t : entries) {
        if (t.row >= n || t.col >= n) throw InvalidInput("from_triplets: index out of range");
        acc[{t.row, t.col}] += t.value;
    }
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    for (const auto& [key, v] : acc) {
        const auto it = acc.find({key.second, key.first});
        if (it == acc.end() || it->second != v) {
            throw InvalidInput("from_triplets: matrix is not symmetric at (" + std::to_string(key.first) + "," +
                               std::to_string(key.second) + ")");
        }
        ++row_ptr[key.first + 1];
        col_idx.push_back(key.second);
        values.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
    return SparseOperator(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    kernels::spmm(*this, x, y, 1);
}

void SparseOperator::apply_block(std::span<const double> x, std::span<double> y, std::size_t width) const {
    kernels::spmm(*this, x, y, width);
}

double SparseOperator::entry(std::size_t i, std::size_t j) const noexcept {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double SparseOperator::inf_norm() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += std::abs(values_[p]);
        best = std::max(best, s);
    }
    return best;
}

std::pair<double, double> SparseOperator::gershgorin_bounds() const noexcept {
    if (n_ == 0) return {0.0, 0.0};
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < n_; ++i) {
        double diag = 0.0;
        double radius = 0.0;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] == i) diag = values_[p];
            else radius += std::abs(values_[p]);
        }
        lo = std::min(lo, diag - radius);
        hi = std::max(hi, diag + radius);
    }
    return {lo, hi};
}

SparseOperator SparseOperator::affine(double a, double b) const {
    std::vector<std::size_t> row_ptr(n_ + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(values_.size() + n_);
    values.reserve(values_.size() + n_);
    for (std::size_t i = 0; i < n_; ++i) {
        bool diag_done = (b == 0.0);
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const std::size_t j = col_idx_[p];
            if (!diag_done && j > i) {
                col_idx.push_back(i);
                values.push_back(b);
                diag_done = true;
            }
            double v = a * values_[p];
            if (j == i && !diag_done) {
                v += b;
                diag_done = true;
            }
            col_idx.push_back(j);
            values.push_back(v);
        }
        if (!diag_done) {
            col_idx.push_back(i);
            values.push_back(b);
        }
        row_ptr[i + 1] = col_idx.size();
    }
    return SparseOperator(n_, std::move(row_ptr), std::move(col_idx), std::move(values), std::nullopt);
}

SparseOperator build_operator(const GraphCSR& g, OperatorKind kind) {
    const std::size_t n = g.n();
    std::vector<double> degree(n);
    std::vector<double> inv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        degree[i] = g.weighted_degree(i);
        if (degree[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
    }
    const bool with_diagonal = kind == OperatorKind::Laplacian || kind == OperatorKind::NormalizedLaplacian;

    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(g.num_entries() + (with_diagonal ? n : 0));
    values.reserve(col_idx.capacity());

    for (std::size_t i = 0; i < n; ++i) {
        const auto nbrs = g.neighbors(i);
        const auto ws = g.neighbor_weights(i);
        double diag_value = 0.0;
        if (kind == OperatorKind::Laplacian) diag_value = degree[i];
        if (kind == OperatorKind::NormalizedLaplacian) diag_value = 1.0;

        bool diag_done = !with_diagonal;
        for (std::size_t p = 0; p < nbrs.size(); ++p) {
            const std::size_t j = nbrs[p];
            if (!diag_done && j > i) {
                col_idx.push_back(i);
                values.push_back(diag_value);
                diag_done = true;
            }
            double a = ws[p];
            switch (kind) {
            case OperatorKind::Adjacency: break;
            case OperatorKind::Laplacian: a = -a; break;
            case OperatorKind::NormalizedAdjacency: a = a * inv_sqrt[i] * inv_sqrt[j]; break;
            case OperatorKind::NormalizedLaplacian: a = -a * inv_sqrt[i] * inv_sqrt[j]; break;
            }
            if (j == i && with_diagonal) {
                a += diag_value;
                diag_done = true;
            }
            col_idx.push_back(j);
            values.push_back(a);
        }
        if (!diag_done) {
            col_idx.push_back(i);
            values.push_back(diag_value);
        }
        row_ptr[i + 1] = col_idx.size();
    }
    return SparseOperator(n, std::move(row_ptr), std::move(col_idx), std::move(values), kind);
}

ScaledOperator rescale_operator(const SparseOperator& op, SpectralRange range) {
    if (!(range.min < range.max) || !std::isfinite(range.min) || !std::isfinite(range.max)) {
        throw InvalidInput("rescale_operator: degenerate spectral range (constant spectrum?)");
    }
    AffineMap map{0.5 * (range.max + range.min), 0.5 * (range.max - range.min)};
    ScaledOperator out;
    if (map.shift == 0.0 && map.scale == 1.0) {
        out.matrix = op;
    } else {
        out.matrix = op.affine(1.0 / map.scale, -map.shift / map.scale);
    }
    out.map = map;
    out.range = range;
    return out;
}

} // namespace netdos
