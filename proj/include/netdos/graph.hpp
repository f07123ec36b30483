#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace netdos {

/// One input edge. Weight defaults to 1 when absent.
struct Edge {
    std::int64_t u = 0;
    std::int64_t v = 0;
    std::optional<double> w;
};

struct BuildOptions {
    bool allow_self_loops = false;
    /// Lower bound on the node count; lets callers keep trailing isolated nodes.
    std::size_t min_nodes = 0;
};

/// Undirected weighted graph in compressed sparse row form.
///
/// Both directions of every edge are stored, column indices are sorted and
/// unique within each row, and all weights are strictly positive. A self-loop,
/// when allowed, is stored once as a diagonal entry.
class GraphCSR {
public:
    GraphCSR() = default;

    /// Takes ownership of raw CSR arrays and checks every invariant.
    GraphCSR(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
             std::vector<double> weights, bool is_weighted);

    std::size_t n() const noexcept { return n_; }
    /// Number of undirected edges (self-loops count once).
    std::size_t num_edges() const noexcept { return num_edges_; }
    std::size_t num_entries() const noexcept { return col_idx_.size(); }
    bool is_weighted() const noexcept { return is_weighted_; }
    bool has_self_loops() const noexcept { return has_self_loops_; }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> weights() const noexcept { return weights_; }

    std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
        return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::span<const double> neighbor_weights(std::size_t i) const noexcept {
        return {weights_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::size_t degree(std::size_t i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
    /// Weighted degree D_ii; a self-loop contributes its weight once.
    double weighted_degree(std::size_t i) const noexcept;

    /// Weight of edge (i, j), or 0 when absent.
    double weight(std::size_t i, std::size_t j) const noexcept;

private:
    std::size_t n_ = 0;
    std::size_t num_edges_ = 0;
    bool is_weighted_ = false;
    bool has_self_loops_ = false;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> weights_;
};

/// Builds a symmetric CSR graph from an edge list.
///
/// Edges are grouped by unordered pair. Repeated edges in the same direction
/// have their weights summed; an edge listed in both directions is the same
/// undirected edge, so the larger of the two directional sums is kept (equal
/// sums keep the weight once). n = 1 + max id, raised to options.min_nodes.
GraphCSR build_csr(std::span<const Edge> edges, const BuildOptions& options = {});

/// Induced subgraph on `keep` (sorted, unique); node i of the result is keep[i].
GraphCSR induced_subgraph(const GraphCSR& g, std::span<const std::size_t> keep);

} // namespace netdos
