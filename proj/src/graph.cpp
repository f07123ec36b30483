#include "netdos/graph.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace netdos {

GraphCSR::GraphCSR(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                   std::vector<double> weights, bool is_weighted)
    : n_(n), is_weighted_(is_weighted), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      weights_(std::move(weights)) {
    if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size() ||
        weights_.size() != col_idx_.size()) {
        throw InvalidInput("GraphCSR: inconsistent array sizes");
    }
    std::size_t off_diagonal = 0;
    std::size_t loops = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidInput("GraphCSR: row_ptr not monotone");
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const std::size_t j = col_idx_[p];
            if (j >= n_) throw InvalidInput("GraphCSR: column index out of range in row " + std::to_string(i));
            if (p > row_ptr_[i] && col_idx_[p - 1] >= j) {
                throw InvalidInput("GraphCSR: row " + std::to_string(i) + " not strictly sorted");
            }
            if (!(weights_[p] > 0.0)) throw InvalidInput("GraphCSR: non-positive weight in row " + std::to_string(i));
            if (j == i) {
                ++loops;
                continue;
            }
            ++off_diagonal;
            if (weight(j, i) != weights_[p]) {
                throw InvalidInput("GraphCSR: asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    has_self_loops_ = loops > 0;
    num_edges_ = off_diagonal / 2 + loops;
}

double GraphCSR::weighted_degree(std::size_t i) const noexcept {
    double d = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d += weights_[p];
    return d;
}

double GraphCSR::weight(std::size_t i, std::size_t j) const noexcept {
    const auto row = neighbors(i);
    const auto it = std::lower_bound(row.begin(), row.end(), j);
    if (it == row.end() || *it != j) return 0.0;
    return weights_[row_ptr_[i] + static_cast<std::size_t>(it - row.begin())];
}

GraphCSR build_csr(std::span<const Edge> edges, const BuildOptions& options) {
    struct PairWeights {
        double forward = 0.0;  // listed as (min, max)
        double backward = 0.0; // listed as (max, min)
    };
    std::map<std::pair<std::size_t, std::size_t>, PairWeights> pairs;
    std::size_t n = options.min_nodes;
    bool weighted = false;

    for (const Edge& e : edges) {
        if (e.u < 0 || e.v < 0) {
            throw InvalidInput("build_csr: negative node id " + std::to_string(std::min(e.u, e.v)));
        }
        const double w = e.w.value_or(1.0);
        if (!(w > 0.0)) {
            throw InvalidInput("build_csr: non-positive weight on edge (" + std::to_string(e.u) + "," +
                               std::to_string(e.v) + ")");
        }
        if (e.u == e.v && !options.allow_self_loops) {
            throw InvalidInput("build_csr: self-loop at node " + std::to_string(e.u));
        }
        if (e.w.has_value() && *e.w != 1.0) weighted = true;
        const auto u = static_cast<std::size_t>(e.u);
        const auto v = static_cast<std::size_t>(e.v);
        n = std::max(n, std::max(u, v) + 1);
        auto& slot = pairs[{std::min(u, v), std::max(u, v)}];
        (u <= v ? slot.forward : slot.backward) += w;
    }

    std::vector<std::size_t> counts(n + 1, 0);
    for (const auto& [key, _] : pairs) {
        ++counts[key.first + 1];
        if (key.first != key.second) ++counts[key.second + 1];
    }
    std::vector<std::size_t> row_ptr(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + counts[i + 1];

    std::vector<std::size_t> col_idx(row_ptr.back());
    std::vector<double> weights(row_ptr.back());
    std::vector<std::size_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
    // std::map iterates pairs in (min, max) order, so every row is filled in
    // ascending column order without a separate sort.
    for (const auto& [key, pw] : pairs) {
        const double w = std::max(pw.forward, pw.backward);
        const auto [a, b] = key;
        col_idx[cursor[a]] = b;
        weights[cursor[a]++] = w;
        if (a != b) {
            col_idx[cursor[b]] = a;
            weights[cursor[b]++] = w;
        }
        if (w != 1.0) weighted = true;
    }
    return GraphCSR(n, std::move(row_ptr), std::move(col_idx), std::move(weights), weighted);
}

GraphCSR induced_subgraph(const GraphCSR& g, std::span<const std::size_t> keep) {
    std::vector<std::size_t> local(g.n(), g.n());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= g.n() || (i > 0 && keep[i] <= keep[i - 1])) {
            throw InvalidInput("induced_subgraph: keep list must be sorted, unique and in range");
        }
        local[keep[i]] = i;
    }
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<double> weights;
    for (const std::size_t v : keep) {
        const auto nbrs = g.neighbors(v);
        const auto ws = g.neighbor_weights(v);
        for (std::size_t p = 0; p < nbrs.size(); ++p) {
            if (local[nbrs[p]] == g.n()) continue;
            col_idx.push_back(local[nbrs[p]]);
            weights.push_back(ws[p]);
        }
        row_ptr.push_back(col_idx.size());
    }
    return GraphCSR(keep.size(), std::move(row_ptr), std::move(col_idx), std::move(weights), g.is_weighted());
}

} // namespace netdos
