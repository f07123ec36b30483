#pragma once

#include "netdos/chebyshev.hpp"
#include "netdos/graph.hpp"
#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace netdos {

/// One partition I_p = I_s + I_l + I_r. At a leaf the separator holds the
/// whole partition and both sides are empty. Node lists are sorted graph ids.
struct PartitionNode {
    std::size_t id = 0;
    std::ptrdiff_t parent = -1;
    std::vector<std::size_t> separator;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    std::ptrdiff_t left_child = -1;
    std::ptrdiff_t right_child = -1;

    bool is_leaf() const noexcept { return left.empty() && right.empty(); }
    /// I_p, sorted.
    std::vector<std::size_t> partition() const;
};

/// Nested-dissection tree; nodes are stored in pre-order with the root first.
struct PartitionTree {
    std::size_t n = 0;
    std::size_t leaf_size = 0;
    std::vector<PartitionNode> nodes;
    std::vector<std::string> warnings;

    std::size_t depth() const;
};

inline constexpr std::size_t kDefaultLeafSize = 256;

/// Recursive BFS level-set separators: each connected piece is split at the
/// median breadth-first level from a pseudo-peripheral node; disconnected
/// pieces are split between components with an empty separator.
PartitionTree build_partition_tree(const GraphCSR& g, std::size_t leaf_size = kDefaultLeafSize);

/// Checks the disjoint-union structure, root coverage and the separator
/// property (no edge of `op` joins a left and a right part). Throws on failure.
void validate_partition_tree(const PartitionTree& tree, const SparseOperator& op);

/// Exact per-node moments T_m(H~)_{kk} through the block recurrence on the
/// tree; no probes, so the only error is roundoff.
ChebMoments nd_pdos_moments(const ScaledOperator& sop, const PartitionTree& tree, std::size_t m_max);

/// Text format, one line per tree node:
///   node_id parent_id sep:<ids> left:<ids> right:<ids>
/// ids comma-separated, parent -1 at the root.
void write_partition(std::ostream& out, const PartitionTree& tree);
PartitionTree read_partition(std::istream& in, std::size_t n);

} // namespace netdos
