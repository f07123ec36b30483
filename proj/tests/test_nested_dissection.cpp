#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdos/error.hpp"
#include "netdos/nested_dissection.hpp"
#include "support.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace netdos;

namespace {

ScaledOperator scaled(const GraphCSR& g, OperatorKind kind = OperatorKind::NormalizedAdjacency) {
    const SparseOperator op = build_operator(g, kind);
    return rescale_operator(op, estimate_spectral_range(op, {.seed = 2}));
}

/// Largest |c_mk - T_m(H~)_kk| against the dense recurrence.
double dense_error(const ScaledOperator& sop, const ChebMoments& c) {
    Eigen::MatrixXd h = to_dense(sop.matrix);
    const auto t = support::dense_chebyshev(h, c.m_max);
    double worst = 0.0;
    for (std::size_t m = 0; m <= c.m_max; ++m)
        for (std::size_t k = 0; k < c.n; ++k)
            worst = std::max(worst, std::abs(c.node(k, m) - t[m](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
    return worst;
}

bool disjoint_sorted(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return both.empty();
}

} // namespace

TEST_CASE("path of five splits at a middle separator") {
    const GraphCSR g = support::path(5);
    const PartitionTree tree = build_partition_tree(g, 2);
    REQUIRE(!tree.nodes.empty());
    const PartitionNode& root = tree.nodes[0];
    CHECK(root.parent == -1);
    REQUIRE(root.separator.size() == 1);
    const std::size_t s = root.separator[0];
    CHECK(s >= 1);
    CHECK(s <= 3);
    CHECK(root.left.size() + root.right.size() == 4);
    for (const std::size_t a : root.left)
        for (const std::size_t b : root.right) CHECK((a > s) != (b > s));
    for (const auto& node : tree.nodes)
        if (node.is_leaf()) CHECK(node.separator.size() <= 2);
    validate_partition_tree(tree, build_operator(g, OperatorKind::Adjacency));
}

TEST_CASE("disconnected graph gets an empty root separator") {
    const GraphCSR g = support::from_pairs({{0, 1}, {1, 2}, {3, 4}, {4, 5}, {6, 7}});
    const PartitionTree tree = build_partition_tree(g, 2);
    CHECK(tree.nodes[0].separator.empty());
    CHECK(tree.nodes[0].left.size() + tree.nodes[0].right.size() == 8);
    validate_partition_tree(tree, build_operator(g, OperatorKind::Adjacency));
    const ScaledOperator sop = scaled(g);
    CHECK(dense_error(sop, nd_pdos_moments(sop, tree, 20)) <= 1e-12);
}

TEST_CASE("grid partition has no cross edges") {
    const GraphCSR g = support::grid(20, 20);
    const PartitionTree tree = build_partition_tree(g, 50);
    validate_partition_tree(tree, build_operator(g, OperatorKind::Adjacency));
    CHECK(tree.depth() >= 3);
    for (const auto& node : tree.nodes) {
        if (node.is_leaf()) {
            CHECK(node.separator.size() <= 50);
            continue;
        }
        for (const std::size_t a : node.left)
            for (const std::size_t b : g.neighbors(a)) CHECK_FALSE(std::binary_search(node.right.begin(), node.right.end(), b));
        // Grid separators stay small.
        CHECK(node.separator.size() <= 40);
    }
}

TEST_CASE("tree structure is a disjoint union at every node") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const GraphCSR g = support::random_graph(rng, 10, 400, 1.0 + static_cast<double>(rng() % 6));
        const std::size_t leaf = 1 + rng() % 40;
        const PartitionTree tree = build_partition_tree(g, leaf);
        validate_partition_tree(tree, build_operator(g, OperatorKind::Adjacency));
        CHECK(tree.nodes[0].partition().size() == g.n());
        for (const auto& node : tree.nodes) {
            CHECK(disjoint_sorted(node.separator, node.left));
            CHECK(disjoint_sorted(node.separator, node.right));
            CHECK(disjoint_sorted(node.left, node.right));
            if (node.is_leaf()) {
                CHECK(node.separator.size() <= leaf);
                continue;
            }
            // A piece of BFS depth one splits into the root level and a separator only.
            for (const auto& [child, part] : {std::pair{node.left_child, &node.left}, std::pair{node.right_child, &node.right}}) {
                if (part->empty()) {
                    CHECK(child == -1);
                    continue;
                }
                REQUIRE(child >= 0);
                CHECK(tree.nodes[static_cast<std::size_t>(child)].partition() == *part);
                CHECK(tree.nodes[static_cast<std::size_t>(child)].parent == static_cast<std::ptrdiff_t>(node.id));
            }
        }
    }
}

TEST_CASE("block recurrence equals the dense diagonal") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const GraphCSR g = support::random_graph(rng, 20, 250, 2.0 + static_cast<double>(rng() % 5));
        const std::size_t leaf = 2 + rng() % 30;
        const auto kind = static_cast<OperatorKind>(rng() % 4);
        const ScaledOperator sop = scaled(g, kind);
        const PartitionTree tree = build_partition_tree(g, leaf);
        const ChebMoments c = nd_pdos_moments(sop, tree, 30);
        CHECK(c.mode == MomentMode::PerNode);
        CHECK(c.probes.method == "nd");
        CHECK(dense_error(sop, c) <= 1e-9);
    }
}

TEST_CASE("weighted graph") {
    std::vector<Edge> edges{{0, 1, 2.0}, {1, 2, 0.25}, {2, 3, 1.5}, {3, 4, 1.0}, {4, 0, 3.0}, {2, 5, 1.0}, {5, 6, 2.0}};
    const GraphCSR g = build_csr(edges);
    for (const auto kind : {OperatorKind::Adjacency, OperatorKind::Laplacian, OperatorKind::NormalizedLaplacian}) {
        const ScaledOperator sop = scaled(g, kind);
        CHECK(dense_error(sop, nd_pdos_moments(sop, build_partition_tree(g, 1), 25)) <= 1e-10);
    }
}

TEST_CASE("single-leaf tree is the trivial case") {
    const GraphCSR g = support::complete(6);
    const PartitionTree tree = build_partition_tree(g, 256);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(tree.depth() == 1);
    const ScaledOperator sop = scaled(g);
    CHECK(dense_error(sop, nd_pdos_moments(sop, tree, 15)) <= 1e-12);
}

TEST_CASE("moments do not depend on the leaf size") {
    const GraphCSR g = support::grid(12, 13);
    const ScaledOperator sop = scaled(g);
    const ChebMoments ref = nd_pdos_moments(sop, build_partition_tree(g, 1000), 40);
    for (const std::size_t leaf : {1, 3, 10, 40}) {
        const ChebMoments c = nd_pdos_moments(sop, build_partition_tree(g, leaf), 40);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.values.size(); ++i) worst = std::max(worst, std::abs(c.values[i] - ref.values[i]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("partition file round trip") {
    const GraphCSR g = support::grid(8, 9);
    const PartitionTree tree = build_partition_tree(g, 6);
    std::stringstream buf;
    write_partition(buf, tree);
    const PartitionTree back = read_partition(buf, g.n());
    REQUIRE(back.nodes.size() == tree.nodes.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        CHECK(back.nodes[i].separator == tree.nodes[i].separator);
        CHECK(back.nodes[i].left == tree.nodes[i].left);
        CHECK(back.nodes[i].right == tree.nodes[i].right);
        CHECK(back.nodes[i].parent == tree.nodes[i].parent);
        CHECK(back.nodes[i].left_child == tree.nodes[i].left_child);
        CHECK(back.nodes[i].right_child == tree.nodes[i].right_child);
    }
    const ScaledOperator sop = scaled(g);
    const auto a = nd_pdos_moments(sop, tree, 20);
    const auto b = nd_pdos_moments(sop, back, 20);
    CHECK(a.values == b.values);
}

TEST_CASE("invalid partitions are rejected") {
    const GraphCSR g = support::path(4);
    const SparseOperator op = build_operator(g, OperatorKind::Adjacency);
    SUBCASE("cross edge between the sides") {
        std::stringstream in("0 -1 sep: left:0,1 right:2,3\n1 0 sep:0,1 left: right:\n2 0 sep:2,3 left: right:\n");
        const PartitionTree t = read_partition(in, 4);
        CHECK_THROWS_AS(validate_partition_tree(t, op), InvalidInput);
    }
    SUBCASE("missing node") {
        std::stringstream in("0 -1 sep:0,1,2 left: right:\n");
        CHECK_THROWS_AS(validate_partition_tree(read_partition(in, 4), op), InvalidInput);
    }
    SUBCASE("overlap") {
        std::stringstream in("0 -1 sep:1 left:0,1 right:2,3\n1 0 sep:0,1 left: right:\n2 0 sep:2,3 left: right:\n");
        CHECK_THROWS_AS(validate_partition_tree(read_partition(in, 4), op), InvalidInput);
    }
    SUBCASE("malformed line") {
        std::stringstream in("0 -1 separator:0\n");
        CHECK_THROWS_AS(read_partition(in, 4), InvalidInput);
    }
    SUBCASE("a valid hand-written tree passes") {
        std::stringstream in("0 -1 sep:1 left:0 right:2,3\n1 0 sep:0 left: right:\n2 0 sep:2,3 left: right:\n");
        const PartitionTree t = read_partition(in, 4);
        validate_partition_tree(t, op);
        const ScaledOperator sop = rescale_operator(op, {-2.0, 2.0});
        CHECK(dense_error(sop, nd_pdos_moments(sop, t, 12)) <= 1e-12);
    }
}
