#pragma once

// Shared fixtures and dense oracles for the test suites.

#include "netdos/graph.hpp"
#include "netdos/sparse_operator.hpp"
#include "netdos/testkit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace support {

using netdos::Edge;
using netdos::GraphCSR;

inline GraphCSR from_pairs(const std::vector<std::pair<int, int>>& pairs, std::size_t min_nodes = 0) {
    std::vector<Edge> edges;
    for (const auto& [u, v] : pairs) edges.push_back({u, v, std::nullopt});
    return netdos::build_csr(edges, {.allow_self_loops = false, .min_nodes = min_nodes});
}

inline GraphCSR path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return from_pairs(e, static_cast<std::size_t>(n));
}

inline GraphCSR complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return from_pairs(e, static_cast<std::size_t>(n));
}

/// Center 0 with `leaves` leaves.
inline GraphCSR star(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return from_pairs(e);
}

inline GraphCSR grid(int rows, int cols) {
    std::vector<std::pair<int, int>> e;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int v = r * cols + c;
            if (c + 1 < cols) e.emplace_back(v, v + 1);
            if (r + 1 < rows) e.emplace_back(v, v + cols);
        }
    }
    return from_pairs(e, static_cast<std::size_t>(rows * cols));
}

/// Random ER graph with n in [lo, hi] and average degree around `degree`.
inline GraphCSR random_graph(std::mt19937_64& rng, int lo, int hi, double degree = 4.0) {
    const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
    const double p = std::min(1.0, degree / std::max(1, n - 1));
    return netdos::generate_graph(netdos::ErdosRenyi{static_cast<std::size_t>(n), p}, rng());
}

/// Dense adjacency with the same definition as the graph, built independently.
inline Eigen::MatrixXd dense_adjacency(const GraphCSR& g) {
    const auto n = static_cast<Eigen::Index>(g.n());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < g.n(); ++i) {
        const auto nb = g.neighbors(i);
        const auto w = g.neighbor_weights(i);
        for (std::size_t p = 0; p < nb.size(); ++p) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nb[p])) = w[p];
    }
    return a;
}

/// Textbook dense operator definitions.
inline Eigen::MatrixXd dense_operator(const GraphCSR& g, netdos::OperatorKind kind) {
    const Eigen::MatrixXd a = dense_adjacency(g);
    const Eigen::VectorXd d = a.rowwise().sum();
    const auto n = a.rows();
    Eigen::VectorXd dinv = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) dinv(i) = d(i) > 0 ? 1.0 / std::sqrt(d(i)) : 0.0;
    const Eigen::MatrixXd abar = dinv.asDiagonal() * a * dinv.asDiagonal();
    switch (kind) {
    case netdos::OperatorKind::Adjacency: return a;
    case netdos::OperatorKind::Laplacian: return Eigen::MatrixXd(d.asDiagonal()) - a;
    case netdos::OperatorKind::NormalizedAdjacency: return abar;
    case netdos::OperatorKind::NormalizedLaplacian: return Eigen::MatrixXd::Identity(n, n) - abar;
    }
    return a;
}

/// T_0..T_M of a dense matrix by the matrix three-term recurrence.
inline std::vector<Eigen::MatrixXd> dense_chebyshev(const Eigen::MatrixXd& h, std::size_t m_max) {
    std::vector<Eigen::MatrixXd> t;
    t.push_back(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
    if (m_max >= 1) t.push_back(h);
    for (std::size_t m = 2; m <= m_max; ++m) t.push_back(2.0 * h * t[m - 1] - t[m - 2]);
    return t;
}

/// Chebyshev polynomial by the trigonometric definition (|x| <= 1).
inline double cheb(std::size_t m, double x) {
    x = std::clamp(x, -1.0, 1.0);
    return std::cos(static_cast<double>(m) * std::acos(x));
}

inline std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

} // namespace support
