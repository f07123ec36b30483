#pragma once

#include "netdos/graph.hpp"
#include "netdos/histogram.hpp"
#include "netdos/sparse_operator.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace netdos {

/// Dense eigendecomposition H = Q diag(lambda) Q^T, eigenvalues ascending.
struct ExactSpectrum {
    std::vector<double> eigenvalues;
    std::optional<Eigen::MatrixXd> eigenvectors; ///< column i pairs with eigenvalues[i]
};

inline constexpr std::size_t kDenseCap = 5000;

Eigen::MatrixXd to_dense(const SparseOperator& op);

/// Dense symmetric eigensolve; throws InvalidInput above `cap` nodes.
ExactSpectrum exact_spectrum(const SparseOperator& op, bool want_vectors = false, std::size_t cap = kDenseCap);

/// W1 between two equal-size uniform point sets: mean |a_(i) - b_(i)| after sorting.
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct InterlacingResult {
    bool ok = true;
    std::optional<std::size_t> first_violation;
};

/// lambda_i(H) <= lambda_i(H~) <= lambda_{i+r}(H) for the spectrum of a
/// principal submatrix of size N - r, with 1e-10 slack.
InterlacingResult check_interlacing(const ExactSpectrum& full, const ExactSpectrum& reduced, std::size_t r);

/// Uniform-mass histogram of the eigenvalues.
SpectralHistogram exact_histogram(const ExactSpectrum& spectrum, const BinEdges& edges);

struct ErdosRenyi {
    std::size_t n = 0;
    double p = 0.0;
};

/// Grows from a complete graph on m + 1 nodes; each new node attaches m edges
/// to distinct existing nodes chosen proportionally to degree.
struct PreferentialAttachment {
    std::size_t n = 0;
    std::size_t m = 1;
};

/// Ring lattice with k nearest neighbors per side; each lattice edge is moved
/// with probability p to a uniformly random absent node pair, so sparse
/// instances break into many components.
struct SmallWorld {
    std::size_t n = 0;
    std::size_t k = 1;
    double p = 0.0;
};

using GraphModel = std::variant<ErdosRenyi, PreferentialAttachment, SmallWorld>;

GraphCSR generate_graph(const GraphModel& model, std::uint64_t seed);

} // namespace netdos
