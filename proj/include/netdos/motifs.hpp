#pragma once

#include "netdos/chebyshev.hpp"
#include "netdos/filter_adjustment.hpp"
#include "netdos/graph.hpp"
#include "netdos/probes.hpp"
#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace netdos {

enum class MotifKind {
    OpenTwinClass,    ///< nodes with identical neighbor lists
    ClosedTwinClass,  ///< adjacent nodes with identical closed neighborhoods
    DanglingTwoChain, ///< two or more leaf-middle chains hanging off one anchor
    Custom,           ///< caller-supplied nodes and eigenvectors
};

std::string_view to_string(MotifKind kind) noexcept;
/// "open-twin", "closed-twin", "dangling-chain", "custom".
MotifKind parse_motif_kind(std::string_view name);

/// Sparse vector as (node, value) pairs sorted by node.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// A detected motif. `groups` lists the repeated units: one node per group
/// for twins, {leaf, middle} per chain for dangling chains. `eigenvalue` and
/// `eigvecs` are filled once the instance is bound to an operator.
struct MotifInstance {
    MotifKind kind = MotifKind::OpenTwinClass;
    std::vector<std::size_t> nodes; ///< sorted support
    std::vector<std::vector<std::size_t>> groups;
    std::optional<std::size_t> anchor; ///< shared attachment node of dangling chains
    std::optional<double> eigenvalue;  ///< operator units
    std::vector<SparseVector> eigvecs;
    /// Unit vector repeated on every group; the eigenvectors are its
    /// zero-sum combinations across groups. Empty for Custom instances.
    std::vector<double> pattern;

    std::size_t multiplicity() const noexcept { return eigvecs.size(); }
};

/// Structural detection; no operator involved.
///
/// Twin candidates are bucketed by a commutative hash of random 64-bit node
/// labels (sum over the open or closed neighborhood) and every bucket is
/// split into exact classes by comparing weighted neighbor lists, so no false
/// positives survive. Dangling chains come from scanning degree-1 nodes whose
/// neighbor has degree 2. Nodes with self-loops are skipped.
std::vector<MotifInstance> detect_motifs(const GraphCSR& g, const std::set<MotifKind>& kinds, std::uint64_t seed);

/// One eigenvalue of a motif with its locally supported orthonormal eigenvectors.
struct MotifMode {
    double eigenvalue = 0.0;
    std::vector<SparseVector> eigvecs;
    std::vector<double> pattern;
};

/// Eigenpairs carried by the motif under `op`, computed from the operator's
/// own entries (twins: H_ii - H_ij; chains: the 2x2 leaf-middle block).
/// Throws when the operator breaks the motif's symmetry.
std::vector<MotifMode> motif_eigenvectors(const MotifInstance& inst, const SparseOperator& op);

/// Binds every instance to `op`; a dangling-chain class yields one instance
/// per eigenvalue. Instances that share a node with an accepted instance of
/// the same eigenvalue are dropped, scanning in (kind, smallest node) order.
std::vector<MotifInstance> bind_motifs(std::span<const MotifInstance> instances, const SparseOperator& op);

/// max |H u - lambda u|_2 over the instance's eigenvectors.
double motif_residual(const MotifInstance& inst, const SparseOperator& op);

/// Projects every probe column onto the complement of the motif eigenvectors:
/// z <- z - sum_u u (u^T z). Throws if the eigenvector set is not orthonormal
/// to 1e-8.
std::pair<ProbeMatrix, FilterAdjustment> filter_probes(const ProbeMatrix& probes,
                                                       std::span<const MotifInstance> instances);

/// Global moments of the deflated spectrum, tagged with the adjustment so
/// histograms can re-insert the removed spikes.
ChebMoments filtered_dos_moments(const ScaledOperator& sop, const ProbeMatrix& probes,
                                 std::span<const MotifInstance> instances, std::size_t m_max,
                                 KpmStats* stats = nullptr);

} // namespace netdos
