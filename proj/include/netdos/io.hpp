#pragma once

#include "netdos/chebyshev.hpp"
#include "netdos/graph.hpp"
#include "netdos/histogram.hpp"
#include "netdos/lanczos.hpp"
#include "netdos/motifs.hpp"
#include "netdos/sparse_operator.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netdos {

enum class GraphFormat { EdgeList, MatrixMarket };

/// "edgelist" or "mm" / "matrix-market".
GraphFormat parse_graph_format(std::string_view name);

/// A graph with the file's node ids; node i of `graph` was original_ids[i].
struct LoadedGraph {
    GraphCSR graph;
    std::vector<std::int64_t> original_ids;
};

/// Whitespace-separated `u v [w]` lines; `#` and `%` lines are comments.
/// Ids are compacted to 0..n-1 in ascending order, except that a
/// `# nodes: N` comment keeps ids as given (all must lie in [0, N)), which
/// preserves isolated nodes.
LoadedGraph read_edgelist(std::istream& in, const BuildOptions& options = {});

/// Coordinate format, pattern/real/integer field, symmetric storage only.
LoadedGraph read_matrix_market(std::istream& in, const BuildOptions& options = {});

LoadedGraph parse_graph_file(const std::string& path, GraphFormat format, const BuildOptions& options = {});

/// Edge list with a `# nodes: N` header, one `u v` (or `u v w`) line per edge.
void write_edgelist(std::ostream& out, const GraphCSR& g);

/// Labels carried into serialized output.
struct OutputContext {
    std::optional<OperatorKind> op;
    std::vector<std::int64_t> node_ids; ///< original ids; empty means 0..n-1
};

nlohmann::json moments_to_json(const ChebMoments& moments, const OutputContext& ctx);
/// Inverse of moments_to_json; accepts the moments object itself or any
/// document holding it under "moments".
ChebMoments moments_from_json(const nlohmann::json& doc);

nlohmann::json histogram_to_json(const SpectralHistogram& h);
SpectralHistogram histogram_from_json(const nlohmann::json& doc);

/// CSV with header `bin_lo,bin_hi,mass`, numbers at 17 significant digits.
std::string histogram_to_csv(const SpectralHistogram& h);

nlohmann::json quadrature_to_json(const RitzQuadrature& q);

/// kind, nodes (original ids), eigenvalue, multiplicity per instance.
nlohmann::json motifs_to_json(std::span<const MotifInstance> motifs, const OutputContext& ctx);

/// Custom motifs from `[{"eigenvalue": x, "eigvecs": [{"<id>": value, ...}, ...]}, ...]`
/// with node keys in the file's original ids.
std::vector<MotifInstance> custom_motifs_from_json(const nlohmann::json& doc,
                                                   std::span<const std::int64_t> original_ids);

nlohmann::json filter_to_json(const FilterAdjustment& f);
FilterAdjustment filter_from_json(const nlohmann::json& doc);

/// Deterministic serialization (sorted keys, shortest round-trip doubles).
std::string dump_json(const nlohmann::json& doc);

/// Writes `content` to `path`; "-" means stdout. Throws on failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace netdos
