#include "netdos/io.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace netdos {

using nlohmann::json;

GraphFormat parse_graph_format(std::string_view name) {
    if (name == "edgelist") return GraphFormat::EdgeList;
    if (name == "mm" || name == "matrix-market" || name == "matrix_market") return GraphFormat::MatrixMarket;
    throw InvalidInput("unknown graph format '" + std::string(name) + "'");
}

namespace {

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

std::int64_t parse_id(const std::string& token, std::size_t line) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(line_error(line, "bad node id '" + token + "'"));
    }
}

double parse_weight(const std::string& token, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(line_error(line, "bad weight '" + token + "'"));
    }
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string t;
    while (ss >> t) tokens.push_back(t);
    return tokens;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

LoadedGraph read_edgelist(std::istream& in, const BuildOptions& options) {
    std::vector<Edge> edges;
    std::optional<std::int64_t> declared_nodes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens[0][0] == '#' || tokens[0][0] == '%') {
            std::string body = line.substr(line.find_first_of("#%") + 1);
            const auto t = split_ws(body);
            if (t.size() == 2 && t[0] == "nodes:") {
                declared_nodes = parse_id(t[1], line_no);
                if (*declared_nodes < 0) throw InvalidInput(line_error(line_no, "negative node count"));
            }
            continue;
        }
        if (tokens.size() < 2 || tokens.size() > 3) {
            throw InvalidInput(line_error(line_no, "expected 'u v [w]', got '" + line + "'"));
        }
        Edge e{parse_id(tokens[0], line_no), parse_id(tokens[1], line_no), std::nullopt};
        if (tokens.size() == 3) e.w = parse_weight(tokens[2], line_no);
        edges.push_back(e);
    }

    LoadedGraph out;
    BuildOptions opts = options;
    if (declared_nodes) {
        for (const auto& e : edges) {
            if (e.u < 0 || e.v < 0 || e.u >= *declared_nodes || e.v >= *declared_nodes) {
                throw InvalidInput("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                   ") outside the declared node count " + std::to_string(*declared_nodes));
            }
        }
        opts.min_nodes = std::max(opts.min_nodes, static_cast<std::size_t>(*declared_nodes));
        out.graph = build_csr(edges, opts);
        out.original_ids.resize(out.graph.n());
        for (std::size_t i = 0; i < out.original_ids.size(); ++i) out.original_ids[i] = static_cast<std::int64_t>(i);
        return out;
    }

    std::vector<std::int64_t> ids;
    ids.reserve(2 * edges.size());
    for (const auto& e : edges) {
        ids.push_back(e.u);
        ids.push_back(e.v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<std::int64_t, std::int64_t> compact;
    compact.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) compact[ids[i]] = static_cast<std::int64_t>(i);
    for (auto& e : edges) {
        e.u = compact[e.u];
        e.v = compact[e.v];
    }
    out.graph = build_csr(edges, opts);
    out.original_ids = std::move(ids);
    for (std::size_t i = out.original_ids.size(); i < out.graph.n(); ++i) {
        out.original_ids.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

LoadedGraph read_matrix_market(std::istream& in, const BuildOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw InvalidInput("matrix market: empty file");
    ++line_no;
    const auto header = split_ws(lower(line));
    if (header.size() != 5 || header[0] != "%%matrixmarket" || header[1] != "matrix") {
        throw InvalidInput(line_error(line_no, "missing %%MatrixMarket matrix header"));
    }
    if (header[2] != "coordinate") throw InvalidInput(line_error(line_no, "only coordinate format is supported"));
    const std::string& field = header[3];
    if (field != "pattern" && field != "real" && field != "integer") {
        throw InvalidInput(line_error(line_no, "unsupported field '" + field + "'"));
    }
    if (header[4] != "symmetric") {
        throw InvalidInput(line_error(line_no, "matrix is declared '" + header[4] + "'; only symmetric is accepted"));
    }

    std::int64_t rows = -1;
    std::int64_t cols = -1;
    std::int64_t entries = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = split_ws(line);
        if (t.empty() || t[0][0] == '%') continue;
        if (t.size() != 3) throw InvalidInput(line_error(line_no, "expected 'rows cols entries'"));
        rows = parse_id(t[0], line_no);
        cols = parse_id(t[1], line_no);
        entries = parse_id(t[2], line_no);
        break;
    }
    if (rows < 0) throw InvalidInput("matrix market: missing size line");
    if (rows != cols) throw InvalidInput("matrix market: matrix is not square");

    const std::size_t want = field == "pattern" ? 2 : 3;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(std::max<std::int64_t>(entries, 0)));
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = split_ws(line);
        if (t.empty() || t[0][0] == '%') continue;
        if (t.size() != want) throw InvalidInput(line_error(line_no, "expected " + std::to_string(want) + " fields"));
        const std::int64_t i = parse_id(t[0], line_no);
        const std::int64_t j = parse_id(t[1], line_no);
        if (i < 1 || j < 1 || i > rows || j > rows) throw InvalidInput(line_error(line_no, "index out of range"));
        Edge e{i - 1, j - 1, std::nullopt};
        if (want == 3) {
            e.w = parse_weight(t[2], line_no);
            if (*e.w == 0.0) continue; // explicit zeros carry no edge
        }
        edges.push_back(e);
    }
    if (static_cast<std::int64_t>(edges.size()) > entries) throw InvalidInput("matrix market: more entries than declared");

    BuildOptions opts = options;
    opts.min_nodes = std::max(opts.min_nodes, static_cast<std::size_t>(rows));
    LoadedGraph out;
    out.graph = build_csr(edges, opts);
    out.original_ids.resize(out.graph.n());
    for (std::size_t i = 0; i < out.original_ids.size(); ++i) out.original_ids[i] = static_cast<std::int64_t>(i + 1);
    return out;
}

LoadedGraph parse_graph_file(const std::string& path, GraphFormat format, const BuildOptions& options) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    try {
        return format == GraphFormat::EdgeList ? read_edgelist(in, options) : read_matrix_market(in, options);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void write_edgelist(std::ostream& out, const GraphCSR& g) {
    char buf[64];
    out << "# nodes: " << g.n() << '\n';
    for (std::size_t i = 0; i < g.n(); ++i) {
        const auto nb = g.neighbors(i);
        const auto w = g.neighbor_weights(i);
        for (std::size_t p = 0; p < nb.size(); ++p) {
            if (nb[p] < i) continue;
            out << i << ' ' << nb[p];
            if (g.is_weighted()) {
                std::snprintf(buf, sizeof buf, "%.17g", w[p]);
                out << ' ' << buf;
            }
            out << '\n';
        }
    }
}

namespace {

std::int64_t label(const OutputContext& ctx, std::size_t i) {
    return ctx.node_ids.empty() ? static_cast<std::int64_t>(i) : ctx.node_ids.at(i);
}

} // namespace

json filter_to_json(const FilterAdjustment& f) {
    json spikes = json::array();
    for (const auto& [lambda, mult] : f.multiplicity) spikes.push_back({{"eigenvalue", lambda}, {"multiplicity", mult}});
    return {{"removed", f.removed}, {"spikes", spikes}};
}

FilterAdjustment filter_from_json(const json& doc) {
    FilterAdjustment f;
    f.removed = doc.at("removed").get<std::size_t>();
    for (const auto& s : doc.at("spikes")) {
        f.multiplicity[s.at("eigenvalue").get<double>()] = s.at("multiplicity").get<std::size_t>();
    }
    return f;
}

json moments_to_json(const ChebMoments& m, const OutputContext& ctx) {
    json doc;
    doc["method"] = m.probes.method;
    doc["operator"] = ctx.op ? json(std::string(to_string(*ctx.op))) : json(nullptr);
    doc["mode"] = m.mode == MomentMode::Global ? "global" : "per-node";
    doc["M"] = m.m_max;
    doc["n"] = m.n;
    doc["scale_map"] = {{"c", m.map.shift}, {"s", m.map.scale}};
    doc["range"] = {m.range.min, m.range.max};
    doc["probes"] = {{"kind", std::string(to_string(m.probes.kind))},
                     {"seed", m.probes.seed},
                     {"nz", m.probes.nz},
                     {"exact", m.probes.exact}};
    doc["nz"] = m.probes.nz;
    doc["seed"] = m.probes.seed;
    doc["filter"] = m.filter ? filter_to_json(*m.filter) : json(nullptr);
    if (m.mode == MomentMode::Global) {
        doc["values"] = m.values;
    } else {
        json nodes = json::array();
        for (std::size_t k = 0; k < m.n; ++k) {
            const auto row = m.node_row(k);
            nodes.push_back({{"id", label(ctx, k)}, {"moments", std::vector<double>(row.begin(), row.end())}});
        }
        doc["nodes"] = std::move(nodes);
    }
    return doc;
}

ChebMoments moments_from_json(const json& input) {
    const json& doc = input.contains("moments") ? input.at("moments") : input;
    try {
        ChebMoments m;
        const std::string mode = doc.at("mode").get<std::string>();
        if (mode != "global" && mode != "per-node") throw InvalidInput("unknown moment mode '" + mode + "'");
        m.mode = mode == "global" ? MomentMode::Global : MomentMode::PerNode;
        m.m_max = doc.at("M").get<std::size_t>();
        m.n = doc.at("n").get<std::size_t>();
        m.map.shift = doc.at("scale_map").at("c").get<double>();
        m.map.scale = doc.at("scale_map").at("s").get<double>();
        m.range.min = doc.at("range").at(0).get<double>();
        m.range.max = doc.at("range").at(1).get<double>();
        const json& p = doc.at("probes");
        m.probes.method = doc.at("method").get<std::string>();
        m.probes.kind = parse_probe_kind(p.at("kind").get<std::string>());
        m.probes.seed = p.at("seed").get<std::uint64_t>();
        m.probes.nz = p.at("nz").get<std::size_t>();
        m.probes.exact = p.at("exact").get<bool>();
        if (doc.contains("filter") && !doc.at("filter").is_null()) m.filter = filter_from_json(doc.at("filter"));
        if (m.mode == MomentMode::Global) {
            m.values = doc.at("values").get<std::vector<double>>();
            if (m.values.size() != m.m_max + 1) throw InvalidInput("moment count does not match M");
        } else {
            const json& nodes = doc.at("nodes");
            if (nodes.size() != m.n) throw InvalidInput("node count does not match n");
            m.values.reserve(m.n * (m.m_max + 1));
            for (const auto& node : nodes) {
                const auto row = node.at("moments").get<std::vector<double>>();
                if (row.size() != m.m_max + 1) throw InvalidInput("moment count does not match M");
                m.values.insert(m.values.end(), row.begin(), row.end());
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed moments document: ") + e.what());
    }
}

json histogram_to_json(const SpectralHistogram& h) {
    return {{"edges", h.edges}, {"masses", h.masses}, {"normalization", h.normalization}};
}

SpectralHistogram histogram_from_json(const json& input) {
    const json& doc = input.contains("histogram") ? input.at("histogram") : input;
    try {
        SpectralHistogram h;
        h.edges = doc.at("edges").get<std::vector<double>>();
        h.masses = doc.at("masses").get<std::vector<double>>();
        h.normalization = doc.value("normalization", 1.0);
        if (h.edges.size() != h.masses.size() + 1) throw InvalidInput("histogram: edges and masses disagree");
        return h;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed histogram document: ") + e.what());
    }
}

std::string histogram_to_csv(const SpectralHistogram& h) {
    std::string out = "bin_lo,bin_hi,mass\n";
    char buf[128];
    for (std::size_t k = 0; k < h.bins(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", h.edges[k], h.edges[k + 1], h.masses[k]);
        out += buf;
    }
    return out;
}

json quadrature_to_json(const RitzQuadrature& q) {
    return {{"nodes", q.nodes}, {"weights", q.weights}, {"z_norm_sq", q.z_norm_sq}, {"exhausted", q.exhausted}};
}

json motifs_to_json(std::span<const MotifInstance> motifs, const OutputContext& ctx) {
    json list = json::array();
    for (const auto& inst : motifs) {
        std::vector<std::int64_t> nodes;
        for (const std::size_t v : inst.nodes) nodes.push_back(label(ctx, v));
        json item = {{"kind", std::string(to_string(inst.kind))},
                     {"nodes", nodes},
                     {"eigenvalue", inst.eigenvalue ? json(*inst.eigenvalue) : json(nullptr)},
                     {"multiplicity", inst.multiplicity()}};
        if (inst.anchor) item["anchor"] = label(ctx, *inst.anchor);
        list.push_back(std::move(item));
    }
    return list;
}

std::vector<MotifInstance> custom_motifs_from_json(const json& doc, std::span<const std::int64_t> original_ids) {
    std::unordered_map<std::int64_t, std::size_t> index;
    for (std::size_t i = 0; i < original_ids.size(); ++i) index[original_ids[i]] = i;
    std::vector<MotifInstance> out;
    try {
        for (const auto& item : doc) {
            MotifInstance inst;
            inst.kind = MotifKind::Custom;
            inst.eigenvalue = item.at("eigenvalue").get<double>();
            std::vector<std::size_t> support;
            for (const auto& vec : item.at("eigvecs")) {
                SparseVector sv;
                for (const auto& [key, value] : vec.items()) {
                    const auto it = index.find(parse_id(key, 0));
                    if (it == index.end()) throw InvalidInput("custom motif: unknown node id " + key);
                    sv.emplace_back(it->second, value.get<double>());
                    support.push_back(it->second);
                }
                std::sort(sv.begin(), sv.end());
                inst.eigvecs.push_back(std::move(sv));
            }
            std::sort(support.begin(), support.end());
            support.erase(std::unique(support.begin(), support.end()), support.end());
            if (support.empty()) throw InvalidInput("custom motif without support");
            inst.nodes = std::move(support);
            out.push_back(std::move(inst));
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed custom motif document: ") + e.what());
    }
    return out;
}

std::string dump_json(const json& doc) {
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw Error("failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    out.close();
    if (!out) throw Error("failed writing '" + path + "'");
}

} // namespace netdos
