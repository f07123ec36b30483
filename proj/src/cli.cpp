#include "netdos/cli.hpp"

#include "netdos/chebyshev.hpp"
#include "netdos/error.hpp"
#include "netdos/io.hpp"
#include "netdos/kernels.hpp"
#include "netdos/lanczos.hpp"
#include "netdos/motifs.hpp"
#include "netdos/nested_dissection.hpp"
#include "netdos/probes.hpp"
#include "netdos/testkit.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace netdos {

namespace {

using nlohmann::json;

class UsageError : public Error {
public:
    using Error::Error;
};

struct Config {
    std::string input;
    std::string format = "edgelist";
    std::string op = "normalized-adjacency";
    bool allow_self_loops = false;
    std::size_t moments = 500;
    std::size_t probes = 20;
    std::string probe_kind = "hadamard";
    std::size_t bins = 50;
    bool damping = true;
    std::vector<std::string> filter_motifs;
    std::string custom_motifs;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string out_format = "json";
    int threads = 0;
    double margin = 0.01;
    std::size_t range_steps = 40;
    std::vector<double> range;
    std::size_t steps = 50;
    std::optional<std::int64_t> node;
    std::size_t leaf_size = kDefaultLeafSize;
    std::string partition;
    std::string write_partition_path;
    std::vector<std::string> kinds;
    bool eigenvalues = false;
    // generate
    std::string model;
    std::size_t n = 0;
    double p = 0.0;
    std::size_t m = 1;
    std::size_t k = 1;
};

void add_input(CLI::App* cmd, Config& c) {
    cmd->add_option("-i,--input", c.input, "Graph file")->required();
    cmd->add_option("--format", c.format, "edgelist or mm")->check(CLI::IsMember({"edgelist", "mm", "matrix-market"}));
    cmd->add_flag("--allow-self-loops", c.allow_self_loops, "Keep self-loops as diagonal entries");
}

void add_operator(CLI::App* cmd, Config& c) {
    cmd->add_option("--operator", c.op, "adjacency, laplacian, normalized-adjacency or normalized-laplacian")
        ->check(CLI::IsMember({"adjacency", "laplacian", "normalized-adjacency", "normalized-laplacian"}));
}

void add_range(CLI::App* cmd, Config& c) {
    cmd->add_option("--margin", c.margin, "Relative widening of the estimated spectral range");
    cmd->add_option("--range-steps", c.range_steps, "Lanczos steps for the range estimate");
    cmd->add_option("--range", c.range, "Explicit spectral range LO HI")->expected(2);
}

void add_probes(CLI::App* cmd, Config& c) {
    cmd->add_option("--probes", c.probes, "Number of probe vectors");
    cmd->add_option("--probe-kind", c.probe_kind, "gaussian, rademacher, hadamard or basis")
        ->check(CLI::IsMember({"gaussian", "rademacher", "hadamard", "basis"}));
}

void add_hist(CLI::App* cmd, Config& c) {
    cmd->add_option("--bins", c.bins, "Histogram bins")->check(CLI::PositiveNumber);
    cmd->add_flag("--damping,!--no-damping", c.damping, "Jackson damping (default on)");
}

void add_output(CLI::App* cmd, Config& c, bool csv) {
    cmd->add_option("-o,--out", c.out, "Output path, '-' for stdout");
    if (csv) cmd->add_option("--out-format", c.out_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_common(CLI::App* cmd, Config& c) {
    cmd->add_option("--seed", c.seed, "Seed for every random choice");
    cmd->add_option("--threads", c.threads, "Worker threads (default: NETDOS_THREADS or all cores)");
}

LoadedGraph load(const Config& c) {
    BuildOptions opts;
    opts.allow_self_loops = c.allow_self_loops;
    return parse_graph_file(c.input, parse_graph_format(c.format), opts);
}

SpectralRange spectral_range(const SparseOperator& op, const Config& c) {
    if (c.range.size() == 2) {
        if (!(c.range[0] < c.range[1])) throw UsageError("--range needs LO < HI");
        return {c.range[0], c.range[1]};
    }
    return estimate_spectral_range(op, {.seed = c.seed, .steps = c.range_steps, .margin = c.margin});
}

HistogramOptions hist_options(const Config& c) {
    HistogramOptions opts;
    opts.bins = c.bins;
    opts.damping = c.damping;
    return opts;
}

json run_header(const std::string& command, const Config& c, const ChebMoments* m) {
    json h;
    h["command"] = command;
    h["operator"] = c.op;
    h["seed"] = c.seed;
    if (m) {
        h["method"] = m->probes.method;
        h["scale_map"] = {{"c", m->map.shift}, {"s", m->map.scale}};
        h["M"] = m->m_max;
        h["nz"] = m->probes.nz;
        h["filter"] = m->filter ? filter_to_json(*m->filter) : json(nullptr);
    }
    return h;
}

void emit(const Config& c, const json& doc, const SpectralHistogram* h) {
    if (c.out_format == "csv") {
        if (!h) throw UsageError("--out-format csv is only available for histogram output");
        write_text_file(c.out, histogram_to_csv(*h));
        return;
    }
    write_text_file(c.out, dump_json(doc));
}

std::set<MotifKind> parse_kinds(const std::vector<std::string>& names) {
    std::set<MotifKind> kinds;
    for (const auto& name : names) {
        if (name == "all") {
            kinds.insert({MotifKind::OpenTwinClass, MotifKind::ClosedTwinClass, MotifKind::DanglingTwoChain});
            continue;
        }
        const MotifKind k = parse_motif_kind(name);
        if (k == MotifKind::Custom) throw UsageError("custom motifs are read with --custom-motifs");
        kinds.insert(k);
    }
    return kinds;
}

std::vector<MotifInstance> gather_motifs(const LoadedGraph& lg, const SparseOperator& op, const Config& c,
                                         const std::vector<std::string>& kind_names) {
    std::vector<MotifInstance> found = detect_motifs(lg.graph, parse_kinds(kind_names), c.seed);
    if (!c.custom_motifs.empty()) {
        std::ifstream in(c.custom_motifs);
        if (!in) throw InvalidInput("cannot open '" + c.custom_motifs + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw InvalidInput(c.custom_motifs + ": " + e.what());
        }
        auto custom = custom_motifs_from_json(doc, lg.original_ids);
        found.insert(found.end(), custom.begin(), custom.end());
    }
    return bind_motifs(found, op);
}

void cmd_dos(const Config& c) {
    const LoadedGraph lg = load(c);
    const SparseOperator op = build_operator(lg.graph, parse_operator_kind(c.op));
    const ScaledOperator sop = rescale_operator(op, spectral_range(op, c));
    const ProbeMatrix probes = make_probes(op.dim(), c.probes, parse_probe_kind(c.probe_kind), c.seed);
    ChebMoments m;
    if (!c.filter_motifs.empty() || !c.custom_motifs.empty()) {
        const auto motifs = gather_motifs(lg, op, c, c.filter_motifs);
        m = filtered_dos_moments(sop, probes, motifs, c.moments);
    } else {
        m = dos_moments(sop, probes, c.moments);
    }
    const SpectralHistogram h = histogram_from_moments(m, hist_options(c));
    json doc = run_header("dos", c, &m);
    doc["damping"] = c.damping;
    doc["histogram"] = histogram_to_json(h);
    doc["moments"] = moments_to_json(m, {parse_operator_kind(c.op), lg.original_ids});
    emit(c, doc, &h);
}

void cmd_pdos(const Config& c, bool nested) {
    const LoadedGraph lg = load(c);
    const SparseOperator op = build_operator(lg.graph, parse_operator_kind(c.op));
    const ScaledOperator sop = rescale_operator(op, spectral_range(op, c));
    ChebMoments m;
    json warnings = json::array();
    if (nested) {
        PartitionTree tree;
        if (!c.partition.empty()) {
            std::ifstream in(c.partition);
            if (!in) throw InvalidInput("cannot open '" + c.partition + "'");
            tree = read_partition(in, op.dim());
        } else {
            tree = build_partition_tree(lg.graph, c.leaf_size);
        }
        for (const auto& w : tree.warnings) {
            std::cerr << "warning: " << w << '\n';
            warnings.push_back(w);
        }
        if (!c.write_partition_path.empty()) {
            std::ostringstream os;
            write_partition(os, tree);
            write_text_file(c.write_partition_path, os.str());
        }
        m = nd_pdos_moments(sop, tree, c.moments);
    } else {
        const ProbeMatrix probes = make_probes(op.dim(), c.probes, parse_probe_kind(c.probe_kind), c.seed);
        m = pdos_moments(sop, probes, c.moments);
    }
    const auto hists = node_histograms(m, hist_options(c));
    json rows = json::array();
    for (std::size_t k = 0; k < hists.size(); ++k) {
        rows.push_back({{"id", lg.original_ids[k]}, {"masses", hists[k].masses}});
    }
    json doc = run_header(nested ? "nd-pdos" : "pdos", c, &m);
    doc["damping"] = c.damping;
    doc["edges"] = hists.empty() ? json::array() : json(hists.front().edges);
    doc["node_histograms"] = std::move(rows);
    doc["moments"] = moments_to_json(m, {parse_operator_kind(c.op), lg.original_ids});
    if (nested) doc["warnings"] = warnings;
    emit(c, doc, nullptr);
}

void cmd_gql(const Config& c) {
    const LoadedGraph lg = load(c);
    const SparseOperator op = build_operator(lg.graph, parse_operator_kind(c.op));
    const SpectralRange range = spectral_range(op, c);
    const BinEdges edges(range.min, range.max, c.bins);
    json doc = run_header("gql", c, nullptr);
    doc["method"] = "gql";
    doc["steps"] = c.steps;
    SpectralHistogram h;
    if (c.node) {
        const auto it = std::find(lg.original_ids.begin(), lg.original_ids.end(), *c.node);
        if (it == lg.original_ids.end()) throw InvalidInput("node " + std::to_string(*c.node) + " not in the graph");
        const RitzQuadrature q = gql_pdos(op, static_cast<std::size_t>(it - lg.original_ids.begin()), c.steps);
        h = histogram_from_points(q.nodes, q.weights, edges);
        doc["node"] = *c.node;
        doc["quadrature"] = json::array({quadrature_to_json(q)});
    } else {
        const ProbeMatrix probes = make_probes(op.dim(), c.probes, parse_probe_kind(c.probe_kind), c.seed);
        h = gql_dos(op, probes, c.steps, edges);
        json quads = json::array();
        for (std::size_t j = 0; j < probes.nz(); ++j) {
            quads.push_back(quadrature_to_json(lanczos_quadrature(op, probes.column(j), c.steps)));
        }
        doc["nz"] = probes.nz();
        doc["quadrature"] = std::move(quads);
    }
    doc["histogram"] = histogram_to_json(h);
    emit(c, doc, &h);
}

void cmd_motifs(const Config& c) {
    const LoadedGraph lg = load(c);
    const SparseOperator op = build_operator(lg.graph, parse_operator_kind(c.op));
    const std::vector<std::string> kinds = c.kinds.empty() ? std::vector<std::string>{"all"} : c.kinds;
    const auto motifs = gather_motifs(lg, op, c, kinds);
    json doc = run_header("motifs", c, nullptr);
    doc["motifs"] = motifs_to_json(motifs, {parse_operator_kind(c.op), lg.original_ids});
    emit(c, doc, nullptr);
}

void cmd_exact(const Config& c) {
    const LoadedGraph lg = load(c);
    const SparseOperator op = build_operator(lg.graph, parse_operator_kind(c.op));
    const SpectralRange range = spectral_range(op, c);
    const ExactSpectrum spec = exact_spectrum(op);
    const SpectralHistogram h = exact_histogram(spec, BinEdges(range.min, range.max, c.bins));
    json doc = run_header("exact", c, nullptr);
    doc["method"] = "dense";
    doc["histogram"] = histogram_to_json(h);
    if (c.eigenvalues) doc["eigenvalues"] = spec.eigenvalues;
    emit(c, doc, &h);
}

void cmd_generate(const Config& c) {
    GraphModel model;
    if (c.model == "er") model = ErdosRenyi{c.n, c.p};
    else if (c.model == "pa") model = PreferentialAttachment{c.n, c.m};
    else model = SmallWorld{c.n, c.k, c.p};
    const GraphCSR g = generate_graph(model, c.seed);
    std::ostringstream os;
    write_edgelist(os, g);
    write_text_file(c.out, os.str());
}

void cmd_hist(const Config& c) {
    std::ifstream in(c.input);
    if (!in) throw InvalidInput("cannot open '" + c.input + "'");
    json src;
    try {
        src = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(c.input + ": " + e.what());
    }
    const ChebMoments m = moments_from_json(src);
    HistogramOptions opts = hist_options(c);
    if (c.range.size() == 2) {
        if (!(c.range[0] < c.range[1])) throw UsageError("--range needs LO < HI");
        opts.range = SpectralRange{c.range[0], c.range[1]};
    }
    const SpectralHistogram h = histogram_from_moments(m, opts);
    json doc;
    doc["command"] = "hist";
    doc["method"] = m.probes.method;
    doc["operator"] = src.contains("moments") ? src.at("moments").value("operator", json(nullptr)) : src.value("operator", json(nullptr));
    doc["scale_map"] = {{"c", m.map.shift}, {"s", m.map.scale}};
    doc["M"] = m.m_max;
    doc["nz"] = m.probes.nz;
    doc["seed"] = m.probes.seed;
    doc["damping"] = c.damping;
    doc["filter"] = m.filter ? filter_to_json(*m.filter) : json(nullptr);
    doc["histogram"] = histogram_to_json(h);
    emit(c, doc, &h);
}

void apply_threads(int threads) {
    if (threads == 0) {
        if (const char* env = std::getenv("NETDOS_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                throw UsageError(std::string("NETDOS_THREADS is not an integer: ") + env);
            }
        }
    }
    if (threads < 0) throw UsageError("thread count must be non-negative");
    kernels::set_num_threads(threads);
}

} // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"Spectral density estimation for large graphs", args.empty() ? "netdos" : args.front()};
    app.require_subcommand(1);
    Config c;

    auto* dos = app.add_subcommand("dos", "Global spectral histogram by the kernel polynomial method");
    add_input(dos, c);
    add_operator(dos, c);
    add_range(dos, c);
    add_probes(dos, c);
    add_hist(dos, c);
    dos->add_option("--moments", c.moments, "Chebyshev moments M");
    dos->add_option("--filter-motifs", c.filter_motifs, "Motif kinds to deflate (open-twin, closed-twin, dangling-chain, all)")
        ->delimiter(',');
    dos->add_option("--custom-motifs", c.custom_motifs, "JSON file of caller-supplied motif eigenvectors");
    add_output(dos, c, true);
    add_common(dos, c);

    auto* pdos = app.add_subcommand("pdos", "Per-node spectral densities from probe estimates");
    add_input(pdos, c);
    add_operator(pdos, c);
    add_range(pdos, c);
    add_probes(pdos, c);
    add_hist(pdos, c);
    pdos->add_option("--moments", c.moments, "Chebyshev moments M");
    add_output(pdos, c, false);
    add_common(pdos, c);

    auto* gql = app.add_subcommand("gql", "Spectral histogram by Lanczos quadrature");
    add_input(gql, c);
    add_operator(gql, c);
    add_range(gql, c);
    add_probes(gql, c);
    gql->add_option("--bins", c.bins, "Histogram bins")->check(CLI::PositiveNumber);
    gql->add_option("--steps", c.steps, "Lanczos steps per probe")->check(CLI::PositiveNumber);
    gql->add_option("--node", c.node, "Local density of one node (file id) instead of the global one");
    add_output(gql, c, true);
    add_common(gql, c);

    auto* nd = app.add_subcommand("nd-pdos", "Exact per-node moments by nested dissection");
    add_input(nd, c);
    add_operator(nd, c);
    add_range(nd, c);
    add_hist(nd, c);
    nd->add_option("--moments", c.moments, "Chebyshev moments M");
    nd->add_option("--leaf-size", c.leaf_size, "Largest partition kept whole")->check(CLI::PositiveNumber);
    nd->add_option("--partition", c.partition, "Read the partition tree from this file");
    nd->add_option("--write-partition", c.write_partition_path, "Save the partition tree");
    add_output(nd, c, false);
    add_common(nd, c);

    auto* motifs = app.add_subcommand("motifs", "List motif instances and their eigenvalues");
    add_input(motifs, c);
    add_operator(motifs, c);
    motifs->add_option("--kinds", c.kinds, "Motif kinds (default all)")->delimiter(',');
    motifs->add_option("--custom-motifs", c.custom_motifs, "JSON file of caller-supplied motif eigenvectors");
    add_output(motifs, c, false);
    add_common(motifs, c);

    auto* exact = app.add_subcommand("exact", "Dense eigensolve histogram (small graphs)");
    add_input(exact, c);
    add_operator(exact, c);
    add_range(exact, c);
    exact->add_option("--bins", c.bins, "Histogram bins")->check(CLI::PositiveNumber);
    exact->add_flag("--eigenvalues", c.eigenvalues, "Include the eigenvalue list");
    add_output(exact, c, true);
    add_common(exact, c);

    auto* gen = app.add_subcommand("generate", "Write a random graph as an edge list");
    gen->add_option("--model", c.model, "er, pa or sw")->required()->check(CLI::IsMember({"er", "pa", "sw"}));
    gen->add_option("--n", c.n, "Nodes")->required();
    gen->add_option("--p", c.p, "Edge probability (er) or rewiring probability (sw)");
    gen->add_option("--m", c.m, "Edges per new node (pa)");
    gen->add_option("--k", c.k, "Lattice neighbors per side (sw)");
    add_output(gen, c, false);
    add_common(gen, c);

    auto* hist = app.add_subcommand("hist", "Rebin a saved moments file");
    hist->add_option("-i,--input", c.input, "JSON written by dos, pdos, nd-pdos or a moments file")->required();
    add_hist(hist, c);
    hist->add_option("--range", c.range, "Bin range LO HI")->expected(2);
    add_output(hist, c, true);
    add_common(hist, c);

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_threads(c.threads);
        if (dos->parsed()) cmd_dos(c);
        else if (pdos->parsed()) cmd_pdos(c, false);
        else if (nd->parsed()) cmd_pdos(c, true);
        else if (gql->parsed()) cmd_gql(c);
        else if (motifs->parsed()) cmd_motifs(c);
        else if (exact->parsed()) cmd_exact(c);
        else if (gen->parsed()) cmd_generate(c);
        else if (hist->parsed()) cmd_hist(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int cli_run(int argc, char** argv) {
    return cli_run(std::vector<std::string>(argv, argv + argc));
}

} // namespace netdos
