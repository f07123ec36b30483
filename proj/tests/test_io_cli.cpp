#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdos/cli.hpp"
#include "netdos/error.hpp"
#include "netdos/io.hpp"
#include "netdos/testkit.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace netdos;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("netdos-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "netdos");
    return cli_run(args);
}

nlohmann::json load(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("edge list parsing") {
    SUBCASE("comments, weights and compaction") {
        std::istringstream in("# a comment\n% another\n10 20\n20 30 2.5\n\n10 30\n");
        const LoadedGraph g = read_edgelist(in);
        CHECK(g.graph.n() == 3);
        CHECK(g.original_ids == std::vector<std::int64_t>{10, 20, 30});
        CHECK(g.graph.weight(1, 2) == 2.5);
        CHECK(g.graph.num_edges() == 3);
    }
    SUBCASE("node-count header keeps isolated nodes") {
        std::istringstream in("# nodes: 5\n0 1\n3 1\n");
        const LoadedGraph g = read_edgelist(in);
        CHECK(g.graph.n() == 5);
        CHECK(g.graph.degree(2) == 0);
        CHECK(g.graph.degree(4) == 0);
    }
    SUBCASE("errors carry line numbers") {
        std::istringstream bad_id("0 1\n1 x\n");
        CHECK(error_of([&] { read_edgelist(bad_id); }).find("line 2") != std::string::npos);
        std::istringstream bad_weight("0 1 w\n");
        CHECK(error_of([&] { read_edgelist(bad_weight); }).find("line 1") != std::string::npos);
        std::istringstream short_line("0 1\n\n7\n");
        CHECK(error_of([&] { read_edgelist(short_line); }).find("line 3") != std::string::npos);
    }
    SUBCASE("self-loops are opt-in") {
        std::istringstream a("0 0\n0 1\n");
        CHECK_THROWS_AS(read_edgelist(a), InvalidInput);
        std::istringstream b("0 0\n0 1\n");
        CHECK(read_edgelist(b, {.allow_self_loops = true}).graph.has_self_loops());
    }
}

TEST_CASE("matrix market parsing") {
    SUBCASE("symmetric pattern") {
        std::istringstream in("%%MatrixMarket matrix coordinate pattern symmetric\n% c\n4 4 3\n2 1\n3 2\n4 4\n");
        CHECK_THROWS_AS(read_matrix_market(in), InvalidInput); // 4 4 is a self-loop
        std::istringstream ok("%%MatrixMarket matrix coordinate pattern symmetric\n4 4 2\n2 1\n3 2\n");
        const LoadedGraph g = read_matrix_market(ok);
        CHECK(g.graph.n() == 4);
        CHECK(g.graph.num_edges() == 2);
        CHECK(g.original_ids.front() == 1);
    }
    SUBCASE("real values, explicit zeros skipped") {
        std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n2 1 0.5\n3 1 0\n3 2 2\n");
        const LoadedGraph g = read_matrix_market(in);
        CHECK(g.graph.num_edges() == 2);
        CHECK(g.graph.weight(0, 1) == 0.5);
    }
    SUBCASE("general storage is rejected") {
        std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1\n");
        CHECK(error_of([&] { read_matrix_market(in); }).find("symmetric") != std::string::npos);
    }
    SUBCASE("array format is rejected") {
        std::istringstream in("%%MatrixMarket matrix array real symmetric\n2 2\n");
        CHECK_THROWS_AS(read_matrix_market(in), InvalidInput);
    }
    CHECK(parse_graph_format("mm") == GraphFormat::MatrixMarket);
    CHECK(parse_graph_format("edgelist") == GraphFormat::EdgeList);
    CHECK_THROWS_AS(parse_graph_format("graphml"), InvalidInput);
}

TEST_CASE("edge list write/read round trip") {
    const GraphCSR g = generate_graph(ErdosRenyi{80, 0.02}, 4);
    std::stringstream buf;
    write_edgelist(buf, g);
    const LoadedGraph back = read_edgelist(buf);
    CHECK(back.graph.n() == g.n());
    CHECK(std::ranges::equal(back.graph.col_idx(), g.col_idx()));
}

TEST_CASE("histogram CSV and JSON") {
    SpectralHistogram h;
    h.edges = {-1.0, 0.0, 1.0};
    h.masses = {0.25, 0.75};
    const std::string csv = histogram_to_csv(h);
    CHECK(csv.rfind("bin_lo,bin_hi,mass\n", 0) == 0);
    CHECK(csv.find("-1,0,0.25\n") != std::string::npos);
    CHECK(csv.find("0,1,0.75\n") != std::string::npos);
    const SpectralHistogram back = histogram_from_json(histogram_to_json(h));
    CHECK(back.edges == h.edges);
    CHECK(back.masses == h.masses);
}

TEST_CASE("moments JSON round trip is exact") {
    const GraphCSR g = generate_graph(ErdosRenyi{60, 0.08}, 2);
    const SparseOperator op = build_operator(g, OperatorKind::Laplacian);
    const ScaledOperator sop = rescale_operator(op, estimate_spectral_range(op));
    for (const bool per_node : {false, true}) {
        const ProbeMatrix z = make_probes(g.n(), 7, ProbeKind::Gaussian, 3);
        const ChebMoments c = per_node ? pdos_moments(sop, z, 12) : dos_moments(sop, z, 12);
        const std::string text = dump_json(moments_to_json(c, {.op = OperatorKind::Laplacian, .node_ids = {}}));
        const ChebMoments back = moments_from_json(nlohmann::json::parse(text));
        CHECK(back.mode == c.mode);
        CHECK(back.values == c.values);
        CHECK(back.map.shift == c.map.shift);
        CHECK(back.map.scale == c.map.scale);
        CHECK(back.probes.seed == 3);
        CHECK(dump_json(moments_to_json(back, {.op = OperatorKind::Laplacian, .node_ids = {}})) == text);
        nlohmann::json wrapped;
        wrapped["moments"] = nlohmann::json::parse(text);
        CHECK(moments_from_json(wrapped).values == c.values);
    }
    CHECK_THROWS_AS(moments_from_json(nlohmann::json::parse(R"({"M": 3})")), InvalidInput);
}

TEST_CASE("custom motifs from JSON use file ids") {
    const std::vector<std::int64_t> ids{10, 20, 30};
    const auto doc = nlohmann::json::parse(R"([{"eigenvalue": 0.5, "eigvecs": [{"10": 0.6, "30": 0.8}]}])");
    const auto motifs = custom_motifs_from_json(doc, ids);
    REQUIRE(motifs.size() == 1);
    CHECK(motifs[0].kind == MotifKind::Custom);
    CHECK(*motifs[0].eigenvalue == 0.5);
    CHECK(motifs[0].nodes == std::vector<std::size_t>{0, 2});
    const auto unknown = nlohmann::json::parse(R"([{"eigenvalue": 0, "eigvecs": [{"40": 1}]}])");
    CHECK_THROWS_AS(custom_motifs_from_json(unknown, ids), InvalidInput);
}

TEST_CASE("CLI exit codes") {
    TempDir dir;
    CHECK(run({"--help"}) == 0);
    CHECK(run({"dos"}) == 2);
    CHECK(run({"dos", "-i", dir.file("missing.txt")}) == 1);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"generate", "--model", "er", "--n", "50", "--p", "2", "-o", dir.file("g.txt")}) == 1);
    spit(dir.file("bad.txt"), "0 1\n1 two\n");
    CHECK(run({"dos", "-i", dir.file("bad.txt")}) == 1);
}

TEST_CASE("CLI pipeline") {
    TempDir dir;
    const std::string graph = dir.file("er.txt");
    REQUIRE(run({"generate", "--model", "er", "--n", "500", "--p", "0.02", "--seed", "5", "-o", graph}) == 0);
    const LoadedGraph loaded = parse_graph_file(graph, GraphFormat::EdgeList);
    CHECK(loaded.graph.n() == 500);

    REQUIRE(run({"dos", "-i", graph, "--moments", "300", "--probes", "60", "--bins", "40", "-o", dir.file("dos.json")}) == 0);
    REQUIRE(run({"exact", "-i", graph, "--bins", "40", "-o", dir.file("exact.json")}) == 0);
    const auto kpm = histogram_from_json(load(dir.file("dos.json"))["histogram"]);
    const auto oracle = histogram_from_json(load(dir.file("exact.json"))["histogram"]);
    CHECK(l1_distance(kpm, oracle) < 0.05);

    SUBCASE("reruns are byte-identical") {
        REQUIRE(run({"dos", "-i", graph, "--moments", "300", "--probes", "60", "--bins", "40", "-o", dir.file("again.json")}) == 0);
        CHECK(slurp(dir.file("dos.json")) == slurp(dir.file("again.json")));
        REQUIRE(run({"dos", "-i", graph, "--moments", "300", "--probes", "60", "--bins", "40", "--threads", "1", "-o",
                     dir.file("serial.json")}) == 0);
        CHECK(slurp(dir.file("dos.json")) == slurp(dir.file("serial.json")));
    }
    SUBCASE("hist rebins saved moments") {
        REQUIRE(run({"hist", "-i", dir.file("dos.json"), "--bins", "40", "-o", dir.file("re.json")}) == 0);
        const auto re = histogram_from_json(load(dir.file("re.json"))["histogram"]);
        CHECK(l1_distance(re, kpm) < 1e-12);
        REQUIRE(run({"hist", "-i", dir.file("dos.json"), "--bins", "4", "--out-format", "csv", "-o", dir.file("re.csv")}) == 0);
        CHECK(slurp(dir.file("re.csv")).rfind("bin_lo,bin_hi,mass\n", 0) == 0);
    }
    SUBCASE("nd-pdos agrees with basis-probe pdos") {
        REQUIRE(run({"nd-pdos", "-i", graph, "--moments", "20", "--leaf-size", "32", "--write-partition", dir.file("tree.txt"),
                     "-o", dir.file("nd.json")}) == 0);
        REQUIRE(run({"pdos", "-i", graph, "--moments", "20", "--probe-kind", "basis", "--probes", "500", "-o",
                     dir.file("basis.json")}) == 0);
        const auto a = moments_from_json(load(dir.file("nd.json")));
        const auto b = moments_from_json(load(dir.file("basis.json")));
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
        REQUIRE(run({"nd-pdos", "-i", graph, "--moments", "20", "--partition", dir.file("tree.txt"), "-o", dir.file("nd2.json")}) == 0);
        CHECK(load(dir.file("nd2.json"))["moments"] == load(dir.file("nd.json"))["moments"]);
    }
    SUBCASE("gql") {
        REQUIRE(run({"gql", "-i", graph, "--steps", "30", "--bins", "40", "-o", dir.file("gql.json")}) == 0);
        const auto doc = load(dir.file("gql.json"));
        CHECK(histogram_from_json(doc["histogram"]).total() == doctest::Approx(1.0));
        REQUIRE(run({"gql", "-i", graph, "--steps", "10", "--node", "3", "-o", dir.file("gql_node.json")}) == 0);
    }
}

TEST_CASE("CLI motifs on a star keep file ids") {
    TempDir dir;
    spit(dir.file("star.txt"), "7 1\n7 2\n7 3\n7 4\n");
    REQUIRE(run({"motifs", "-i", dir.file("star.txt"), "-o", dir.file("m.json")}) == 0);
    const auto doc = load(dir.file("m.json"));
    REQUIRE(doc["motifs"].size() == 1);
    CHECK(doc["motifs"][0]["kind"] == "open-twin");
    CHECK(doc["motifs"][0]["nodes"] == nlohmann::json::array({1, 2, 3, 4}));
    CHECK(doc["motifs"][0]["multiplicity"] == 3);
    CHECK(doc["motifs"][0]["eigenvalue"] == 0.0);

    REQUIRE(run({"dos", "-i", dir.file("star.txt"), "--moments", "30", "--probes", "4", "--filter-motifs", "all", "-o", dir.file("f.json")}) == 0);
    CHECK(load(dir.file("f.json"))["filter"]["removed"] == 3);
}
