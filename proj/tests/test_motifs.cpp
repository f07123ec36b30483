#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdos/chebyshev.hpp"
#include "netdos/error.hpp"
#include "netdos/motifs.hpp"
#include "netdos/testkit.hpp"
#include "support.hpp"

#include <algorithm>
#include <random>

using namespace netdos;

namespace {

const std::set<MotifKind> kBuiltin{MotifKind::OpenTwinClass, MotifKind::ClosedTwinClass, MotifKind::DanglingTwoChain};

Eigen::VectorXd densify(const SparseVector& v, std::size_t n) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (const auto& [i, value] : v) x(static_cast<Eigen::Index>(i)) = value;
    return x;
}

/// ||H u - lambda u|| for every eigenvector, against the dense matrix.
double dense_residual(const MotifInstance& inst, const SparseOperator& op) {
    const Eigen::MatrixXd h = to_dense(op);
    double worst = 0.0;
    for (const auto& u : inst.eigvecs) {
        const Eigen::VectorXd x = densify(u, op.dim());
        worst = std::max(worst, (h * x - *inst.eigenvalue * x).norm());
    }
    return worst;
}

/// Random graph with planted motifs: pendant pairs, closed-twin pairs and
/// dangling chains hung off random nodes.
GraphCSR planted(std::mt19937_64& rng, int base, int motifs) {
    const GraphCSR g0 = support::random_graph(rng, base, base, 4.0);
    std::vector<std::pair<int, int>> e;
    for (std::size_t i = 0; i < g0.n(); ++i)
        for (const std::size_t j : g0.neighbors(i))
            if (i < j) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
    int next = base;
    for (int k = 0; k < motifs; ++k) {
        const int anchor = static_cast<int>(rng() % static_cast<std::uint64_t>(base));
        switch (k % 3) {
        case 0: // two pendants
            e.emplace_back(anchor, next);
            e.emplace_back(anchor, next + 1);
            next += 2;
            break;
        case 1: // triangle hanging off the anchor
            e.emplace_back(anchor, next);
            e.emplace_back(anchor, next + 1);
            e.emplace_back(next, next + 1);
            next += 2;
            break;
        default: // two leaf-middle chains
            e.emplace_back(anchor, next);
            e.emplace_back(next, next + 1);
            e.emplace_back(anchor, next + 2);
            e.emplace_back(next + 2, next + 3);
            next += 4;
            break;
        }
    }
    return support::from_pairs(e, static_cast<std::size_t>(next));
}

const MotifInstance* find_kind(const std::vector<MotifInstance>& list, MotifKind kind) {
    for (const auto& m : list)
        if (m.kind == kind) return &m;
    return nullptr;
}

} // namespace

TEST_CASE("star K_{1,3} has one open-twin class") {
    const GraphCSR g = support::star(3);
    const auto found = detect_motifs(g, kBuiltin, 1);
    REQUIRE(found.size() == 1);
    CHECK(found[0].kind == MotifKind::OpenTwinClass);
    CHECK(found[0].nodes == std::vector<std::size_t>{1, 2, 3});
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const auto bound = bind_motifs(found, op);
    REQUIRE(bound.size() == 1);
    CHECK(*bound[0].eigenvalue == 0.0);
    CHECK(bound[0].multiplicity() == 2);
    CHECK(dense_residual(bound[0], op) <= 1e-10);
}

TEST_CASE("two pendants on one node") {
    const GraphCSR g = support::from_pairs({{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {3, 5}});
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const auto bound = bind_motifs(detect_motifs(g, {MotifKind::OpenTwinClass}, 2), op);
    REQUIRE(bound.size() == 1);
    CHECK(bound[0].nodes == std::vector<std::size_t>{4, 5});
    CHECK(*bound[0].eigenvalue == 0.0);
    REQUIRE(bound[0].eigvecs.size() == 1);
    const auto& u = bound[0].eigvecs[0];
    REQUIRE(u.size() == 2);
    CHECK(std::abs(u[0].second) == doctest::Approx(std::sqrt(0.5)));
    CHECK(u[0].second == doctest::Approx(-u[1].second));
}

TEST_CASE("triangle with a pendant pair is a closed-twin class at -1/2") {
    const GraphCSR g = support::from_pairs({{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {0, 5}, {4, 5}});
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const auto bound = bind_motifs(detect_motifs(g, {MotifKind::ClosedTwinClass}, 3), op);
    REQUIRE(bound.size() == 1);
    CHECK(bound[0].nodes == std::vector<std::size_t>{4, 5});
    CHECK(*bound[0].eigenvalue == doctest::Approx(-0.5));
    CHECK(dense_residual(bound[0], op) <= 1e-10);
    // The oracle spectrum really contains -1/2.
    const auto ev = exact_spectrum(op).eigenvalues;
    CHECK(std::any_of(ev.begin(), ev.end(), [](double x) { return std::abs(x + 0.5) < 1e-10; }));
}

TEST_CASE("twin classes give orthonormal zero-sum vectors") {
    for (const int size : {2, 3, 5}) {
        const GraphCSR g = support::star(size);
        const SparseOperator op = build_operator(g, OperatorKind::Adjacency);
        const auto bound = bind_motifs(detect_motifs(g, {MotifKind::OpenTwinClass}, 0), op);
        REQUIRE(bound.size() == 1);
        const auto& vecs = bound[0].eigvecs;
        REQUIRE(vecs.size() == static_cast<std::size_t>(size - 1));
        for (std::size_t a = 0; a < vecs.size(); ++a) {
            const Eigen::VectorXd x = densify(vecs[a], g.n());
            CHECK(std::abs(x.sum()) < 1e-14);
            CHECK(x(0) == 0.0);
            for (std::size_t b = 0; b < vecs.size(); ++b) {
                const double d = x.dot(densify(vecs[b], g.n()));
                CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) < 1e-14);
            }
        }
        if (size == 2) {
            CHECK(vecs[0].size() == 2);
            CHECK(std::abs(vecs[0][0].second) == doctest::Approx(std::sqrt(0.5)));
        }
    }
}

TEST_CASE("dangling chains carry +-1/sqrt(2) under the normalized adjacency") {
    // Anchor 0 in a small core, chains 0-3-4 and 0-5-6.
    const GraphCSR g = support::from_pairs({{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {0, 5}, {5, 6}});
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const auto found = detect_motifs(g, {MotifKind::DanglingTwoChain}, 0);
    REQUIRE(found.size() == 1);
    CHECK(*found[0].anchor == 0);
    const auto bound = bind_motifs(found, op);
    REQUIRE(bound.size() == 2);
    const double r = std::sqrt(0.5);
    CHECK(*bound[0].eigenvalue == doctest::Approx(-r));
    CHECK(*bound[1].eigenvalue == doctest::Approx(r));
    for (const auto& inst : bound) {
        CHECK(inst.multiplicity() == 1);
        CHECK(dense_residual(inst, op) <= 1e-10);
        CHECK(motif_residual(inst, op) <= 1e-10);
        // Leaf and middle entries have equal magnitude 1/2 on each chain.
        for (const auto& [i, v] : inst.eigvecs[0]) CHECK(std::abs(v) == doctest::Approx(0.5));
    }
    // The same chains under the Laplacian use the 2x2 block eigenpairs.
    const SparseOperator lap = build_operator(g, OperatorKind::Laplacian);
    for (const auto& inst : bind_motifs(found, lap)) CHECK(dense_residual(inst, lap) <= 1e-10);
}

TEST_CASE("an instance that breaks the operator's symmetry is rejected") {
    const GraphCSR g = support::path(4);
    MotifInstance fake;
    fake.kind = MotifKind::OpenTwinClass;
    fake.nodes = {0, 2};
    fake.groups = {{0}, {2}};
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    try {
        motif_eigenvectors(fake, op);
        FAIL("accepted");
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        CHECK(msg.find("open-twin") != std::string::npos);
        CHECK(msg.find("normalized-adjacency") != std::string::npos);
    }
}

TEST_CASE("filter_probes") {
    SUBCASE("projected probes are orthogonal to the motif") {
        const GraphCSR g = support::star(2);
        const auto bound = bind_motifs(detect_motifs(g, kBuiltin, 0), build_operator(g, OperatorKind::NormalizedAdjacency));
        const ProbeMatrix z = make_probes(3, 6, ProbeKind::Gaussian, 4);
        const auto [zr, adj] = filter_probes(z, bound);
        CHECK(zr.projected());
        CHECK(adj.removed == 1);
        CHECK(adj.multiplicity.at(0.0) == 1);
        for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(zr.column(j)[1] - zr.column(j)[2]) < 1e-15);
    }
    SUBCASE("no instances leave the probes unchanged") {
        const ProbeMatrix z = make_probes(10, 3, ProbeKind::Rademacher, 4);
        const auto [zr, adj] = filter_probes(z, {});
        CHECK(adj.removed == 0);
        CHECK(std::equal(z.values().begin(), z.values().end(), zr.values().begin()));
    }
    SUBCASE("structured projection matches the explicit one") {
        std::mt19937_64 rng(3);
        const GraphCSR g = planted(rng, 60, 12);
        const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
        const auto bound = bind_motifs(detect_motifs(g, kBuiltin, 1), op);
        std::vector<MotifInstance> custom;
        for (auto inst : bound) {
            inst.kind = MotifKind::Custom;
            inst.pattern.clear();
            custom.push_back(inst);
        }
        const ProbeMatrix z = make_probes(g.n(), 5, ProbeKind::Gaussian, 8);
        const auto a = filter_probes(z, bound).first;
        const auto b = filter_probes(z, custom).first;
        for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(std::abs(a.values()[i] - b.values()[i]) < 1e-13);
    }
    SUBCASE("non-orthonormal custom vectors are rejected") {
        MotifInstance bad;
        bad.kind = MotifKind::Custom;
        bad.nodes = {0, 1};
        bad.eigenvalue = 0.0;
        bad.eigvecs = {{{0, 1.0}, {1, 1.0}}};
        CHECK_THROWS_AS(filter_probes(make_probes(3, 1, ProbeKind::Gaussian, 0), std::vector<MotifInstance>{bad}), NumericalError);
    }
}

TEST_CASE("star K_{1,3}: filtered exact moments remove the zero eigenvalues") {
    const GraphCSR g = support::star(3);
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const ScaledOperator sop = rescale_operator(op, estimate_spectral_range(op));
    const auto bound = bind_motifs(detect_motifs(g, {MotifKind::OpenTwinClass}, 0), op);
    const ProbeMatrix exact = make_probes(4, 4, ProbeKind::StandardBasis, 0);
    const auto full = dos_moments(sop, exact, 20);
    const auto filtered = filtered_dos_moments(sop, exact, bound, 20);
    const double x0 = sop.map.to_scaled(0.0);
    for (std::size_t m = 0; m <= 20; ++m) {
        const double want = (4.0 * full.global(m) - 2.0 * support::cheb(m, x0)) / 2.0;
        CHECK(std::abs(filtered.global(m) - want) < 1e-12);
    }
}

TEST_CASE("trace decomposition on planted graphs") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        const GraphCSR g = planted(rng, 40 + static_cast<int>(rng() % 150), 3 + static_cast<int>(rng() % 15));
        for (const OperatorKind kind : {OperatorKind::NormalizedAdjacency, OperatorKind::Laplacian}) {
            const SparseOperator op = build_operator(g, kind);
            const ScaledOperator sop = rescale_operator(op, estimate_spectral_range(op, {.seed = 1}));
            const auto bound = bind_motifs(detect_motifs(g, kBuiltin, rng()), op);
            for (const auto& inst : bound) CHECK(motif_residual(inst, op) <= 1e-10);
            const ProbeMatrix exact = make_probes(g.n(), g.n(), ProbeKind::StandardBasis, 0);
            const auto full = dos_moments(sop, exact, 50);
            const auto filtered = filtered_dos_moments(sop, exact, bound, 50);
            REQUIRE(filtered.filter);
            const auto& adj = *filtered.filter;
            const double n = static_cast<double>(g.n());
            const double r = static_cast<double>(adj.removed);
            for (std::size_t m = 0; m <= 50; ++m) {
                double spikes = 0.0;
                for (const auto& [lambda, count] : adj.multiplicity) {
                    spikes += static_cast<double>(count) * support::cheb(m, sop.map.to_scaled(lambda));
                }
                CHECK(std::abs(n * full.global(m) - ((n - r) * filtered.global(m) + spikes)) <= 1e-8);
            }
        }
    }
}

TEST_CASE("detected twins are exact and planted pairs are found") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const GraphCSR base = support::random_graph(rng, 20, 200, 4.0);
        const std::size_t n = base.n();
        const std::size_t v = rng() % n;
        std::vector<std::pair<int, int>> e;
        for (std::size_t i = 0; i < n; ++i)
            for (const std::size_t j : base.neighbors(i))
                if (i < j) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
        for (const std::size_t j : base.neighbors(v)) e.emplace_back(static_cast<int>(n), static_cast<int>(j));
        const GraphCSR g = support::from_pairs(e, n + 1);
        const auto found = detect_motifs(g, {MotifKind::OpenTwinClass}, rng());
        bool planted_found = false;
        std::vector<bool> seen(g.n(), false);
        for (const auto& inst : found) {
            for (const std::size_t a : inst.nodes) {
                CHECK_FALSE(seen[a]);
                seen[a] = true;
                const auto na = g.neighbors(a);
                const auto nb = g.neighbors(inst.nodes.front());
                CHECK(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
            }
            if (std::binary_search(inst.nodes.begin(), inst.nodes.end(), v) &&
                std::binary_search(inst.nodes.begin(), inst.nodes.end(), n)) {
                planted_found = true;
            }
        }
        CHECK(planted_found);
    }
}

TEST_CASE("weighted twins need equal weights") {
    std::vector<Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 2.0}, {0, 4, 5.0}, {4, 5, 1.0}};
    const GraphCSR g = build_csr(edges);
    const auto found = detect_motifs(g, {MotifKind::OpenTwinClass}, 0);
    REQUIRE(found.size() == 1);
    CHECK(found[0].nodes == std::vector<std::size_t>{1, 2});
}

TEST_CASE("filtering improves the histogram on a graph with spikes") {
    const GraphCSR g = generate_graph(PreferentialAttachment{1500, 1}, 3);
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    const ScaledOperator sop = rescale_operator(op, estimate_spectral_range(op));
    const ProbeMatrix z = make_probes(g.n(), 20, ProbeKind::HadamardSigned, 3);
    const auto bound = bind_motifs(detect_motifs(g, kBuiltin, 3), op);
    CHECK(find_kind(bound, MotifKind::OpenTwinClass) != nullptr);
    const auto oracle = exact_histogram(exact_spectrum(op), BinEdges(-1.0, 1.0, 50));
    const double plain = l1_distance(histogram_from_moments(dos_moments(sop, z, 100)), oracle);
    const double filtered = l1_distance(histogram_from_moments(filtered_dos_moments(sop, z, bound, 100)), oracle);
    CHECK(filtered <= plain);
}

TEST_CASE("motif kind names round-trip") {
    for (const MotifKind k : {MotifKind::OpenTwinClass, MotifKind::ClosedTwinClass, MotifKind::DanglingTwoChain, MotifKind::Custom}) {
        CHECK(parse_motif_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_motif_kind("double-path"), InvalidInput);
}
