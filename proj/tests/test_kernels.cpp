#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdos/kernels.hpp"
#include "netdos/probes.hpp"
#include "netdos/sparse_operator.hpp"
#include "support.hpp"

#include <random>

using namespace netdos;

namespace {

std::vector<double> random_block(std::size_t n, std::size_t width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> x(n * width);
    for (double& v : x) v = gauss(rng);
    return x;
}

struct ThreadGuard {
    ~ThreadGuard() { kernels::set_num_threads(0); }
};

} // namespace

TEST_CASE("parallel spmm and chebyshev_step match the serial reference bit for bit") {
    ThreadGuard guard;
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const GraphCSR g = support::random_graph(rng, 1, 6000, 6.0);
        const SparseOperator op = build_operator(g, OperatorKind::NormalizedLaplacian);
        const std::size_t width = 1 + rng() % 40;
        const auto x = random_block(g.n(), width, rng());
        const auto prev0 = random_block(g.n(), width, rng());
        for (const int threads : {1, 3, 4}) {
            kernels::set_num_threads(threads);
            std::vector<double> y1(x.size()), y2(x.size());
            kernels::spmm(op, x, y1, width);
            kernels::serial::spmm(op, x, y2, width);
            CHECK(y1 == y2);
            auto p1 = prev0;
            auto p2 = prev0;
            kernels::chebyshev_step(op, x, p1, width);
            kernels::serial::chebyshev_step(op, x, p2, width);
            CHECK(p1 == p2);
        }
    }
}

TEST_CASE("reductions agree with the reference and do not depend on the thread count") {
    ThreadGuard guard;
    std::mt19937_64 rng(8);
    for (const std::size_t n : {std::size_t{1}, std::size_t{100}, std::size_t{2048}, std::size_t{2049}, std::size_t{20000}}) {
        const std::size_t width = 7;
        const auto x = random_block(n, width, rng());
        const auto y = random_block(n, width, rng());
        std::vector<double> ref(width), ref_rows(n, 0.5);
        kernels::serial::column_dots(x, y, width, ref);
        kernels::serial::accumulate_row_dots(x, y, width, ref_rows);

        std::vector<double> first;
        for (const int threads : {1, 2, 4}) {
            kernels::set_num_threads(threads);
            std::vector<double> dots(width), rows(n, 0.5);
            kernels::column_dots(x, y, width, dots);
            kernels::accumulate_row_dots(x, y, width, rows);
            if (first.empty()) first = dots;
            CHECK(dots == first);
            CHECK(rows == ref_rows);
            for (std::size_t c = 0; c < width; ++c) CHECK(dots[c] == doctest::Approx(ref[c]).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_block agrees with column-by-column apply") {
    const GraphCSR g = support::grid(7, 9);
    const SparseOperator op = build_operator(g, OperatorKind::Laplacian);
    const std::size_t n = g.n();
    const std::size_t width = 5;
    const auto x = random_block(n, width, 4);
    std::vector<double> y(n * width);
    op.apply_block(x, y, width);
    std::vector<double> col(n), out(n);
    for (std::size_t c = 0; c < width; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = x[i * width + c];
        op.apply(col, out);
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(y[i * width + c]).epsilon(1e-14));
    }
}
