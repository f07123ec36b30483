// Times the OpenMP kernels against the serial reference on a generated graph.
//
//   bench_kernels [n] [avg_degree] [width] [reps]

#include "netdos/chebyshev.hpp"
#include "netdos/kernels.hpp"
#include "netdos/probes.hpp"
#include "netdos/sparse_operator.hpp"
#include "netdos/testkit.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    fn();
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    using namespace netdos;
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    const double degree = argc > 2 ? std::strtod(argv[2], nullptr) : 10.0;
    const std::size_t width = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : kProbeBatch;
    const int reps = argc > 4 ? std::atoi(argv[4]) : 10;

    const GraphCSR g = generate_graph(ErdosRenyi{n, degree / static_cast<double>(n - 1)}, 1);
    const SparseOperator op = build_operator(g, OperatorKind::NormalizedAdjacency);
    std::vector<double> x(n * width);
    std::vector<double> y(n * width);
    std::vector<double> dots(width);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = to_unit(mix64(i)) - 0.5;

    std::printf("n=%zu edges=%zu width=%zu threads=%d\n", n, g.num_edges(), width, omp_get_max_threads());
    std::printf("%-16s %12s %12s %8s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup");
    const auto row = [&](const char* name, const std::function<void()>& serial, const std::function<void()>& par) {
        const double ts = seconds(serial, reps);
        const double tp = seconds(par, reps);
        std::printf("%-16s %12.3f %12.3f %8.2f\n", name, 1e3 * ts, 1e3 * tp, ts / tp);
    };
    row("spmm", [&] { kernels::serial::spmm(op, x, y, width); }, [&] { kernels::spmm(op, x, y, width); });
    row("chebyshev_step", [&] { kernels::serial::chebyshev_step(op, x, y, width); },
        [&] { kernels::chebyshev_step(op, x, y, width); });
    row("column_dots", [&] { kernels::serial::column_dots(x, y, width, dots); },
        [&] { kernels::column_dots(x, y, width, dots); });
    return 0;
}
