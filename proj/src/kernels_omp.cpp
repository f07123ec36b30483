#include "netdos/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace netdos::kernels {

namespace {

// Row-dependent accumulation order matches the serial reference exactly, so
// spmm and chebyshev_step are bitwise equal to it.
inline void row_product(const std::size_t* rp, const std::size_t* ci, const double* va, const double* x,
                        std::size_t i, std::size_t width, double* acc) {
    std::fill(acc, acc + width, 0.0);
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
        const double v = va[p];
        const double* xj = x + ci[p] * width;
        for (std::size_t c = 0; c < width; ++c) acc[c] += v * xj[c];
    }
}

} // namespace

void set_num_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int num_threads() { return omp_get_max_threads(); }

void spmm(const SparseOperator& a, std::span<const double> x, std::span<double> y, std::size_t width) {
    const std::size_t* rp = a.row_ptr().data();
    const std::size_t* ci = a.col_idx().data();
    const double* va = a.values().data();
    const auto n = static_cast<std::int64_t>(a.dim());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        row_product(rp, ci, va, x.data(), static_cast<std::size_t>(i), width,
                    y.data() + static_cast<std::size_t>(i) * width);
    }
}

void chebyshev_step(const SparseOperator& a, std::span<const double> cur, std::span<double> prev,
                    std::size_t width) {
    const std::size_t* rp = a.row_ptr().data();
    const std::size_t* ci = a.col_idx().data();
    const double* va = a.values().data();
    const auto n = static_cast<std::int64_t>(a.dim());
#pragma omp parallel
    {
        std::vector<double> acc(width);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(i);
            row_product(rp, ci, va, cur.data(), row, width, acc.data());
            double* pi = prev.data() + row * width;
            for (std::size_t c = 0; c < width; ++c) pi[c] = 2.0 * acc[c] - pi[c];
        }
    }
}

void column_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                 std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (width == 0) return;
    const std::size_t rows = x.size() / width;
    const std::size_t blocks = (rows + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(blocks * width, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const auto blk = static_cast<std::size_t>(b);
        double* acc = partial.data() + blk * width;
        const std::size_t end = std::min(rows, (blk + 1) * kReductionBlock);
        for (std::size_t i = blk * kReductionBlock; i < end; ++i) {
            for (std::size_t c = 0; c < width; ++c) acc[c] += x[i * width + c] * y[i * width + c];
        }
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t c = 0; c < width; ++c) out[c] += partial[b * width + c];
    }
}

void accumulate_row_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                         std::span<double> out) {
    const auto rows = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        const auto i = static_cast<std::size_t>(r);
        double s = 0.0;
        for (std::size_t c = 0; c < width; ++c) s += x[i * width + c] * y[i * width + c];
        out[i] += s;
    }
}

} // namespace netdos::kernels
