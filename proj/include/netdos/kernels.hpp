#pragma once

// Sparse kernels behind the moment recurrences. Blocks are row-major
// n-by-width arrays, so one CSR sweep updates every probe column of a row.
//
// The default versions are OpenMP-parallel over rows. Reductions run over a
// fixed row blocking and are summed in block order, so results do not depend
// on the thread count. kernels::serial holds straightforward reference
// versions kept for testing and benchmarking.

#include "netdos/sparse_operator.hpp"

#include <cstddef>
#include <span>

namespace netdos::kernels {

/// Rows per reduction block.
inline constexpr std::size_t kReductionBlock = 2048;

/// y = A x.
void spmm(const SparseOperator& a, std::span<const double> x, std::span<double> y, std::size_t width);

/// In place: prev <- 2 A cur - prev (one Chebyshev step T_{m+1} = 2 H T_m - T_{m-1}).
void chebyshev_step(const SparseOperator& a, std::span<const double> cur, std::span<double> prev,
                    std::size_t width);

/// out[c] = sum_i x[i, c] * y[i, c].
void column_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                 std::span<double> out);

/// out[i] += sum_c x[i, c] * y[i, c].
void accumulate_row_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                         std::span<double> out);

/// Sets the OpenMP team size used by the parallel kernels (0 = runtime default).
void set_num_threads(int threads);
int num_threads();

namespace serial {

void spmm(const SparseOperator& a, std::span<const double> x, std::span<double> y, std::size_t width);
void chebyshev_step(const SparseOperator& a, std::span<const double> cur, std::span<double> prev,
                    std::size_t width);
void column_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                 std::span<double> out);
void accumulate_row_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                         std::span<double> out);

} // namespace serial

} // namespace netdos::kernels
