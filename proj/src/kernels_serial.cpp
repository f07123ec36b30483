#include "netdos/kernels.hpp"

#include <algorithm>

namespace netdos::kernels::serial {

void spmm(const SparseOperator& a, std::span<const double> x, std::span<double> y, std::size_t width) {
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double* yi = y.data() + i * width;
        std::fill(yi, yi + width, 0.0);
        for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
            const double* xj = x.data() + ci[p] * width;
            for (std::size_t c = 0; c < width; ++c) yi[c] += va[p] * xj[c];
        }
    }
}

void chebyshev_step(const SparseOperator& a, std::span<const double> cur, std::span<double> prev,
                    std::size_t width) {
    std::vector<double> hx(prev.size());
    spmm(a, cur, hx, width);
    for (std::size_t k = 0; k < prev.size(); ++k) prev[k] = 2.0 * hx[k] - prev[k];
}

void column_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                 std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t rows = width == 0 ? 0 : x.size() / width;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < width; ++c) out[c] += x[i * width + c] * y[i * width + c];
    }
}

void accumulate_row_dots(std::span<const double> x, std::span<const double> y, std::size_t width,
                         std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < width; ++c) s += x[i * width + c] * y[i * width + c];
        out[i] += s;
    }
}

} // namespace netdos::kernels::serial
