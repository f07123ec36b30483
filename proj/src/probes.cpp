#include "netdos/probes.hpp"

#include "netdos/error.hpp"
#include "netdos/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace netdos {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kRowStride = 0xD1B54A32D192ED03ULL;

std::uint64_t column_key(std::uint64_t seed, std::size_t j) noexcept {
    return mix64(seed ^ mix64(kGolden * (static_cast<std::uint64_t>(j) + 1)));
}

std::uint64_t entry_bits(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + kRowStride * (counter + 1));
}

double row_sign(std::uint64_t seed, std::size_t i) noexcept {
    const std::uint64_t key = mix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    return (entry_bits(key, i) >> 63) != 0 ? -1.0 : 1.0;
}

} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::string_view to_string(ProbeKind kind) noexcept {
    switch (kind) {
    case ProbeKind::Gaussian: return "gaussian";
    case ProbeKind::Rademacher: return "rademacher";
    case ProbeKind::HadamardSigned: return "hadamard";
    case ProbeKind::StandardBasis: return "basis";
    }
    return "unknown";
}

ProbeKind parse_probe_kind(std::string_view name) {
    if (name == "gaussian") return ProbeKind::Gaussian;
    if (name == "rademacher") return ProbeKind::Rademacher;
    if (name == "hadamard") return ProbeKind::HadamardSigned;
    if (name == "basis" || name == "standard-basis") return ProbeKind::StandardBasis;
    throw InvalidInput("unknown probe kind '" + std::string(name) + "'");
}

ProbeMatrix::ProbeMatrix(std::size_t n, std::size_t nz, ProbeKind kind, std::uint64_t seed,
                         std::vector<double> values, bool projected)
    : n_(n), nz_(nz), kind_(kind), seed_(seed), projected_(projected), values_(std::move(values)) {
    if (values_.size() != n_ * nz_) throw InvalidInput("ProbeMatrix: value count does not match n * nz");
}

void ProbeMatrix::gather_rows(std::size_t first, std::size_t width, std::span<double> block) const {
    for (std::size_t c = 0; c < width; ++c) {
        const double* col = values_.data() + (first + c) * n_;
        for (std::size_t i = 0; i < n_; ++i) block[i * width + c] = col[i];
    }
}

ProbeMatrix make_probes(std::size_t n, std::size_t nz, ProbeKind kind, std::uint64_t seed) {
    if (nz < 1) throw InvalidInput("make_probes: need at least one probe");
    if (kind == ProbeKind::StandardBasis && nz > n) {
        throw InvalidInput("make_probes: " + std::to_string(nz) + " standard-basis probes exceed dimension " +
                           std::to_string(n));
    }
    const std::size_t order = n == 0 ? 1 : std::bit_ceil(n);
    if (kind == ProbeKind::HadamardSigned && nz > order) {
        throw InvalidInput("make_probes: Hadamard order " + std::to_string(order) + " has fewer than " +
                           std::to_string(nz) + " columns");
    }

    std::vector<double> values(n * nz, 0.0);
    std::vector<double> signs;
    if (kind == ProbeKind::HadamardSigned) {
        signs.resize(n);
        for (std::size_t i = 0; i < n; ++i) signs[i] = row_sign(seed, i);
    }
    const auto columns = static_cast<std::int64_t>(nz);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < columns; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double* col = values.data() + j * n;
        const std::uint64_t key = column_key(seed, j);
        switch (kind) {
        case ProbeKind::Gaussian:
            for (std::size_t i = 0; i < n; ++i) {
                const double u1 = 1.0 - to_unit(entry_bits(key, 2 * i));
                const double u2 = to_unit(entry_bits(key, 2 * i + 1));
                col[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            }
            break;
        case ProbeKind::Rademacher:
            for (std::size_t i = 0; i < n; ++i) col[i] = (entry_bits(key, i) >> 63) != 0 ? -1.0 : 1.0;
            break;
        case ProbeKind::HadamardSigned:
            for (std::size_t i = 0; i < n; ++i) {
                const bool odd = (std::popcount(static_cast<std::uint64_t>(i & j)) & 1) != 0;
                col[i] = odd ? -signs[i] : signs[i];
            }
            break;
        case ProbeKind::StandardBasis:
            col[j] = 1.0;
            break;
        }
    }
    return ProbeMatrix(n, nz, kind, seed, std::move(values));
}

double estimate_trace(const SparseOperator& op, const ProbeMatrix& probes) {
    if (probes.n() != op.dim()) throw InvalidInput("estimate_trace: probe length does not match operator");
    const std::size_t n = op.dim();
    std::vector<double> z;
    std::vector<double> hz;
    std::vector<double> dots;
    double total = 0.0;
    for (std::size_t first = 0; first < probes.nz(); first += 32) {
        const std::size_t w = std::min<std::size_t>(32, probes.nz() - first);
        z.resize(n * w);
        hz.resize(n * w);
        dots.resize(w);
        probes.gather_rows(first, w, z);
        kernels::spmm(op, z, hz, w);
        kernels::column_dots(z, hz, w, dots);
        for (const double d : dots) total += d;
    }
    // Basis probes sample diagonal entries, so each one stands for n/nz of them.
    if (probes.kind() == ProbeKind::StandardBasis) return total * static_cast<double>(n) / static_cast<double>(probes.nz());
    return total / static_cast<double>(probes.nz());
}

std::vector<double> estimate_diagonal(const SparseOperator& op, const ProbeMatrix& probes, DiagonalScaling scaling) {
    if (probes.n() != op.dim()) throw InvalidInput("estimate_diagonal: probe length does not match operator");
    const std::size_t n = op.dim();
    std::vector<double> num(n, 0.0);
    std::vector<double> den(n, 0.0);
    std::vector<double> z;
    std::vector<double> hz;
    for (std::size_t first = 0; first < probes.nz(); first += 32) {
        const std::size_t w = std::min<std::size_t>(32, probes.nz() - first);
        z.resize(n * w);
        hz.resize(n * w);
        probes.gather_rows(first, w, z);
        kernels::spmm(op, z, hz, w);
        kernels::accumulate_row_dots(z, hz, w, num);
        kernels::accumulate_row_dots(z, z, w, den);
    }
    if (scaling == DiagonalScaling::Raw) {
        for (double& v : num) v /= static_cast<double>(probes.nz());
        return num;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (den[i] == 0.0) {
            throw NumericalError("estimate_diagonal: probes vanish on node " + std::to_string(i), i);
        }
        num[i] /= den[i];
    }
    return num;
}

} // namespace netdos
