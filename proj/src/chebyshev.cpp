#include "netdos/chebyshev.hpp"

#include "netdos/error.hpp"
#include "netdos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace netdos {

namespace {

// |z^T T_m(H~) z| <= ||z||^2 whenever the spectrum of H~ lies in [-1, 1].
constexpr double kDivergenceSlack = 1e-6;

ProbeMeta meta_for(const ProbeMatrix& probes) {
    ProbeMeta meta;
    meta.method = "kpm";
    meta.kind = probes.kind();
    meta.seed = probes.seed();
    meta.nz = probes.nz();
    meta.exact = probes.exact();
    return meta;
}

void check_inputs(const ScaledOperator& sop, const ProbeMatrix& probes, const char* who) {
    if (probes.n() != sop.matrix.dim()) {
        throw InvalidInput(std::string(who) + ": probe length " + std::to_string(probes.n()) +
                           " does not match operator dimension " + std::to_string(sop.matrix.dim()));
    }
}

[[noreturn]] void diverged(std::size_t m) {
    throw NumericalError("Chebyshev recurrence left [-1, 1]; the spectral range is too tight, increase the margin",
                         m);
}

// Drives the recurrence over probe batches: visit(first, width, z, t_m, m) is
// called for every degree m with t_m = T_m(H~) Z on the current batch.
template <typename Visit>
void run_recurrence(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t m_max, KpmStats* stats,
                    Visit&& visit) {
    const std::size_t n = sop.matrix.dim();
    const std::size_t batch = std::min(kProbeBatch, probes.nz());
    std::vector<double> z(n * batch);
    std::vector<double> prev(n * batch);
    std::vector<double> cur(n * batch);
    std::size_t applications = 0;

    for (std::size_t first = 0; first < probes.nz(); first += batch) {
        const std::size_t w = std::min(batch, probes.nz() - first);
        const std::span<double> zs(z.data(), n * w);
        std::span<double> ps(prev.data(), n * w);
        std::span<double> cs(cur.data(), n * w);
        probes.gather_rows(first, w, zs);
        std::copy(zs.begin(), zs.end(), ps.begin());
        visit(first, w, std::span<const double>(zs), std::span<const double>(ps), std::size_t{0});
        if (m_max == 0) continue;
        kernels::spmm(sop.matrix, zs, cs, w);
        ++applications;
        visit(first, w, std::span<const double>(zs), std::span<const double>(cs), std::size_t{1});
        for (std::size_t m = 2; m <= m_max; ++m) {
            kernels::chebyshev_step(sop.matrix, cs, ps, w);
            ++applications;
            std::swap(ps, cs);
            visit(first, w, std::span<const double>(zs), std::span<const double>(cs), m);
        }
    }
    if (stats != nullptr) {
        stats->workspace_doubles = 3 * n * batch;
        stats->operator_applications = applications;
    }
}

} // namespace

std::vector<double> ChebMoments::global_moments() const {
    if (mode == MomentMode::Global) return values;
    std::vector<double> d(m_max + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m <= m_max; ++m) d[m] += node(k, m);
    }
    for (double& v : d) v /= static_cast<double>(n);
    return d;
}

ChebMoments dos_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t m_max, KpmStats* stats) {
    check_inputs(sop, probes, "dos_moments");
    std::vector<double> acc(m_max + 1, 0.0);
    std::vector<double> dots(kProbeBatch);
    std::vector<double> column_norms(probes.nz(), 0.0);

    run_recurrence(sop, probes, m_max, stats,
                   [&](std::size_t first, std::size_t w, std::span<const double> z, std::span<const double> t,
                       std::size_t m) {
                       kernels::column_dots(z, t, w, std::span<double>(dots.data(), w));
                       for (std::size_t c = 0; c < w; ++c) {
                           if (m == 0) column_norms[first + c] = dots[c];
                           const double bound = (1.0 + kDivergenceSlack) * column_norms[first + c];
                           if (!std::isfinite(dots[c]) || std::abs(dots[c]) > bound) diverged(m);
                           acc[m] += dots[c];
                       }
                   });

    if (!(acc[0] > 0.0)) throw NumericalError("dos_moments: probes have zero norm", 0);
    ChebMoments out;
    out.mode = MomentMode::Global;
    out.m_max = m_max;
    out.n = sop.matrix.dim();
    out.values.resize(m_max + 1);
    for (std::size_t m = 0; m <= m_max; ++m) out.values[m] = acc[m] / acc[0];
    out.values[0] = 1.0;
    out.map = sop.map;
    out.range = sop.range;
    out.probes = meta_for(probes);
    return out;
}

ChebMoments pdos_moments(const ScaledOperator& sop, const ProbeMatrix& probes, std::size_t m_max, KpmStats* stats) {
    check_inputs(sop, probes, "pdos_moments");
    const std::size_t n = sop.matrix.dim();
    const std::size_t stride = m_max + 1;
    ChebMoments out;
    out.mode = MomentMode::PerNode;
    out.m_max = m_max;
    out.n = n;
    out.values.assign(n * stride, 0.0);
    std::vector<double> row(n);

    run_recurrence(sop, probes, m_max, stats,
                   [&](std::size_t, std::size_t w, std::span<const double> z, std::span<const double> t,
                       std::size_t m) {
                       std::fill(row.begin(), row.end(), 0.0);
                       kernels::accumulate_row_dots(z, t, w, row);
                       for (std::size_t k = 0; k < n; ++k) out.values[k * stride + m] += row[k];
                   });

    for (std::size_t k = 0; k < n; ++k) {
        const double den = out.values[k * stride];
        if (den == 0.0) throw NumericalError("pdos_moments: probes vanish on node " + std::to_string(k), k);
        for (std::size_t m = 0; m <= m_max; ++m) {
            double& v = out.values[k * stride + m];
            v /= den;
            if (!std::isfinite(v) || std::abs(v) > 1.0 + kDivergenceSlack) {
                // Normalized per-node estimates are not bounded by 1 for
                // random probes, only for exact ones.
                if (probes.exact() || !std::isfinite(v)) diverged(m);
            }
        }
        out.values[k * stride] = 1.0;
    }
    out.map = sop.map;
    out.range = sop.range;
    out.probes = meta_for(probes);
    return out;
}

std::vector<double> jackson_coefficients(std::size_t m_max) {
    std::vector<double> j(m_max + 1);
    const double np1 = static_cast<double>(m_max + 1);
    const double alpha = std::numbers::pi / np1;
    const double cot = m_max == 0 ? 0.0 : std::cos(alpha) / std::sin(alpha);
    j[0] = 1.0;
    for (std::size_t m = 1; m <= m_max; ++m) {
        const double md = static_cast<double>(m);
        j[m] = ((np1 - md) * std::cos(alpha * md) + std::sin(alpha * md) * cot) / np1;
    }
    return j;
}

double chebyshev_bin_integral(std::size_t m, double a, double b) noexcept {
    a = std::clamp(a, -1.0, 1.0);
    b = std::clamp(b, -1.0, 1.0);
    const double ta = std::acos(a);
    const double tb = std::acos(b);
    if (m == 0) return (ta - tb) / std::numbers::pi;
    const double md = static_cast<double>(m);
    return 2.0 / std::numbers::pi * (std::sin(md * ta) - std::sin(md * tb)) / md;
}

BinEdges histogram_edges(const ChebMoments& moments, const HistogramOptions& options) {
    const SpectralRange r = options.range.value_or(moments.range);
    return BinEdges(r.min, r.max, options.bins);
}

namespace {

// table[b * (M+1) + m] = integral of w T_m over bin b (scaled units).
std::vector<double> bin_table(const ChebMoments& moments, const BinEdges& edges) {
    const std::size_t stride = moments.m_max + 1;
    std::vector<double> table(edges.bins * stride);
    for (std::size_t b = 0; b < edges.bins; ++b) {
        const double a = moments.map.to_scaled(edges.edge(b));
        const double c = moments.map.to_scaled(edges.edge(b + 1));
        for (std::size_t m = 0; m <= moments.m_max; ++m) table[b * stride + m] = chebyshev_bin_integral(m, a, c);
    }
    return table;
}

SpectralHistogram series_histogram(std::span<const double> d, const std::vector<double>& table,
                                   const std::vector<double>& damping, const BinEdges& edges) {
    const std::size_t stride = d.size();
    SpectralHistogram h;
    h.edges = edges.edges();
    h.masses.assign(edges.bins, 0.0);
    for (std::size_t b = 0; b < edges.bins; ++b) {
        double s = 0.0;
        for (std::size_t m = 0; m < stride; ++m) s += damping[m] * d[m] * table[b * stride + m];
        h.masses[b] = s;
    }
    h.normalization = 1.0;
    return h;
}

std::vector<double> damping_for(const ChebMoments& moments, bool on) {
    if (on) return jackson_coefficients(moments.m_max);
    return std::vector<double>(moments.m_max + 1, 1.0);
}

} // namespace

SpectralHistogram histogram_from_moments(const ChebMoments& moments, const HistogramOptions& options) {
    const BinEdges edges = histogram_edges(moments, options);
    const auto table = bin_table(moments, edges);
    const auto damping = damping_for(moments, options.damping);
    const auto d = moments.global_moments();
    SpectralHistogram h = series_histogram(d, table, damping, edges);

    if (moments.filter && options.reinsert_spikes) {
        const auto& f = *moments.filter;
        const double n = static_cast<double>(moments.n);
        const double kept = (n - static_cast<double>(f.removed)) / n;
        for (double& m : h.masses) m *= kept;
        for (const auto& [lambda, count] : f.multiplicity) {
            if (const auto k = edges.index(lambda)) h.masses[*k] += static_cast<double>(count) / n;
        }
    }
    return h;
}

std::vector<SpectralHistogram> node_histograms(const ChebMoments& moments, const HistogramOptions& options) {
    if (moments.mode != MomentMode::PerNode) throw InvalidInput("node_histograms: moments are not per-node");
    const BinEdges edges = histogram_edges(moments, options);
    const auto table = bin_table(moments, edges);
    const auto damping = damping_for(moments, options.damping);
    std::vector<SpectralHistogram> out(moments.n);
    for (std::size_t k = 0; k < moments.n; ++k) out[k] = series_histogram(moments.node_row(k), table, damping, edges);
    return out;
}

double gaussian_kernel(double t) noexcept {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<double> evaluate_density(const SmoothedDensity& sd, std::span<const double> at) {
    if (!(sd.sigma > 0.0)) throw InvalidInput("evaluate_density: sigma must be positive");
    const ChebMoments& mom = sd.moments;
    const auto d = mom.global_moments();
    const auto damping = damping_for(mom, sd.damping);
    const double scale = mom.map.scale;

    std::size_t q = sd.quadrature_nodes;
    if (q == 0) {
        const auto resolve = static_cast<std::size_t>(std::ceil(10.0 * std::numbers::pi * scale / sd.sigma));
        q = std::max({std::size_t{512}, 2 * (mom.m_max + 1), resolve});
    }

    // Gauss-Chebyshev: integral of f(x) / sqrt(1 - x^2) ~ (pi / q) sum_k f(x_k).
    std::vector<double> nodes(q);
    std::vector<double> series(q);
    for (std::size_t k = 0; k < q; ++k) {
        const double theta = (static_cast<double>(k) + 0.5) * std::numbers::pi / static_cast<double>(q);
        const double x = std::cos(theta);
        nodes[k] = mom.map.to_original(x);
        double t_prev = 1.0;
        double t_cur = x;
        double g = damping[0] * d[0];
        for (std::size_t m = 1; m <= mom.m_max; ++m) {
            g += 2.0 * damping[m] * d[m] * t_cur;
            const double t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
        }
        series[k] = g;
    }

    double kept = 1.0;
    if (mom.filter) {
        const double n = static_cast<double>(mom.n);
        kept = (n - static_cast<double>(mom.filter->removed)) / n;
    }

    std::vector<double> out(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < q; ++k) s += gaussian_kernel((at[i] - nodes[k]) / sd.sigma) * series[k];
        double value = kept * s / (static_cast<double>(q) * sd.sigma);
        if (mom.filter) {
            for (const auto& [lambda, count] : mom.filter->multiplicity) {
                value += static_cast<double>(count) / static_cast<double>(mom.n) *
                         gaussian_kernel((at[i] - lambda) / sd.sigma) / sd.sigma;
            }
        }
        out[i] = value;
    }
    return out;
}

} // namespace netdos
