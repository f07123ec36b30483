#include "netdos/histogram.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netdos {

namespace {
constexpr double kEdgeSnap = 1e-9;
}

BinEdges::BinEdges(double lo_, double hi_, std::size_t bins_) : lo(lo_), hi(hi_), bins(bins_) {
    if (bins < 1) throw InvalidInput("histogram needs at least one bin");
    if (!(lo < hi)) throw InvalidInput("histogram range must satisfy lo < hi");
}

double BinEdges::edge(std::size_t k) const noexcept {
    if (k == bins) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
}

std::vector<double> BinEdges::edges() const {
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) e[k] = edge(k);
    return e;
}

std::optional<std::size_t> BinEdges::index(double lambda) const noexcept {
    if (!std::isfinite(lambda)) return std::nullopt;
    double t = (lambda - lo) / width();
    const double nearest = std::round(t);
    if (std::abs(t - nearest) <= kEdgeSnap) t = nearest;
    if (t < 0.0 || t > static_cast<double>(bins)) return std::nullopt;
    const auto k = static_cast<std::size_t>(std::floor(t));
    return std::min(k, bins - 1);
}

double SpectralHistogram::total() const noexcept {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

SpectralHistogram histogram_from_points(std::span<const double> points, std::span<const double> weights,
                                        const BinEdges& edges) {
    if (points.size() != weights.size()) throw InvalidInput("histogram_from_points: size mismatch");
    SpectralHistogram h;
    h.edges = edges.edges();
    h.masses.assign(edges.bins, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (const auto k = edges.index(points[i])) h.masses[*k] += weights[i];
    }
    h.normalization = std::accumulate(weights.begin(), weights.end(), 0.0);
    return h;
}

SpectralHistogram histogram_from_points(std::span<const double> points, const BinEdges& edges) {
    const std::vector<double> w(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()));
    auto h = histogram_from_points(points, w, edges);
    h.normalization = 1.0;
    return h;
}

double l1_distance(const SpectralHistogram& a, const SpectralHistogram& b) {
    if (a.masses.size() != b.masses.size()) throw InvalidInput("l1_distance: bin counts differ");
    for (std::size_t k = 0; k < a.edges.size() && k < b.edges.size(); ++k) {
        const double scale = std::max(1.0, std::abs(a.edges[k]));
        if (std::abs(a.edges[k] - b.edges[k]) > 1e-12 * scale) throw InvalidInput("l1_distance: bin edges differ");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < a.masses.size(); ++k) d += std::abs(a.masses[k] - b.masses[k]);
    return d;
}

std::vector<std::size_t> find_spikes(const SpectralHistogram& h, double ratio, double min_mass) {
    std::vector<std::size_t> spikes;
    const std::size_t b = h.masses.size();
    for (std::size_t k = 0; k < b; ++k) {
        const double m = h.masses[k];
        if (m < min_mass) continue;
        double neighbor = 0.0;
        if (k > 0) neighbor = std::max(neighbor, h.masses[k - 1]);
        if (k + 1 < b) neighbor = std::max(neighbor, h.masses[k + 1]);
        if (m > ratio * neighbor) spikes.push_back(k);
    }
    return spikes;
}

} // namespace netdos
