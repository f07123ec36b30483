#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace netdos {

/// B equal-width bins over [lo, hi] in original eigenvalue units.
struct BinEdges {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t bins = 50;

    BinEdges() = default;
    BinEdges(double lo_, double hi_, std::size_t bins_);

    double width() const noexcept { return (hi - lo) / static_cast<double>(bins); }
    double edge(std::size_t k) const noexcept;
    std::vector<double> edges() const;

    /// Bin holding lambda. Bins are [e_k, e_{k+1}) except the last, which is
    /// closed. Values within 1e-9 bin widths of an edge snap onto it, so a
    /// spike computed as +-1e-16 around an edge always lands in one bin.
    std::optional<std::size_t> index(double lambda) const noexcept;
};

struct SpectralHistogram {
    std::vector<double> edges;  ///< B + 1 ascending bounds
    std::vector<double> masses; ///< B values
    double normalization = 1.0;

    std::size_t bins() const noexcept { return masses.size(); }
    double total() const noexcept;
};

/// Bins weighted point masses; points outside the edges are dropped.
SpectralHistogram histogram_from_points(std::span<const double> points, std::span<const double> weights,
                                        const BinEdges& edges);
/// Uniform weights 1 / points.size().
SpectralHistogram histogram_from_points(std::span<const double> points, const BinEdges& edges);

/// Sum of absolute bin-mass differences; histograms must share their edges.
double l1_distance(const SpectralHistogram& a, const SpectralHistogram& b);

/// Bins whose mass is at least min_mass and more than ratio times every
/// existing neighbor.
std::vector<std::size_t> find_spikes(const SpectralHistogram& h, double ratio = 3.0, double min_mass = 0.01);

} // namespace netdos
