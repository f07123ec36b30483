#include "netdos/error.hpp"
#include "netdos/probes.hpp"
#include "netdos/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

namespace netdos {

namespace {

// Uniform draws from the raw 64-bit output keep the stream identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
    double uniform() { return to_unit(engine_()); }
    std::size_t below(std::size_t bound) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(bound)) % bound;
    }

private:
    std::mt19937_64 engine_;
};

Edge make_edge(std::size_t u, std::size_t v) {
    return {static_cast<std::int64_t>(u), static_cast<std::int64_t>(v), std::nullopt};
}

GraphCSR erdos_renyi(const ErdosRenyi& model, Rng& rng) {
    if (!(model.p >= 0.0 && model.p <= 1.0)) throw InvalidInput("erdos_renyi: p must lie in [0, 1]");
    const std::size_t n = model.n;
    std::vector<Edge> edges;
    if (model.p >= 1.0) {
        for (std::size_t v = 1; v < n; ++v)
            for (std::size_t w = 0; w < v; ++w) edges.push_back(make_edge(v, w));
    } else if (model.p > 0.0 && n > 1) {
        // Skip over absent pairs with geometric gaps (lower triangle, row by row).
        const double log_q = std::log1p(-model.p);
        std::size_t v = 1;
        double w = -1.0;
        while (v < n) {
            const double r = rng.uniform();
            w += 1.0 + std::floor(std::log1p(-r) / log_q);
            while (v < n && w >= static_cast<double>(v)) {
                w -= static_cast<double>(v);
                ++v;
            }
            if (v < n) edges.push_back(make_edge(v, static_cast<std::size_t>(w)));
        }
    }
    return build_csr(edges, {.allow_self_loops = false, .min_nodes = n});
}

GraphCSR preferential_attachment(const PreferentialAttachment& model, Rng& rng) {
    const std::size_t n = model.n;
    const std::size_t m = model.m;
    if (m < 1) throw InvalidInput("preferential_attachment: m must be at least 1");
    if (m >= n) throw InvalidInput("preferential_attachment: m must be smaller than n");
    std::vector<Edge> edges;
    // Each endpoint appears once per incident edge, so a uniform pick from
    // this list is a degree-proportional pick.
    std::vector<std::size_t> endpoints;
    for (std::size_t u = 0; u <= m; ++u) {
        for (std::size_t v = u + 1; v <= m; ++v) {
            edges.push_back(make_edge(u, v));
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }
    std::vector<std::size_t> chosen;
    for (std::size_t t = m + 1; t < n; ++t) {
        chosen.clear();
        while (chosen.size() < m) {
            const std::size_t target = endpoints[rng.below(endpoints.size())];
            if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) chosen.push_back(target);
        }
        for (const std::size_t target : chosen) {
            edges.push_back(make_edge(t, target));
            endpoints.push_back(t);
            endpoints.push_back(target);
        }
    }
    return build_csr(edges, {.allow_self_loops = false, .min_nodes = n});
}

GraphCSR small_world(const SmallWorld& model, Rng& rng) {
    const std::size_t n = model.n;
    const std::size_t k = model.k;
    if (!(model.p >= 0.0 && model.p <= 1.0)) throw InvalidInput("small_world: p must lie in [0, 1]");
    if (k < 1 || 2 * k >= n) throw InvalidInput("small_world: need 1 <= k and 2k < n");
    std::set<std::pair<std::size_t, std::size_t>> present;
    const auto key = [](std::size_t a, std::size_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 1; j <= k; ++j) present.insert(key(i, (i + j) % n));

    for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform() >= model.p) continue;
            const auto old = key(i, (i + j) % n);
            if (!present.count(old)) continue;
            // The edge moves to a uniformly random absent pair, so both
            // endpoints can lose it; give up after a bounded search.
            for (int attempt = 0; attempt < 64; ++attempt) {
                const std::size_t u = rng.below(n);
                const std::size_t w = rng.below(n);
                if (u == w || present.count(key(u, w))) continue;
                present.erase(old);
                present.insert(key(u, w));
                break;
            }
        }
    }
    std::vector<Edge> edges;
    edges.reserve(present.size());
    for (const auto& [a, b] : present) edges.push_back(make_edge(a, b));
    return build_csr(edges, {.allow_self_loops = false, .min_nodes = n});
}

} // namespace

GraphCSR generate_graph(const GraphModel& model, std::uint64_t seed) {
    Rng rng(seed);
    return std::visit(
        [&](const auto& m) -> GraphCSR {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ErdosRenyi>) return erdos_renyi(m, rng);
            else if constexpr (std::is_same_v<T, PreferentialAttachment>) return preferential_attachment(m, rng);
            else return small_world(m, rng);
        },
        model);
}

} // namespace netdos
