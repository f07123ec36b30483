#include "netdos/motifs.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace netdos {

namespace {

constexpr double kOrthoTol = 1e-8;

std::uint64_t node_label(std::uint64_t seed, std::size_t i) noexcept {
    return mix64(mix64(seed) ^ (0x632BE59BD9B4E019ULL * (static_cast<std::uint64_t>(i) + 1)));
}

bool same_row(const GraphCSR& g, std::size_t i, std::size_t j) {
    const auto a = g.neighbors(i);
    const auto b = g.neighbors(j);
    if (a.size() != b.size()) return false;
    const auto wa = g.neighbor_weights(i);
    const auto wb = g.neighbor_weights(j);
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] != b[p] || wa[p] != wb[p]) return false;
    }
    return true;
}

// N(i) \ {j} == N(j) \ {i} with weights, and i ~ j.
bool closed_twins(const GraphCSR& g, std::size_t i, std::size_t j) {
    if (g.weight(i, j) == 0.0 || g.degree(i) != g.degree(j)) return false;
    const auto a = g.neighbors(i);
    const auto b = g.neighbors(j);
    const auto wa = g.neighbor_weights(i);
    const auto wb = g.neighbor_weights(j);
    std::size_t p = 0;
    std::size_t q = 0;
    while (true) {
        while (p < a.size() && a[p] == j) ++p;
        while (q < b.size() && b[q] == i) ++q;
        if (p == a.size() || q == b.size()) return p == a.size() && q == b.size();
        if (a[p] != b[q] || wa[p] != wb[q]) return false;
        ++p;
        ++q;
    }
}

bool lex_less_row(const GraphCSR& g, std::size_t i, std::size_t j) {
    const auto a = g.neighbors(i);
    const auto b = g.neighbors(j);
    const auto wa = g.neighbor_weights(i);
    const auto wb = g.neighbor_weights(j);
    const std::size_t len = std::min(a.size(), b.size());
    for (std::size_t p = 0; p < len; ++p) {
        if (a[p] != b[p]) return a[p] < b[p];
        if (wa[p] != wb[p]) return wa[p] < wb[p];
    }
    if (a.size() != b.size()) return a.size() < b.size();
    return i < j;
}

MotifInstance twin_instance(MotifKind kind, std::vector<std::size_t> members) {
    std::sort(members.begin(), members.end());
    MotifInstance inst;
    inst.kind = kind;
    inst.nodes = members;
    for (const std::size_t v : members) inst.groups.push_back({v});
    return inst;
}

void detect_twins(const GraphCSR& g, bool closed, std::uint64_t seed, std::vector<MotifInstance>& out) {
    const std::size_t n = g.n();
    std::vector<std::uint64_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = node_label(seed, i);

    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (g.weight(i, i) != 0.0) continue;
        if (closed && g.degree(i) == 0) continue;
        std::uint64_t h = closed ? labels[i] : 0;
        for (const std::size_t k : g.neighbors(i)) h += labels[k];
        keyed.emplace_back(h, i);
    }
    std::sort(keyed.begin(), keyed.end());

    const MotifKind kind = closed ? MotifKind::ClosedTwinClass : MotifKind::OpenTwinClass;
    for (std::size_t lo = 0; lo < keyed.size();) {
        std::size_t hi = lo + 1;
        while (hi < keyed.size() && keyed[hi].first == keyed[lo].first) ++hi;
        if (hi - lo >= 2) {
            std::vector<std::size_t> bucket;
            for (std::size_t p = lo; p < hi; ++p) bucket.push_back(keyed[p].second);
            if (!closed) {
                std::sort(bucket.begin(), bucket.end(),
                          [&](std::size_t a, std::size_t b) { return lex_less_row(g, a, b); });
                for (std::size_t s = 0; s < bucket.size();) {
                    std::size_t e = s + 1;
                    while (e < bucket.size() && same_row(g, bucket[s], bucket[e])) ++e;
                    if (e - s >= 2) {
                        out.push_back(twin_instance(kind, {bucket.begin() + static_cast<std::ptrdiff_t>(s),
                                                           bucket.begin() + static_cast<std::ptrdiff_t>(e)}));
                    }
                    s = e;
                }
            } else {
                std::vector<std::vector<std::size_t>> classes;
                for (const std::size_t v : bucket) {
                    bool placed = false;
                    for (auto& cls : classes) {
                        if (closed_twins(g, cls.front(), v)) {
                            cls.push_back(v);
                            placed = true;
                            break;
                        }
                    }
                    if (!placed) classes.push_back({v});
                }
                for (auto& cls : classes) {
                    if (cls.size() >= 2) out.push_back(twin_instance(kind, std::move(cls)));
                }
            }
        }
        lo = hi;
    }
}

void detect_chains(const GraphCSR& g, std::vector<MotifInstance>& out) {
    // (anchor, leaf weight, middle weight) -> chains
    std::map<std::tuple<std::size_t, double, double>, std::vector<std::pair<std::size_t, std::size_t>>> by_anchor;
    for (std::size_t a = 0; a < g.n(); ++a) {
        if (g.degree(a) != 1) continue;
        const std::size_t b = g.neighbors(a)[0];
        if (b == a || g.degree(b) != 2 || g.weight(b, b) != 0.0) continue;
        const auto nb = g.neighbors(b);
        const std::size_t e = nb[0] == a ? nb[1] : nb[0];
        by_anchor[{e, g.weight(a, b), g.weight(b, e)}].emplace_back(a, b);
    }
    for (auto& [key, chains] : by_anchor) {
        if (chains.size() < 2) continue;
        MotifInstance inst;
        inst.kind = MotifKind::DanglingTwoChain;
        inst.anchor = std::get<0>(key);
        std::sort(chains.begin(), chains.end());
        for (const auto& [a, b] : chains) {
            inst.groups.push_back({a, b});
            inst.nodes.push_back(a);
            inst.nodes.push_back(b);
        }
        std::sort(inst.nodes.begin(), inst.nodes.end());
        out.push_back(std::move(inst));
    }
}

// Zero-sum (Helmert) combinations of a unit pattern repeated on each group.
std::vector<SparseVector> helmert_vectors(const std::vector<std::vector<std::size_t>>& groups,
                                          const std::vector<double>& pattern) {
    std::vector<SparseVector> vecs;
    for (std::size_t t = 1; t < groups.size(); ++t) {
        const double td = static_cast<double>(t);
        const double norm = std::sqrt(td * (td + 1.0));
        SparseVector v;
        for (std::size_t l = 0; l <= t; ++l) {
            const double coef = (l < t ? 1.0 : -td) / norm;
            for (std::size_t p = 0; p < pattern.size(); ++p) v.emplace_back(groups[l][p], coef * pattern[p]);
        }
        std::sort(v.begin(), v.end());
        vecs.push_back(std::move(v));
    }
    return vecs;
}

[[noreturn]] void unsupported(const MotifInstance& inst, const SparseOperator& op, const std::string& why) {
    const std::string op_name = op.kind() ? std::string(to_string(*op.kind())) : std::string("custom operator");
    throw InvalidInput("motif " + std::string(to_string(inst.kind)) + " at node " +
                       std::to_string(inst.nodes.empty() ? 0 : inst.nodes.front()) +
                       " is not an eigen-motif of " + op_name + ": " + why);
}

// Row i restricted to columns outside `skip` (sorted), as (col, value) pairs.
std::vector<std::pair<std::size_t, double>> row_outside(const SparseOperator& op, std::size_t i,
                                                        const std::vector<std::size_t>& skip) {
    std::vector<std::pair<std::size_t, double>> r;
    const auto rp = op.row_ptr();
    const auto ci = op.col_idx();
    const auto va = op.values();
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
        if (!std::binary_search(skip.begin(), skip.end(), ci[p]) && va[p] != 0.0) r.emplace_back(ci[p], va[p]);
    }
    return r;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < a.size() && q < b.size()) {
        if (a[p].first < b[q].first) ++p;
        else if (a[p].first > b[q].first) ++q;
        else s += a[p++].second * b[q++].second;
    }
    return s;
}

bool overlaps(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < a.size() && q < b.size()) {
        if (a[p] < b[q]) ++p;
        else if (a[p] > b[q]) ++q;
        else return true;
    }
    return false;
}

} // namespace

std::string_view to_string(MotifKind kind) noexcept {
    switch (kind) {
    case MotifKind::OpenTwinClass: return "open-twin";
    case MotifKind::ClosedTwinClass: return "closed-twin";
    case MotifKind::DanglingTwoChain: return "dangling-chain";
    case MotifKind::Custom: return "custom";
    }
    return "unknown";
}

MotifKind parse_motif_kind(std::string_view name) {
    if (name == "open-twin") return MotifKind::OpenTwinClass;
    if (name == "closed-twin") return MotifKind::ClosedTwinClass;
    if (name == "dangling-chain") return MotifKind::DanglingTwoChain;
    if (name == "custom") return MotifKind::Custom;
    throw InvalidInput("unknown motif kind '" + std::string(name) + "'");
}

std::vector<MotifInstance> detect_motifs(const GraphCSR& g, const std::set<MotifKind>& kinds, std::uint64_t seed) {
    std::vector<MotifInstance> out;
    if (kinds.contains(MotifKind::OpenTwinClass)) detect_twins(g, false, seed, out);
    if (kinds.contains(MotifKind::ClosedTwinClass)) detect_twins(g, true, seed, out);
    if (kinds.contains(MotifKind::DanglingTwoChain)) detect_chains(g, out);
    std::stable_sort(out.begin(), out.end(), [](const MotifInstance& a, const MotifInstance& b) {
        return std::make_pair(a.kind, a.nodes.front()) < std::make_pair(b.kind, b.nodes.front());
    });
    return out;
}

std::vector<MotifMode> motif_eigenvectors(const MotifInstance& inst, const SparseOperator& op) {
    for (const std::size_t v : inst.nodes) {
        if (v >= op.dim()) throw InvalidInput("motif node " + std::to_string(v) + " outside the operator");
    }
    switch (inst.kind) {
    case MotifKind::Custom: {
        if (!inst.eigenvalue || inst.eigvecs.empty()) {
            throw InvalidInput("custom motif needs an eigenvalue and at least one eigenvector");
        }
        return {MotifMode{*inst.eigenvalue, inst.eigvecs, {}}};
    }
    case MotifKind::OpenTwinClass:
    case MotifKind::ClosedTwinClass: {
        const bool closed = inst.kind == MotifKind::ClosedTwinClass;
        const std::size_t first = inst.nodes.front();
        const double diag = op.entry(first, first);
        const double link = inst.nodes.size() > 1 ? op.entry(first, inst.nodes[1]) : 0.0;
        const auto outside = row_outside(op, first, inst.nodes);
        for (const std::size_t i : inst.nodes) {
            if (op.entry(i, i) != diag) unsupported(inst, op, "unequal diagonal entries");
            if (row_outside(op, i, inst.nodes) != outside) unsupported(inst, op, "rows differ outside the class");
            for (const std::size_t j : inst.nodes) {
                if (i != j && op.entry(i, j) != link) unsupported(inst, op, "unequal couplings inside the class");
            }
        }
        if (!closed && link != 0.0) unsupported(inst, op, "open twins are adjacent");
        const std::vector<double> pattern{1.0};
        return {MotifMode{diag - link, helmert_vectors(inst.groups, pattern), pattern}};
    }
    case MotifKind::DanglingTwoChain: {
        if (!inst.anchor) throw InvalidInput("dangling-chain motif without an anchor");
        const std::size_t e = *inst.anchor;
        const auto& g0 = inst.groups.front();
        const double p = op.entry(g0[0], g0[0]);
        const double q = op.entry(g0[0], g0[1]);
        const double r = op.entry(g0[1], g0[1]);
        const double c = op.entry(g0[1], e);
        for (const auto& grp : inst.groups) {
            const std::size_t a = grp[0];
            const std::size_t b = grp[1];
            if (op.entry(a, a) != p || op.entry(a, b) != q || op.entry(b, b) != r || op.entry(b, e) != c) {
                unsupported(inst, op, "chains carry different operator entries");
            }
            if (row_outside(op, a, {std::min(a, b), std::max(a, b)}).size() != 0 ||
                row_outside(op, b, [&] {
                    std::vector<std::size_t> s{a, b, e};
                    std::sort(s.begin(), s.end());
                    return s;
                }()).size() != 0) {
                unsupported(inst, op, "chain nodes couple outside the chain");
            }
        }
        if (q == 0.0) unsupported(inst, op, "leaf and middle node are not coupled");
        const double mean = 0.5 * (p + r);
        const double rad = std::hypot(0.5 * (p - r), q);
        std::vector<MotifMode> modes;
        for (const double lambda : {mean - rad, mean + rad}) {
            // (q, lambda - p) solves the 2x2 eigen-equation.
            const double x0 = q;
            const double x1 = lambda - p;
            const double nrm = std::hypot(x0, x1);
            const std::vector<double> pattern{x0 / nrm, x1 / nrm};
            modes.push_back(MotifMode{lambda, helmert_vectors(inst.groups, pattern), pattern});
        }
        return modes;
    }
    }
    return {};
}

std::vector<MotifInstance> bind_motifs(std::span<const MotifInstance> instances, const SparseOperator& op) {
    std::vector<const MotifInstance*> order;
    for (const auto& inst : instances) order.push_back(&inst);
    std::stable_sort(order.begin(), order.end(), [](const MotifInstance* a, const MotifInstance* b) {
        return std::make_pair(a->kind, a->nodes.front()) < std::make_pair(b->kind, b->nodes.front());
    });

    std::map<double, std::vector<bool>> used;
    std::vector<MotifInstance> out;
    for (const MotifInstance* inst : order) {
        for (MotifMode& mode : motif_eigenvectors(*inst, op)) {
            auto& taken = used[mode.eigenvalue];
            if (taken.empty()) taken.assign(op.dim(), false);
            if (std::any_of(inst->nodes.begin(), inst->nodes.end(), [&](std::size_t v) { return taken[v]; })) {
                continue;
            }
            for (const std::size_t v : inst->nodes) taken[v] = true;
            MotifInstance bound = *inst;
            bound.eigenvalue = mode.eigenvalue;
            bound.eigvecs = std::move(mode.eigvecs);
            bound.pattern = std::move(mode.pattern);
            out.push_back(std::move(bound));
        }
    }
    return out;
}

double motif_residual(const MotifInstance& inst, const SparseOperator& op) {
    if (!inst.eigenvalue) throw InvalidInput("motif_residual: instance is not bound to an operator");
    double worst = 0.0;
    std::vector<double> x(op.dim(), 0.0);
    std::vector<double> y(op.dim(), 0.0);
    for (const auto& u : inst.eigvecs) {
        for (const auto& [i, v] : u) x[i] = v;
        op.apply(x, y);
        double s = 0.0;
        for (std::size_t i = 0; i < op.dim(); ++i) {
            const double d = y[i] - *inst.eigenvalue * x[i];
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s));
        for (const auto& [i, v] : u) x[i] = 0.0;
    }
    return worst;
}

std::pair<ProbeMatrix, FilterAdjustment> filter_probes(const ProbeMatrix& probes,
                                                       std::span<const MotifInstance> instances) {
    FilterAdjustment adj;
    for (const auto& inst : instances) {
        if (!inst.eigenvalue) throw InvalidInput("filter_probes: motif instance is not bound to an operator");
        for (const std::size_t v : inst.nodes) {
            if (v >= probes.n()) throw InvalidInput("filter_probes: motif node outside the probe length");
        }
        if (inst.pattern.empty()) {
            for (std::size_t a = 0; a < inst.eigvecs.size(); ++a) {
                for (std::size_t b = a; b < inst.eigvecs.size(); ++b) {
                    const double expect = a == b ? 1.0 : 0.0;
                    if (std::abs(sparse_dot(inst.eigvecs[a], inst.eigvecs[b]) - expect) > kOrthoTol) {
                        throw NumericalError("filter_probes: custom motif eigenvectors are not orthonormal", a);
                    }
                }
            }
        } else {
            double nrm = 0.0;
            for (const double x : inst.pattern) nrm += x * x;
            if (std::abs(nrm - 1.0) > kOrthoTol) throw NumericalError("filter_probes: motif pattern not unit", 0);
        }
        adj.multiplicity[*inst.eigenvalue] += inst.eigvecs.size();
        adj.removed += inst.eigvecs.size();
    }
    for (std::size_t a = 0; a < instances.size(); ++a) {
        for (std::size_t b = a + 1; b < instances.size(); ++b) {
            if (!overlaps(instances[a].nodes, instances[b].nodes)) continue;
            for (const auto& u : instances[a].eigvecs) {
                for (const auto& v : instances[b].eigvecs) {
                    if (std::abs(sparse_dot(u, v)) > kOrthoTol) {
                        throw NumericalError("filter_probes: overlapping motifs are not mutually orthogonal", b);
                    }
                }
            }
        }
    }

    std::vector<double> values(probes.values().begin(), probes.values().end());
    const std::size_t n = probes.n();
    const auto nz = static_cast<std::int64_t>(probes.nz());
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < nz; ++jj) {
        double* z = values.data() + static_cast<std::size_t>(jj) * n;
        for (const auto& inst : instances) {
            if (inst.pattern.empty()) {
                for (const auto& u : inst.eigvecs) {
                    double d = 0.0;
                    for (const auto& [i, v] : u) d += v * z[i];
                    for (const auto& [i, v] : u) z[i] -= d * v;
                }
                continue;
            }
            // Projection onto zero-sum combinations of the pattern: subtract
            // each group's coefficient minus the mean coefficient.
            const auto& x = inst.pattern;
            double mean = 0.0;
            std::vector<double> coef(inst.groups.size());
            for (std::size_t g = 0; g < inst.groups.size(); ++g) {
                double d = 0.0;
                for (std::size_t p = 0; p < x.size(); ++p) d += x[p] * z[inst.groups[g][p]];
                coef[g] = d;
                mean += d;
            }
            mean /= static_cast<double>(inst.groups.size());
            for (std::size_t g = 0; g < inst.groups.size(); ++g) {
                for (std::size_t p = 0; p < x.size(); ++p) z[inst.groups[g][p]] -= (coef[g] - mean) * x[p];
            }
        }
    }
    return {ProbeMatrix(n, probes.nz(), probes.kind(), probes.seed(), std::move(values), true), adj};
}

ChebMoments filtered_dos_moments(const ScaledOperator& sop, const ProbeMatrix& probes,
                                 std::span<const MotifInstance> instances, std::size_t m_max, KpmStats* stats) {
    auto [filtered, adj] = filter_probes(probes, instances);
    ChebMoments out = dos_moments(sop, filtered, m_max, stats);
    out.probes.exact = probes.exact();
    out.filter = std::move(adj);
    return out;
}

} // namespace netdos
