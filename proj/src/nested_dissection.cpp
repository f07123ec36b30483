#include "netdos/nested_dissection.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

namespace netdos {

std::vector<std::size_t> PartitionNode::partition() const {
    std::vector<std::size_t> all;
    all.reserve(separator.size() + left.size() + right.size());
    all.insert(all.end(), separator.begin(), separator.end());
    all.insert(all.end(), left.begin(), left.end());
    all.insert(all.end(), right.begin(), right.end());
    std::sort(all.begin(), all.end());
    return all;
}

std::size_t PartitionTree::depth() const {
    std::size_t best = 0;
    for (const auto& node : nodes) {
        std::size_t d = 1;
        for (std::ptrdiff_t p = node.parent; p >= 0; p = nodes[static_cast<std::size_t>(p)].parent) ++d;
        best = std::max(best, d);
    }
    return best;
}

namespace {

constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

struct Split {
    std::vector<std::size_t> separator;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
};

class Splitter {
public:
    explicit Splitter(const GraphCSR& g) : g_(g), stamp_(g.n(), 0), level_(g.n(), kUnset) {}

    Split split(const std::vector<std::size_t>& part) {
        ++epoch_;
        for (const std::size_t v : part) stamp_[v] = epoch_;

        auto components = components_of(part);
        if (components.size() > 1) return split_components(std::move(components));

        const std::size_t root = pseudo_peripheral(part.front());
        const auto levels = bfs_levels(root);
        const std::size_t depth = levels.size() - 1;
        Split s;
        if (depth == 1) {
            s.left = levels[0];
            s.separator = levels[1];
        } else {
            std::size_t cumulative = 0;
            std::size_t cut = 0;
            for (; cut < levels.size(); ++cut) {
                cumulative += levels[cut].size();
                if (2 * cumulative >= part.size()) break;
            }
            cut = std::clamp<std::size_t>(cut, 1, depth - 1);
            for (std::size_t l = 0; l < levels.size(); ++l) {
                auto& dst = l < cut ? s.left : (l == cut ? s.separator : s.right);
                dst.insert(dst.end(), levels[l].begin(), levels[l].end());
            }
        }
        std::sort(s.separator.begin(), s.separator.end());
        std::sort(s.left.begin(), s.left.end());
        std::sort(s.right.begin(), s.right.end());
        return s;
    }

private:
    bool inside(std::size_t v) const { return stamp_[v] == epoch_; }

    std::vector<std::vector<std::size_t>> components_of(const std::vector<std::size_t>& part) {
        for (const std::size_t v : part) level_[v] = kUnset;
        std::vector<std::vector<std::size_t>> comps;
        for (const std::size_t start : part) {
            if (level_[start] != kUnset) continue;
            std::vector<std::size_t> comp{start};
            level_[start] = 0;
            for (std::size_t head = 0; head < comp.size(); ++head) {
                for (const std::size_t w : g_.neighbors(comp[head])) {
                    if (inside(w) && level_[w] == kUnset) {
                        level_[w] = 0;
                        comp.push_back(w);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        for (const std::size_t v : part) level_[v] = kUnset;
        return comps;
    }

    static Split split_components(std::vector<std::vector<std::size_t>> comps) {
        std::stable_sort(comps.begin(), comps.end(),
                         [](const auto& a, const auto& b) { return a.size() > b.size(); });
        Split s;
        for (auto& c : comps) {
            auto& dst = s.left.size() <= s.right.size() ? s.left : s.right;
            dst.insert(dst.end(), c.begin(), c.end());
        }
        std::sort(s.left.begin(), s.left.end());
        std::sort(s.right.begin(), s.right.end());
        return s;
    }

    std::vector<std::vector<std::size_t>> bfs_levels(std::size_t root) {
        std::vector<std::vector<std::size_t>> levels{{root}};
        std::vector<std::size_t> touched{root};
        level_[root] = 0;
        while (true) {
            std::vector<std::size_t> next;
            for (const std::size_t v : levels.back()) {
                for (const std::size_t w : g_.neighbors(v)) {
                    if (inside(w) && level_[w] == kUnset) {
                        level_[w] = levels.size();
                        next.push_back(w);
                        touched.push_back(w);
                    }
                }
            }
            if (next.empty()) break;
            std::sort(next.begin(), next.end());
            levels.push_back(std::move(next));
        }
        for (const std::size_t v : touched) level_[v] = kUnset;
        return levels;
    }

    // George-Liu style: hop to a min-degree node of the last level until the
    // eccentricity stops growing.
    std::size_t pseudo_peripheral(std::size_t start) {
        std::size_t root = start;
        std::size_t ecc = 0;
        for (int iter = 0; iter < 16; ++iter) {
            const auto levels = bfs_levels(root);
            const std::size_t e = levels.size() - 1;
            if (iter > 0 && e <= ecc) break;
            ecc = e;
            const auto& last = levels.back();
            std::size_t best = last.front();
            for (const std::size_t v : last) {
                if (g_.degree(v) < g_.degree(best)) best = v;
            }
            if (best == root) break;
            root = best;
        }
        return root;
    }

    const GraphCSR& g_;
    std::vector<std::size_t> stamp_;
    std::vector<std::size_t> level_;
    std::size_t epoch_ = 0;
};

std::string join_ids(const std::vector<std::size_t>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(ids[i]);
    }
    return s;
}

std::vector<std::size_t> parse_ids(const std::string& token, const std::string& prefix, std::size_t line) {
    if (token.rfind(prefix, 0) != 0) {
        throw InvalidInput("partition line " + std::to_string(line) + ": expected '" + prefix + "'");
    }
    std::vector<std::size_t> ids;
    std::stringstream ss(token.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            ids.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw InvalidInput("partition line " + std::to_string(line) + ": bad node id '" + item + "'");
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace

PartitionTree build_partition_tree(const GraphCSR& g, std::size_t leaf_size) {
    if (leaf_size < 1) throw InvalidInput("build_partition_tree: leaf size must be positive");
    PartitionTree tree;
    tree.n = g.n();
    tree.leaf_size = leaf_size;
    if (g.n() == 0) return tree;

    Splitter splitter(g);
    struct Pending {
        std::vector<std::size_t> part;
        std::ptrdiff_t parent;
        bool is_left;
    };
    std::vector<std::size_t> all(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) all[i] = i;
    std::vector<Pending> stack;
    stack.push_back({std::move(all), -1, true});

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        PartitionNode node;
        node.id = tree.nodes.size();
        node.parent = job.parent;
        if (job.part.size() <= leaf_size) {
            node.separator = std::move(job.part);
        } else {
            Split s = splitter.split(job.part);
            if (s.separator.size() > std::max(s.left.size(), s.right.size())) {
                tree.warnings.push_back("tree node " + std::to_string(node.id) + ": separator of " +
                                        std::to_string(s.separator.size()) + " nodes exceeds both parts (" +
                                        std::to_string(s.left.size()) + ", " + std::to_string(s.right.size()) +
                                        ")");
            }
            node.separator = std::move(s.separator);
            node.left = std::move(s.left);
            node.right = std::move(s.right);
        }
        if (job.parent >= 0) {
            auto& parent = tree.nodes[static_cast<std::size_t>(job.parent)];
            (job.is_left ? parent.left_child : parent.right_child) = static_cast<std::ptrdiff_t>(node.id);
        }
        const auto id = static_cast<std::ptrdiff_t>(node.id);
        // Right pushed first so the left subtree is visited first (pre-order).
        if (!node.right.empty()) stack.push_back({node.right, id, false});
        if (!node.left.empty()) stack.push_back({node.left, id, true});
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

void validate_partition_tree(const PartitionTree& tree, const SparseOperator& op) {
    const std::size_t n = op.dim();
    if (tree.n != n) throw InvalidInput("partition tree covers " + std::to_string(tree.n) + " nodes, operator has " +
                                        std::to_string(n));
    if (n == 0) return;
    if (tree.nodes.empty() || tree.nodes.front().parent != -1) throw InvalidInput("partition tree: missing root");

    std::vector<std::size_t> owner(n, kUnset);
    for (const auto& node : tree.nodes) {
        for (const std::size_t v : node.separator) {
            if (v >= n) throw InvalidInput("partition tree: node id " + std::to_string(v) + " out of range");
            if (owner[v] != kUnset) throw InvalidInput("partition tree: node " + std::to_string(v) + " in two separators");
            owner[v] = node.id;
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (owner[v] == kUnset) throw InvalidInput("partition tree: node " + std::to_string(v) + " not covered");
    }

    std::vector<int> side(n, 0);
    for (const auto& node : tree.nodes) {
        const auto all = node.partition();
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
            throw InvalidInput("partition tree node " + std::to_string(node.id) + ": parts overlap");
        }
        if (node.parent == -1 && all.size() != n) throw InvalidInput("partition tree: root does not cover the graph");
        const auto check_child = [&](std::ptrdiff_t child, const std::vector<std::size_t>& expect) {
            if (expect.empty()) {
                if (child != -1) throw InvalidInput("partition tree: child for an empty part");
                return;
            }
            if (child < 0 || static_cast<std::size_t>(child) >= tree.nodes.size()) {
                throw InvalidInput("partition tree node " + std::to_string(node.id) + ": missing child");
            }
            const auto& c = tree.nodes[static_cast<std::size_t>(child)];
            if (c.parent != static_cast<std::ptrdiff_t>(node.id) || c.partition() != expect) {
                throw InvalidInput("partition tree node " + std::to_string(node.id) + ": child partition mismatch");
            }
        };
        check_child(node.left_child, node.left);
        check_child(node.right_child, node.right);

        for (const std::size_t v : node.left) side[v] = 1;
        for (const std::size_t v : node.right) side[v] = 2;
        const auto rp = op.row_ptr();
        const auto ci = op.col_idx();
        const auto va = op.values();
        for (const std::size_t v : node.left) {
            for (std::size_t p = rp[v]; p < rp[v + 1]; ++p) {
                if (va[p] != 0.0 && side[ci[p]] == 2) {
                    throw InvalidInput("partition tree node " + std::to_string(node.id) + ": edge (" +
                                       std::to_string(v) + "," + std::to_string(ci[p]) + ") crosses the separator");
                }
            }
        }
        for (const std::size_t v : node.left) side[v] = 0;
        for (const std::size_t v : node.right) side[v] = 0;
    }
}

namespace {

struct Coupling {
    std::size_t row;      // local row in I_p
    std::size_t ancestor; // index into the node's ancestor list
    std::size_t col;      // column of the ancestor's separator block
    double value;
};

struct BlockPlan {
    std::size_t rows = 0;                   // |I_p|
    std::size_t cols = 0;                   // |I_s|
    std::vector<std::size_t> sep_nodes;     // I_s in column order
    std::vector<std::size_t> sep_rows;      // local row of each separator node
    std::vector<std::size_t> row_ptr;       // H~(I_p, I_p), local indices
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    std::vector<Coupling> couplings;        // H~(I_p, ancestor separators)
    std::vector<std::size_t> ancestors;     // tree ids
    std::vector<std::vector<std::size_t>> ancestor_rows; // rows of I_s inside each ancestor's I_p
};

std::vector<BlockPlan> plan_blocks(const ScaledOperator& sop, const PartitionTree& tree) {
    const std::size_t n = sop.matrix.dim();
    const auto rp = sop.matrix.row_ptr();
    const auto ci = sop.matrix.col_idx();
    const auto va = sop.matrix.values();

    std::vector<std::size_t> owner(n);
    std::vector<std::size_t> owner_pos(n);
    for (const auto& node : tree.nodes) {
        for (std::size_t j = 0; j < node.separator.size(); ++j) {
            owner[node.separator[j]] = node.id;
            owner_pos[node.separator[j]] = j;
        }
    }

    std::vector<std::vector<std::size_t>> partitions(tree.nodes.size());
    for (const auto& node : tree.nodes) partitions[node.id] = node.partition();

    std::vector<BlockPlan> plans(tree.nodes.size());
    std::vector<std::size_t> local(n, kUnset);
    for (const auto& node : tree.nodes) {
        BlockPlan& plan = plans[node.id];
        const auto& part = partitions[node.id];
        plan.rows = part.size();
        plan.cols = node.separator.size();
        plan.sep_nodes = node.separator;
        for (std::size_t i = 0; i < part.size(); ++i) local[part[i]] = i;
        for (const std::size_t s : node.separator) plan.sep_rows.push_back(local[s]);

        std::map<std::size_t, std::size_t> ancestor_slot;
        for (std::ptrdiff_t p = node.parent; p >= 0; p = tree.nodes[static_cast<std::size_t>(p)].parent) {
            const auto a = static_cast<std::size_t>(p);
            ancestor_slot[a] = plan.ancestors.size();
            plan.ancestors.push_back(a);
        }

        plan.row_ptr.assign(1, 0);
        for (std::size_t i = 0; i < part.size(); ++i) {
            const std::size_t v = part[i];
            for (std::size_t p = rp[v]; p < rp[v + 1]; ++p) {
                const std::size_t w = ci[p];
                if (local[w] != kUnset) {
                    plan.col_idx.push_back(local[w]);
                    plan.values.push_back(va[p]);
                    continue;
                }
                if (va[p] == 0.0) continue;
                const auto it = ancestor_slot.find(owner[w]);
                if (it == ancestor_slot.end()) {
                    throw InvalidInput("nd_pdos_moments: tree does not match the operator; node " + std::to_string(v) +
                                       " couples to node " + std::to_string(w) + " outside its ancestor separators");
                }
                plan.couplings.push_back({i, it->second, owner_pos[w], va[p]});
            }
            plan.row_ptr.push_back(plan.col_idx.size());
        }
        for (const std::size_t v : part) local[v] = kUnset;

        plan.ancestor_rows.resize(plan.ancestors.size());
        for (std::size_t slot = 0; slot < plan.ancestors.size(); ++slot) {
            const auto& apart = partitions[plan.ancestors[slot]];
            auto& rows = plan.ancestor_rows[slot];
            for (const std::size_t s : node.separator) {
                rows.push_back(static_cast<std::size_t>(std::lower_bound(apart.begin(), apart.end(), s) - apart.begin()));
            }
        }
    }
    return plans;
}

} // namespace

ChebMoments nd_pdos_moments(const ScaledOperator& sop, const PartitionTree& tree, std::size_t m_max) {
    validate_partition_tree(tree, sop.matrix);
    const std::size_t n = sop.matrix.dim();
    const std::size_t stride = m_max + 1;

    ChebMoments out;
    out.mode = MomentMode::PerNode;
    out.m_max = m_max;
    out.n = n;
    out.map = sop.map;
    out.range = sop.range;
    out.probes.method = "nd";
    out.probes.kind = ProbeKind::StandardBasis;
    out.probes.nz = n;
    out.probes.exact = true;
    out.values.assign(n * stride, 0.0);
    if (n == 0) return out;

    const auto plans = plan_blocks(sop, tree);
    const std::size_t blocks = plans.size();
    // prev[t] / cur[t]: T_{m-1}, T_m restricted to (I_p, I_s), row-major.
    std::vector<std::vector<double>> prev(blocks);
    std::vector<std::vector<double>> cur(blocks);

    const auto record = [&](std::size_t m, const std::vector<std::vector<double>>& x) {
        for (std::size_t t = 0; t < blocks; ++t) {
            const auto& plan = plans[t];
            for (std::size_t j = 0; j < plan.cols; ++j) {
                out.values[plan.sep_nodes[j] * stride + m] = x[t][plan.sep_rows[j] * plan.cols + j];
            }
        }
    };

    for (std::size_t t = 0; t < blocks; ++t) {
        const auto& plan = plans[t];
        prev[t].assign(plan.rows * plan.cols, 0.0);
        for (std::size_t j = 0; j < plan.cols; ++j) prev[t][plan.sep_rows[j] * plan.cols + j] = 1.0;
    }
    record(0, prev);
    if (m_max == 0) return out;

    const auto local_product = [&](const BlockPlan& plan, const std::vector<double>& x, std::size_t i, double* acc) {
        std::fill(acc, acc + plan.cols, 0.0);
        for (std::size_t p = plan.row_ptr[i]; p < plan.row_ptr[i + 1]; ++p) {
            const double h = plan.values[p];
            const double* xr = x.data() + plan.col_idx[p] * plan.cols;
            for (std::size_t j = 0; j < plan.cols; ++j) acc[j] += h * xr[j];
        }
    };

    const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t tt = 0; tt < nblocks; ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        const auto& plan = plans[t];
        cur[t].assign(plan.rows * plan.cols, 0.0);
        for (std::size_t i = 0; i < plan.rows; ++i) local_product(plan, prev[t], i, cur[t].data() + i * plan.cols);
    }
    record(1, cur);

    for (std::size_t m = 2; m <= m_max; ++m) {
#pragma omp parallel
        {
            std::vector<double> acc;
#pragma omp for schedule(dynamic)
            for (std::int64_t tt = 0; tt < nblocks; ++tt) {
                const auto t = static_cast<std::size_t>(tt);
                const auto& plan = plans[t];
                acc.resize(plan.cols);
                std::vector<double>& next = prev[t];
                for (std::size_t i = 0; i < plan.rows; ++i) {
                    local_product(plan, cur[t], i, acc.data());
                    double* row = next.data() + i * plan.cols;
                    for (std::size_t j = 0; j < plan.cols; ++j) row[j] = 2.0 * acc[j] - row[j];
                }
                // Coupling to ancestor separators: T_m(H)(a, s_j) is read from the
                // ancestor's block at row s_j, column a (symmetry).
                for (const Coupling& c : plan.couplings) {
                    const std::size_t anc = plan.ancestors[c.ancestor];
                    const auto& rows = plan.ancestor_rows[c.ancestor];
                    const std::vector<double>& xa = cur[anc];
                    const std::size_t acols = plans[anc].cols;
                    double* row = next.data() + c.row * plan.cols;
                    for (std::size_t j = 0; j < plan.cols; ++j) row[j] += 2.0 * c.value * xa[rows[j] * acols + c.col];
                }
            }
        }
        // Every block read its ancestors' T_m before any T_{m+1} became current.
        std::swap(prev, cur);
        record(m, cur);
    }
    return out;
}

void write_partition(std::ostream& out, const PartitionTree& tree) {
    for (const auto& node : tree.nodes) {
        out << node.id << ' ' << node.parent << " sep:" << join_ids(node.separator) << " left:" << join_ids(node.left)
            << " right:" << join_ids(node.right) << '\n';
    }
}

PartitionTree read_partition(std::istream& in, std::size_t n) {
    PartitionTree tree;
    tree.n = n;
    std::map<std::size_t, PartitionNode> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long id = 0;
        long long parent = 0;
        std::string sep;
        std::string left;
        std::string right;
        if (!(ls >> id >> parent >> sep >> left >> right) || id < 0 || parent < -1) {
            throw InvalidInput("partition line " + std::to_string(line_no) + ": expected 'id parent sep: left: right:'");
        }
        PartitionNode node;
        node.id = static_cast<std::size_t>(id);
        node.parent = static_cast<std::ptrdiff_t>(parent);
        node.separator = parse_ids(sep, "sep:", line_no);
        node.left = parse_ids(left, "left:", line_no);
        node.right = parse_ids(right, "right:", line_no);
        if (!by_id.emplace(node.id, std::move(node)).second) {
            throw InvalidInput("partition line " + std::to_string(line_no) + ": duplicate node id");
        }
    }
    if (by_id.empty()) {
        if (n == 0) return tree;
        throw InvalidInput("partition file is empty");
    }
    if (by_id.rbegin()->first + 1 != by_id.size()) throw InvalidInput("partition file: node ids must be 0..T-1");

    for (auto& [id, node] : by_id) tree.nodes.push_back(node);
    std::size_t roots = 0;
    for (auto& node : tree.nodes) {
        if (node.parent == -1) {
            ++roots;
            continue;
        }
        if (static_cast<std::size_t>(node.parent) >= tree.nodes.size()) {
            throw InvalidInput("partition file: node " + std::to_string(node.id) + " has an unknown parent");
        }
        auto& parent = tree.nodes[static_cast<std::size_t>(node.parent)];
        const auto part = node.partition();
        if (part == parent.left && parent.left_child == -1) parent.left_child = static_cast<std::ptrdiff_t>(node.id);
        else if (part == parent.right && parent.right_child == -1) parent.right_child = static_cast<std::ptrdiff_t>(node.id);
        else throw InvalidInput("partition file: node " + std::to_string(node.id) + " matches neither side of its parent");
    }
    if (roots != 1) throw InvalidInput("partition file: expected exactly one root");
    // validate_partition_tree wants the root first.
    if (tree.nodes.front().parent != -1) {
        const auto root = std::find_if(tree.nodes.begin(), tree.nodes.end(), [](const auto& x) { return x.parent == -1; });
        const std::size_t old = root->id;
        std::swap(tree.nodes.front(), *root);
        // Re-label ids 0 <-> old in every reference.
        const auto relabel = [&](std::ptrdiff_t& ref) {
            if (ref == 0) ref = static_cast<std::ptrdiff_t>(old);
            else if (ref == static_cast<std::ptrdiff_t>(old)) ref = 0;
        };
        for (auto& node : tree.nodes) {
            relabel(node.parent);
            relabel(node.left_child);
            relabel(node.right_child);
        }
        tree.nodes.front().id = 0;
        tree.nodes[old].id = old;
    }
    for (const auto& node : tree.nodes) tree.leaf_size = std::max(tree.leaf_size, node.is_leaf() ? node.separator.size() : 0);
    return tree;
}

} // namespace netdos
