#include "netdos/testkit.hpp"

#include "netdos/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace netdos {

Eigen::MatrixXd to_dense(const SparseOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    const auto rp = op.row_ptr();
    const auto ci = op.col_idx();
    const auto va = op.values();
    for (std::size_t i = 0; i < op.dim(); ++i) {
        for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ci[p])) += va[p];
        }
    }
    return dense;
}

ExactSpectrum exact_spectrum(const SparseOperator& op, bool want_vectors, std::size_t cap) {
    if (op.dim() > cap) {
        throw InvalidInput("exact_spectrum: " + std::to_string(op.dim()) + " nodes exceeds the dense cap of " +
                           std::to_string(cap));
    }
    ExactSpectrum out;
    if (op.dim() == 0) return out;
    const Eigen::MatrixXd dense = to_dense(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense,
                                                          want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("exact_spectrum: dense eigensolve failed", 0);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    if (want_vectors) out.eigenvectors = solver.eigenvectors();
    return out;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("wasserstein1: spectra have " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()) + " points");
    }
    if (a.empty()) return 0.0;
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
    return total / static_cast<double>(sa.size());
}

InterlacingResult check_interlacing(const ExactSpectrum& full, const ExactSpectrum& reduced, std::size_t r) {
    const auto& f = full.eigenvalues;
    const auto& g = reduced.eigenvalues;
    if (r > f.size() || g.size() + r != f.size()) {
        throw InvalidInput("check_interlacing: expected " + std::to_string(f.size() >= r ? f.size() - r : 0) +
                           " reduced eigenvalues, got " + std::to_string(g.size()));
    }
    constexpr double slack = 1e-10;
    InterlacingResult res;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < f[i] - slack || g[i] > f[i + r] + slack) {
            res.ok = false;
            res.first_violation = i;
            break;
        }
    }
    return res;
}

SpectralHistogram exact_histogram(const ExactSpectrum& spectrum, const BinEdges& edges) {
    return histogram_from_points(spectrum.eigenvalues, edges);
}

} // namespace netdos
