#include "hinv/core/eigen_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hinv/core/error.hpp"

namespace hinv {

namespace {

// Entries below this (vectors are unit length) do not decide the sign.
constexpr double kSignThreshold = 1e-12;

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > kSignThreshold) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

bool lexicographically_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

EigenSystem decompose(const BasisSpace& space, int blocks, const Eigen::MatrixXd& raw,
                      int k_max, EigenOptions opts) {
    require_finite(raw, "sym_eigen");
    const Eigen::Index n = raw.rows();
    const double scale = raw.norm();
    const double asym = (raw - raw.transpose()).norm();
    if (asym > kSymmetryTolerance * std::max(scale, 1e-300) && asym > 0.0)
        throw InvalidArgument("sym_eigen: operator is not symmetric (relative asymmetry " +
                              std::to_string(asym / scale) + ")");
    const Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericalError("sym_eigen: solver did not converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Eigen::MatrixXd vecs = solver.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) normalize_sign(vecs.col(j));
    const Eigen::VectorXd& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (vals[a] != vals[b]) return vals[a] > vals[b];
        return lexicographically_greater(vecs.col(a), vecs.col(b));
    });

    EigenSystem es;
    es.space = space;
    es.blocks = blocks;
    es.values.resize(n);
    es.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        es.values[j] = vals[order[static_cast<std::size_t>(j)]];
        es.vectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
    }
    if (opts.psd) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (es.values[j] < 0.0) {
                es.clamped_mass += -es.values[j];
                es.values[j] = 0.0;
            }
        }
    }

    int k = k_max;
    if (k > n) {
        k = static_cast<int>(n);
        es.k_clamped = true;
    }
    if (k < 1) k = 1;
    es.gaps = gap_stats(es.values, k);
    return es;
}

}  // namespace

GapStats gap_stats(const Eigen::VectorXd& values, int k) {
    const auto n = static_cast<int>(values.size());
    if (k < 1 || k > n) throw InvalidArgument("gap_stats: k out of range");
    auto value = [&](int j) { return j <= n ? values[j - 1] : 0.0; };  // 1-based, l_{n+1} = 0
    GapStats g;
    g.k = k;
    g.alphas.resize(k);
    const double tol = kDegenerateGapRatio * std::max(values[0], 0.0);
    double sup = 0.0;
    for (int j = 1; j <= k; ++j) {
        const double below = value(j) - value(j + 1);
        g.alphas[j - 1] = j == 1 ? below : std::min(value(j - 1) - value(j), below);
        if (below <= tol) {
            g.degenerate = true;
        } else {
            sup = std::max(sup, 1.0 / below);
        }
    }
    if (!g.degenerate) g.Lambda = sup;
    return g;
}

GapStats eigen_gap_stats(const EigenSystem& es, int k) {
    if (k < 1 || k >= es.size())
        throw InvalidArgument("eigen_gap_stats: K must satisfy 1 <= K < number of eigenvalues");
    return gap_stats(es.values, k);
}

EigenSystem sym_eigen(const BlockOp& a, int k_max, EigenOptions opts) {
    if (a.rows() != a.cols()) throw InvalidArgument("sym_eigen: operator must be square");
    return decompose(a.space(), a.rows(), a.mat(), k_max, opts);
}

EigenSystem sym_eigen(const LinearOp& a, int k_max, EigenOptions opts) {
    return decompose(a.space(), 1, a.mat(), k_max, opts);
}

BlockOp ridge_resolvent(const EigenSystem& es, double theta) {
    if (!(theta > 0.0)) throw InvalidArgument("ridge_resolvent: theta must be > 0");
    const Eigen::VectorXd inv = (es.values.array() + theta).inverse().matrix();
    Eigen::MatrixXd r = es.vectors * inv.asDiagonal() * es.vectors.transpose();
    // Exact symmetry; the product is symmetric only up to rounding.
    r = 0.5 * (r + r.transpose()).eval();
    return BlockOp(es.space, es.blocks, es.blocks, std::move(r));
}

BlockOp ridge_resolvent(const BlockOp& a, double theta) {
    if (!(theta > 0.0)) throw InvalidArgument("ridge_resolvent: theta must be > 0");
    return ridge_resolvent(sym_eigen(a, 1), theta);
}

BlockOp spectral_projector(const EigenSystem& es, int K) {
    if (K < 1 || K > es.size()) throw InvalidArgument("spectral_projector: K out of range");
    const auto lead = es.vectors.leftCols(K);
    Eigen::MatrixXd p = lead * lead.transpose();
    return BlockOp(es.space, es.blocks, es.blocks, std::move(p));
}

int trace_fraction_rank(const Eigen::VectorXd& values, double fraction, double floor_ratio) {
    const auto n = static_cast<int>(values.size());
    if (n == 0) throw InvalidArgument("trace_fraction_rank: empty spectrum");
    const double total = values.sum();
    if (!(total > 0.0) || !(values[0] > 0.0)) return 1;
    int k = n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        acc += values[j];
        if (acc >= fraction * total) {
            k = j + 1;
            break;
        }
    }
    while (k > 1 && values[k - 1] < floor_ratio * values[0]) --k;
    return k;
}

}  // namespace hinv
