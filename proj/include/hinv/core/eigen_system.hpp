#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hinv/core/operators.hpp"

namespace hinv {

/// Relative gap threshold below which a spectrum counts as degenerate.
inline constexpr double kDegenerateGapRatio = 1e-12;
/// Relative asymmetry accepted before symmetrizing.
inline constexpr double kSymmetryTolerance = 1e-10;

/**
 * @brief Eigen-gap statistics over the leading k eigenvalues.
 *
 * alphas[j-1] = min(l_{j-1} - l_j, l_j - l_{j+1}) with alpha_1 = l_1 - l_2, and
 * Lambda_k = max_{j<=k} 1/(l_j - l_{j+1}). When k equals the dimension the
 * missing l_{k+1} is taken as 0 (the discretized operator is finite rank in H).
 * Lambda is empty when any of the gaps is degenerate.
 */
struct GapStats {
    int k = 0;
    Eigen::VectorXd alphas;
    std::optional<double> Lambda;
    bool degenerate = false;
};

/**
 * @brief Eigendecomposition of a symmetric (PSD) operator.
 *
 * values are non-increasing, vectors are orthonormal columns aligned with
 * values. Each vector has its first non-negligible entry positive. Ties in
 * value are ordered by the lexicographically larger vector.
 */
struct EigenSystem {
    BasisSpace space{1};
    int blocks = 1;                 ///< the decomposed operator acts on H^blocks
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    GapStats gaps;                  ///< statistics for the requested k_max
    bool k_clamped = false;         ///< k_max exceeded the dimension and was clamped
    double clamped_mass = 0.0;      ///< sum of |negative eigenvalues| set to zero

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values.size()); }
    [[nodiscard]] bool degenerate() const noexcept { return gaps.degenerate; }
};

struct EigenOptions {
    /// Clamp negative eigenvalues to zero (input is PSD by construction).
    bool psd = true;
};

[[nodiscard]] EigenSystem sym_eigen(const BlockOp& a, int k_max, EigenOptions opts = {});
[[nodiscard]] EigenSystem sym_eigen(const LinearOp& a, int k_max, EigenOptions opts = {});

/// Gap statistics for the first k values. Requires 1 <= k < values.size().
[[nodiscard]] GapStats eigen_gap_stats(const EigenSystem& es, int k);
/// Same, but also allows k == values.size() using the l_{n+1} = 0 convention.
[[nodiscard]] GapStats gap_stats(const Eigen::VectorXd& values, int k);

/// (A + theta I)^{-1} computed from the eigendecomposition of A.
[[nodiscard]] BlockOp ridge_resolvent(const BlockOp& a, double theta);
[[nodiscard]] BlockOp ridge_resolvent(const EigenSystem& es, double theta);

/// Orthogonal projector onto the span of the leading K eigenvectors.
[[nodiscard]] BlockOp spectral_projector(const EigenSystem& es, int K);

/// Smallest k whose leading eigenvalues hold at least `fraction` of the trace,
/// then capped so that values[k-1] >= floor_ratio * values[0].
[[nodiscard]] int trace_fraction_rank(const Eigen::VectorXd& values, double fraction,
                                      double floor_ratio);

}  // namespace hinv
