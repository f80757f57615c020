#pragma once

#include <optional>
#include <vector>

#include "hinv/core/eigen_system.hpp"
#include "hinv/core/operators.hpp"
#include "hinv/cov/covariance.hpp"
#include "hinv/invertible/tuning.hpp"
#include "hinv/sim/model.hpp"
#include "hinv/sim/simulate.hpp"

namespace hinv {

struct PsiDiagnostics {
    double lambda_K = 0.0;
    std::optional<double> Lambda_K;
    double clamped_mass = 0.0;
    bool degenerate = false;
};

/// Estimate of Psi_L = (psi_1 ... psi_L) in X_k = sum_j psi_j(X_{k-j}) + e_k.
struct PsiEstimate {
    BlockOp Psi_L;
    std::vector<LinearOp> psi;  ///< psi[j-1] is block j of Psi_L
    TuningPlan tuning;
    EigenSystem eigen;
    PsiDiagnostics diagnostics;
    int N = 0;
    bool centered = false;
};

/**
 * @brief Tychonoff-regularized Yule-Walker estimate
 *
 *   Psi_L = D (C + theta I)^{-1} P_K
 *
 * where C, D are the stacked covariance and lag-1 cross-covariance and P_K
 * projects onto the leading K eigenvectors of C. The result does not depend
 * on the signs of the eigenvectors.
 */
[[nodiscard]] PsiEstimate fit_psi(const SamplePath& s, const TuningPlan& tuning,
                                  bool center = false);
/// Same estimator on precomputed operators; uses cov.eigen as given.
[[nodiscard]] PsiEstimate fit_psi(const CovEstimate& cov, const TuningPlan& tuning);

/**
 * @brief Regularized right division Y A^dagger restricted to the leading M
 * eigenvectors of A A^*:
 *
 *   Y A^* (A A^* + gamma I)^{-1} P_M
 *
 * `eigen` must be the eigensystem of A A^*.
 */
[[nodiscard]] BlockOp regularized_right_division(const BlockOp& Y, const BlockOp& A,
                                                 const EigenSystem& eigen, int M, double gamma);

/// Operators psi_1..psi_jmax of the inverted representation of a model, via
/// psi_i = alpha_i + beta_i - sum_{j=1}^{min(i-1,q)} beta_j psi_{i-j}.
[[nodiscard]] std::vector<LinearOp> population_psi(const ModelSpec& model, int j_max);

/// phi_0 = I, phi_i = sum_{j=1}^{i} psi_j phi_{i-j}; returns phi_1..phi_imax.
/// psi is treated as zero beyond its length.
[[nodiscard]] std::vector<LinearOp> phi_from_psi(const std::vector<LinearOp>& psi, int i_max);

/// HS norm of the tail block row (psi_{L+1} ... psi_jmax); a bias diagnostic for simulated models.
[[nodiscard]] double population_psi_tail_norm(const ModelSpec& model, int L, int j_max = 200);

}  // namespace hinv
