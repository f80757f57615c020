#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hinv/core/eigen_system.hpp"
#include "hinv/core/operators.hpp"
#include "hinv/invertible/psi.hpp"
#include "hinv/invertible/tuning.hpp"
#include "hinv/sim/simulate.hpp"

namespace hinv {

/// First-stage plan plus the second-stage truncation M and Tychonoff parameter gamma.
struct ArmaTuning {
    TuningPlan base;
    int M = 1;
    double gamma = 1.0;
};

struct ArmaDiagnostics {
    int M = 0;
    double gamma = 0.0;
    double leading_value = 0.0;         ///< rho_1 or zeta_1
    double truncation_value = 0.0;      ///< rho_M or zeta_M
    double condition = 0.0;             ///< leading / truncation value (inf if zero)
    std::optional<double> Lambda_M;
    bool degenerate = false;
    bool identifiability_warning = false;  ///< zeta_M / zeta_1 < 1e-10
};

struct ArmaFit {
    std::vector<LinearOp> alpha;
    std::vector<LinearOp> beta;
    std::optional<PsiEstimate> psi_source;
    std::optional<BlockOp> pi_hat;
    std::optional<EigenSystem> second_stage_eigen;
    ArmaDiagnostics diagnostics;
};

/// Ratio below which the retained spectrum of Pi Pi^* counts as near singular.
inline constexpr double kIdentifiabilityRatio = 1e-10;

/// fAR(p): alpha_i are the components of the Psi estimate with L = p.
[[nodiscard]] ArmaFit fit_far(const SamplePath& s, int p, const TuningPlan& tuning,
                              bool center = false);
[[nodiscard]] ArmaFit fit_far(const CovEstimate& cov, int p, const TuningPlan& tuning);

/// fMA(q): beta_j = phi_j computed from the Psi estimate.
[[nodiscard]] ArmaFit fit_fma(const SamplePath& s, int q, const TuningPlan& tuning,
                              std::optional<int> L_override = std::nullopt, bool center = false);
[[nodiscard]] ArmaFit fit_fma_from_psi(const PsiEstimate& psi, int q);

/**
 * @brief fARMA(1,1) from the first two psi estimates:
 *
 *   beta_1 = -psi_2 psi_1^* (psi_1 psi_1^* + gamma I)^{-1} P_M,   alpha_1 = psi_1 - beta_1
 *
 * with P_M projecting on the leading M eigenvectors of psi_1 psi_1^*.
 */
[[nodiscard]] ArmaFit fit_farma11(const SamplePath& s, const ArmaTuning& tuning,
                                  bool center = false);
[[nodiscard]] ArmaFit fit_farma11_from_psi(const std::vector<LinearOp>& psi, int M, double gamma);
/// Uses the supplied eigensystem of psi_1 psi_1^*.
[[nodiscard]] ArmaFit fit_farma11_from_psi(const std::vector<LinearOp>& psi, int M, double gamma,
                                           const EigenSystem& eigen);

/// q x q block-Hankel matrix with block (r, c) = psi_{p+2q-r-c}, r, c = 1..q.
/// psi_0 is the identity.
[[nodiscard]] BlockOp build_pi_hat(const std::vector<LinearOp>& psi, int p, int q);

/// (psi_{p+q+i-1} ... psi_{p+i}) as a 1 x q block row.
[[nodiscard]] BlockOp psi_prime(const std::vector<LinearOp>& psi, int p, int q, int i);

struct BqEstimate {
    BlockOp B_hat;      ///< 1 x q block row (beta_1 ... beta_q)
    BlockOp pi_hat;
    EigenSystem eigen;  ///< of Pi Pi^*
};

/// B_q = -Psi'_[q] Pi^* (Pi Pi^* + gamma I)^{-1} P_M.
[[nodiscard]] BqEstimate fit_Bq(const std::vector<LinearOp>& psi, int p, int q, int M,
                                double gamma);
[[nodiscard]] BqEstimate fit_Bq(const std::vector<LinearOp>& psi, int p, int q, int M,
                                double gamma, const EigenSystem& eigen);

/**
 * @brief fARMA(p,q): beta_j from fit_Bq and
 *
 *   alpha_i = psi_i - beta_i + sum_{j=1}^{min(i-1,q)} beta_j psi_{i-j},   i = 1..p.
 *
 * q = 0 delegates to fit_far, p = 0 to fit_fma.
 */
[[nodiscard]] ArmaFit fit_farma_pq(const SamplePath& s, int p, int q, const ArmaTuning& tuning,
                                   bool center = false);
[[nodiscard]] ArmaFit fit_farma_pq_from_psi(const std::vector<LinearOp>& psi, int p, int q, int M,
                                            double gamma);

/// Default second stage: M holds 95% of the trace (capped at 1e-6 of the top value),
/// gamma = value_M N^{-1/2}.
struct SecondStage {
    int M = 1;
    double gamma = 1.0;
};
[[nodiscard]] SecondStage default_second_stage(const EigenSystem& eigen, int N);

/// fARMA(p,q) (or (1,1)) on a first-stage estimate; unset M / gamma take the
/// second-stage defaults with N = psi.N.
[[nodiscard]] ArmaFit fit_farma_auto(const PsiEstimate& psi, int p, int q,
                                     std::optional<int> M = std::nullopt,
                                     std::optional<double> gamma = std::nullopt);

/// Default L for (p,q) fits: max(default_lag(N), p + 2q + 3).
[[nodiscard]] int default_arma_lag(int N, int p, int q);

/// Tuning for a sample with overrides applied on top of the defaults; `min_L`
/// raises the default stacking depth.
struct ResolvedFirstStage {
    CovEstimate cov;
    TuningPlan plan;
};
[[nodiscard]] ResolvedFirstStage resolve_first_stage(const SamplePath& s,
                                                     const TuningOverrides& overrides,
                                                     int default_L);

}  // namespace hinv
