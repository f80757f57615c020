#pragma once

#include <string>

#include "hinv/core/eigen_system.hpp"
#include "hinv/core/operators.hpp"
#include "hinv/sim/model.hpp"
#include "hinv/sim/simulate.hpp"

namespace hinv {

/**
 * @brief Empirical covariance of the stacked process X^[L].
 *
 *   C = (N-L+1)^{-1} sum_{k=L}^{N} X_k^[L] (x) X_k^[L]
 *
 * returned as an L x L BlockOp whose matrix is the average of x x^T over
 * the stacked vectors x = (X_k, ..., X_{k-L+1}). Exactly symmetric.
 */
[[nodiscard]] BlockOp emp_cov_stacked(const SamplePath& s, int L);

/**
 * @brief Empirical lag-1 cross-covariance between X^[L] and X.
 *
 *   D = (N-L)^{-1} sum_{k=L}^{N-1} X_k^[L] (x) X_{k+1}
 *
 * a 1 x L block row; block j is the average of X_{k+1} X_{k-j+1}^T.
 */
[[nodiscard]] BlockOp emp_crosscov_lag1(const SamplePath& s, int L);

/// Empirical lag-h covariance: (N-h)^{-1} sum_{k=1}^{N-h} X_k (x) X_{k+h} for h >= 0,
/// and the adjoint of lag -h for h < 0.
[[nodiscard]] LinearOp emp_lag_cov(const SamplePath& s, int h);

struct PopulationOperators {
    BlockOp C_stacked;
    BlockOp D_cross;
    std::vector<LinearOp> lag_cov;  ///< C^0 .. C^L with C^h = E[X_0 (x) X_h]
};

/// Population C_{X^[L]} and D_{X^[L],X}. fAR(1) uses the Lyapunov fixed point
/// C = a C a* + C_e; other models sum the causal representation.
[[nodiscard]] PopulationOperators population_operators(const ModelSpec& model, int L);

/// Population lag covariances C^0..C^max_lag.
[[nodiscard]] std::vector<LinearOp> population_lag_covariances(const ModelSpec& model,
                                                               int max_lag);

/// Stacked operator whose block (a, b) is C^{b-a} (adjoint for b < a).
[[nodiscard]] BlockOp stack_lag_covariances(const std::vector<LinearOp>& lag_cov, int L);

struct CovEstimate {
    BlockOp C_stacked;
    BlockOp D_cross;
    int L = 1;
    int N = 0;
    bool centered = false;
    EigenSystem eigen;
};

/// Centers the sample if requested, then computes C, D and the eigensystem of C.
[[nodiscard]] CovEstimate estimate_covariance(const SamplePath& s, int L, bool center);
/// Wraps given (for instance population) operators with their eigensystem.
[[nodiscard]] CovEstimate make_cov_estimate(BlockOp C, BlockOp D, int N = 0);

/// Writes C.bin, D.bin and cov.json into dir.
void save_cov_estimate(const CovEstimate& cov, const std::string& dir);

}  // namespace hinv
