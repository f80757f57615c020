#pragma once

#include <optional>
#include <string>

#include "hinv/core/eigen_system.hpp"

namespace hinv {

/// Stacking depth L, spectral truncation K and Tychonoff parameter theta.
struct TuningPlan {
    int L = 1;
    int K = 1;
    double theta = 1.0;
    std::string schedule_id = "manual";

    /// Checks 1 <= K <= L*dim, theta > 0, L >= 1.
    void validate(int dim) const;
};

/// Fraction of the trace the default truncation retains.
inline constexpr double kTraceFraction = 0.95;
/// Default truncations keep only eigenvalues >= this ratio times the largest.
inline constexpr double kEigenFloorRatio = 1e-6;

/// Smallest L with L^4 >= N, i.e. ceil(N^{1/4}), at least 1.
[[nodiscard]] int default_lag(int N);

/**
 * @brief Concrete defaults for the tuning sequences.
 *
 * L = ceil(N^{1/4}); K = smallest k holding 95% of the trace of the stacked
 * covariance, capped so that its k'th eigenvalue is at least 1e-6 times the
 * largest; theta = lambda_K N^{-1/2}. `eigen` must be the eigensystem of the
 * stacked covariance for this L (its size is used for K).
 */
[[nodiscard]] TuningPlan default_tuning(int N, int dim, const EigenSystem& eigen);

/// Default K and theta for a given eigensystem and sample size, keeping L.
[[nodiscard]] TuningPlan default_truncation(int N, int L, const EigenSystem& eigen);

/// User overrides; unset fields fall back to the defaults.
struct TuningOverrides {
    std::optional<int> L;
    std::optional<int> K;
    std::optional<double> theta;
    std::optional<int> M;
    std::optional<double> gamma;
    bool center = false;
};

}  // namespace hinv
