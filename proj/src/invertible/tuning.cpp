#include "hinv/invertible/tuning.hpp"

#include <cmath>

#include "hinv/core/error.hpp"

namespace hinv {

void TuningPlan::validate(int dim) const {
    if (L < 1) throw InvalidArgument("tuning: L must be >= 1");
    if (K < 1 || K > L * dim) throw InvalidArgument("tuning: K must satisfy 1 <= K <= L*dim");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("tuning: theta must be > 0");
}

int default_lag(int N) {
    if (N < 1) throw InvalidArgument("default_lag: N must be >= 1");
    long long L = 1;
    while (L * L * L * L < N) ++L;
    return static_cast<int>(L);
}

TuningPlan default_truncation(int N, int L, const EigenSystem& eigen) {
    TuningPlan plan;
    plan.L = L;
    plan.K = trace_fraction_rank(eigen.values, kTraceFraction, kEigenFloorRatio);
    const double lambda_k = eigen.values[plan.K - 1];
    const double scale = lambda_k > 0.0 ? lambda_k : 1.0;
    plan.theta = scale / std::sqrt(static_cast<double>(N));
    plan.schedule_id = "default";
    return plan;
}

TuningPlan default_tuning(int N, int dim, const EigenSystem& eigen) {
    if (N < 20) throw InvalidArgument("default_tuning: N must be >= 20");
    const int L = default_lag(N);
    if (dim < 1 || eigen.size() % dim != 0)
        throw InvalidArgument("default_tuning: eigensystem size is not a multiple of dim");
    return default_truncation(N, L, eigen);
}

}  // namespace hinv
