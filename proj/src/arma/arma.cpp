#include "hinv/arma/arma.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hinv/core/error.hpp"

namespace hinv {

namespace {

ArmaDiagnostics second_stage_diagnostics(const EigenSystem& es, int M, double gamma) {
    ArmaDiagnostics d;
    d.M = M;
    d.gamma = gamma;
    d.leading_value = es.values[0];
    d.truncation_value = es.values[M - 1];
    d.condition = d.truncation_value > 0.0 ? d.leading_value / d.truncation_value
                                           : std::numeric_limits<double>::infinity();
    const GapStats g = gap_stats(es.values, M);
    d.Lambda_M = g.Lambda;
    d.degenerate = g.degenerate;
    d.identifiability_warning =
        !(d.leading_value > 0.0) || d.truncation_value / d.leading_value < kIdentifiabilityRatio;
    return d;
}

const LinearOp& psi_at(const std::vector<LinearOp>& psi, int index, LinearOp& identity_slot) {
    if (index == 0) return identity_slot;
    return psi.at(static_cast<std::size_t>(index - 1));
}

TuningPlan with_lag(TuningPlan plan, int L) {
    plan.L = L;
    return plan;
}

}  // namespace

// ---------------------------------------------------------------------------
// fAR / fMA

ArmaFit fit_far(const CovEstimate& cov, int p, const TuningPlan& tuning) {
    if (p < 1) throw InvalidArgument("fit_far: p must be >= 1");
    if (cov.L != p) throw InvalidArgument("fit_far: covariance must be stacked with L = p");
    PsiEstimate psi = fit_psi(cov, with_lag(tuning, p));
    ArmaFit fit;
    fit.alpha = psi.psi;
    fit.psi_source = std::move(psi);
    return fit;
}

ArmaFit fit_far(const SamplePath& s, int p, const TuningPlan& tuning, bool center) {
    if (p < 1) throw InvalidArgument("fit_far: p must be >= 1");
    if (s.size() <= p) throw InvalidArgument("fit_far: need N > p");
    const TuningPlan plan = with_lag(tuning, p);
    plan.validate(s.dim());
    return fit_far(estimate_covariance(s, p, center), p, plan);
}

ArmaFit fit_fma_from_psi(const PsiEstimate& psi, int q) {
    if (q < 1) throw InvalidArgument("fit_fma: q must be >= 1");
    ArmaFit fit;
    fit.beta = phi_from_psi(psi.psi, q);
    fit.psi_source = psi;
    return fit;
}

ArmaFit fit_fma(const SamplePath& s, int q, const TuningPlan& tuning, std::optional<int> L_override,
                bool center) {
    const TuningPlan plan = L_override ? with_lag(tuning, *L_override) : tuning;
    return fit_fma_from_psi(fit_psi(s, plan, center), q);
}

// ---------------------------------------------------------------------------
// fARMA(1,1)

ArmaFit fit_farma11_from_psi(const std::vector<LinearOp>& psi, int M, double gamma,
                             const EigenSystem& eigen) {
    if (psi.size() < 2) throw InvalidArgument("fit_farma11: need psi_1 and psi_2 (L >= 2)");
    const BlockOp psi1 = as_block(psi[0]);
    const BlockOp psi2 = as_block(psi[1]);
    if (M < 1 || M > psi1.dim()) throw InvalidArgument("fit_farma11: M must satisfy 1 <= M <= dim");
    const BlockOp ratio = regularized_right_division(psi2, psi1, eigen, M, gamma);
    LinearOp beta = LinearOp(psi[0].space(), -ratio.mat());
    LinearOp alpha = psi[0] - beta;

    ArmaFit fit;
    fit.alpha = {std::move(alpha)};
    fit.beta = {std::move(beta)};
    fit.pi_hat = psi1;
    fit.diagnostics = second_stage_diagnostics(eigen, M, gamma);
    fit.second_stage_eigen = eigen;
    return fit;
}

ArmaFit fit_farma11_from_psi(const std::vector<LinearOp>& psi, int M, double gamma) {
    if (psi.size() < 2) throw InvalidArgument("fit_farma11: need psi_1 and psi_2 (L >= 2)");
    const EigenSystem es = sym_eigen(psi[0] * psi[0].adjoint(), M);
    return fit_farma11_from_psi(psi, M, gamma, es);
}

ArmaFit fit_farma11(const SamplePath& s, const ArmaTuning& tuning, bool center) {
    if (tuning.base.L < 2) throw InvalidArgument("fit_farma11: L must be >= 2");
    PsiEstimate psi = fit_psi(s, tuning.base, center);
    ArmaFit fit = fit_farma11_from_psi(psi.psi, tuning.M, tuning.gamma);
    fit.psi_source = std::move(psi);
    return fit;
}

// ---------------------------------------------------------------------------
// fARMA(p,q)

BlockOp build_pi_hat(const std::vector<LinearOp>& psi, int p, int q) {
    if (p < 0 || q < 1) throw InvalidArgument("build_pi_hat: need p >= 0 and q >= 1");
    const int needed = p + 2 * q - 2;
    if (static_cast<int>(psi.size()) < needed)
        throw InvalidArgument("build_pi_hat: psi list too short, need psi_1..psi_" +
                              std::to_string(needed));
    if (psi.empty()) throw InvalidArgument("build_pi_hat: empty psi list");
    LinearOp identity = LinearOp::identity(psi.front().space());
    BlockGrid grid(q);
    for (int r = 1; r <= q; ++r)
        for (int c = 1; c <= q; ++c) grid[r - 1].push_back(psi_at(psi, p + 2 * q - r - c, identity));
    return block_assemble(grid);
}

BlockOp psi_prime(const std::vector<LinearOp>& psi, int p, int q, int i) {
    if (q < 1 || i < 0) throw InvalidArgument("psi_prime: need q >= 1 and i >= 0");
    const int needed = p + q + i - 1;
    if (static_cast<int>(psi.size()) < needed)
        throw InvalidArgument("psi_prime: psi list too short, need psi_1..psi_" +
                              std::to_string(needed));
    if (psi.empty()) throw InvalidArgument("psi_prime: empty psi list");
    LinearOp identity = LinearOp::identity(psi.front().space());
    std::vector<LinearOp> row;
    for (int c = 1; c <= q; ++c) row.push_back(psi_at(psi, p + q + i - c, identity));
    return block_row(row);
}

BqEstimate fit_Bq(const std::vector<LinearOp>& psi, int p, int q, int M, double gamma,
                  const EigenSystem& eigen) {
    const int needed = p + 2 * q - 1;
    if (static_cast<int>(psi.size()) < needed)
        throw InvalidArgument("fit_Bq: psi list too short, need psi_1..psi_" +
                              std::to_string(needed));
    BlockOp pi = build_pi_hat(psi, p, q);
    if (M < 1 || M > q * pi.dim()) throw InvalidArgument("fit_Bq: M must satisfy 1 <= M <= q*dim");
    const BlockOp target = psi_prime(psi, p, q, q);
    BlockOp B = -1.0 * regularized_right_division(target, pi, eigen, M, gamma);
    return BqEstimate{std::move(B), std::move(pi), eigen};
}

BqEstimate fit_Bq(const std::vector<LinearOp>& psi, int p, int q, int M, double gamma) {
    const BlockOp pi = build_pi_hat(psi, p, q);
    const EigenSystem es = sym_eigen(pi * pi.adjoint(), M);
    return fit_Bq(psi, p, q, M, gamma, es);
}

namespace {

ArmaFit assemble_pq(const std::vector<LinearOp>& psi, int p, int q, BqEstimate bq, int M,
                    double gamma) {
    ArmaFit fit;
    fit.beta = split_row(bq.B_hat);
    for (int i = 1; i <= p; ++i) {
        Eigen::MatrixXd a = psi.at(i - 1).mat();
        if (i <= q) a -= fit.beta[i - 1].mat();
        for (int j = 1; j <= std::min(i - 1, q); ++j) a += fit.beta[j - 1].mat() * psi[i - j - 1].mat();
        fit.alpha.emplace_back(psi.front().space(), std::move(a));
    }
    fit.diagnostics = second_stage_diagnostics(bq.eigen, M, gamma);
    fit.pi_hat = std::move(bq.pi_hat);
    fit.second_stage_eigen = std::move(bq.eigen);
    return fit;
}

}  // namespace

ArmaFit fit_farma_pq_from_psi(const std::vector<LinearOp>& psi, int p, int q, int M,
                              double gamma) {
    if (p < 1 || q < 1) throw InvalidArgument("fit_farma_pq_from_psi: need p, q >= 1");
    return assemble_pq(psi, p, q, fit_Bq(psi, p, q, M, gamma), M, gamma);
}

ArmaFit fit_farma_pq(const SamplePath& s, int p, int q, const ArmaTuning& tuning, bool center) {
    if (p < 0 || q < 0 || p + q == 0) throw InvalidArgument("fit_farma_pq: invalid orders");
    if (q == 0) return fit_far(s, p, tuning.base, center);
    if (p == 0) return fit_fma(s, q, tuning.base, std::nullopt, center);
    if (tuning.base.L < p + 2 * q - 1)
        throw InvalidArgument("fit_farma_pq: L must be >= p + 2q - 1 = " +
                              std::to_string(p + 2 * q - 1));
    PsiEstimate psi = fit_psi(s, tuning.base, center);
    ArmaFit fit = fit_farma_pq_from_psi(psi.psi, p, q, tuning.M, tuning.gamma);
    fit.psi_source = std::move(psi);
    return fit;
}

ArmaFit fit_farma_auto(const PsiEstimate& psi, int p, int q, std::optional<int> M,
                       std::optional<double> gamma) {
    if (p < 1 || q < 1) throw InvalidArgument("fit_farma_auto: need p, q >= 1");
    const BlockOp pi = build_pi_hat(psi.psi, p, q);
    const int n_vals = pi.rows() * pi.dim();
    const EigenSystem es = sym_eigen(pi * pi.adjoint(), n_vals);
    const SecondStage defaults = default_second_stage(es, std::max(psi.N, 1));
    const int m = M.value_or(defaults.M);
    const double g = gamma.value_or(defaults.gamma);
    ArmaFit fit = assemble_pq(psi.psi, p, q, fit_Bq(psi.psi, p, q, m, g, es), m, g);
    fit.psi_source = psi;
    return fit;
}

SecondStage default_second_stage(const EigenSystem& eigen, int N) {
    SecondStage s;
    s.M = trace_fraction_rank(eigen.values, kTraceFraction, kEigenFloorRatio);
    const double value = eigen.values[s.M - 1];
    s.gamma = (value > 0.0 ? value : 1.0) / std::sqrt(static_cast<double>(std::max(N, 1)));
    return s;
}

int default_arma_lag(int N, int p, int q) { return std::max(default_lag(N), p + 2 * q + 3); }

ResolvedFirstStage resolve_first_stage(const SamplePath& s, const TuningOverrides& overrides,
                                       int default_L) {
    const int L = overrides.L.value_or(default_L);
    if (L < 1 || L >= s.size()) throw InvalidArgument("tuning: need 1 <= L < N");
    CovEstimate cov = estimate_covariance(s, L, overrides.center);
    TuningPlan plan = default_truncation(s.size(), L, cov.eigen);
    if (overrides.K) plan.K = *overrides.K;
    if (overrides.theta) plan.theta = *overrides.theta;
    if (overrides.K || overrides.theta || overrides.L) plan.schedule_id = "override";
    plan.validate(s.dim());
    return {std::move(cov), plan};
}

}  // namespace hinv
