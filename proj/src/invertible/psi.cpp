#include "hinv/invertible/psi.hpp"

#include <cmath>

#include "hinv/core/error.hpp"

namespace hinv {

PsiEstimate fit_psi(const CovEstimate& cov, const TuningPlan& tuning) {
    const int dim = cov.C_stacked.dim();
    tuning.validate(dim);
    if (tuning.L != cov.L) throw InvalidArgument("fit_psi: tuning L differs from covariance L");
    if (cov.N > 0 && cov.N <= tuning.L) throw InvalidArgument("fit_psi: need N > L");

    const BlockOp resolvent = ridge_resolvent(cov.eigen, tuning.theta);
    const BlockOp projector = spectral_projector(cov.eigen, tuning.K);
    BlockOp Psi = cov.D_cross * resolvent * projector;

    PsiDiagnostics diag;
    diag.lambda_K = cov.eigen.values[tuning.K - 1];
    const GapStats gaps = gap_stats(cov.eigen.values, tuning.K);
    diag.Lambda_K = gaps.Lambda;
    diag.degenerate = gaps.degenerate;
    diag.clamped_mass = cov.eigen.clamped_mass;

    auto parts = split_row(Psi);
    return PsiEstimate{std::move(Psi), std::move(parts), tuning, cov.eigen, diag, cov.N,
                       cov.centered};
}

PsiEstimate fit_psi(const SamplePath& s, const TuningPlan& tuning, bool center) {
    tuning.validate(s.dim());
    if (s.size() <= tuning.L) throw InvalidArgument("fit_psi: need N > L");
    return fit_psi(estimate_covariance(s, tuning.L, center), tuning);
}

BlockOp regularized_right_division(const BlockOp& Y, const BlockOp& A, const EigenSystem& eigen,
                                   int M, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("regularized division: gamma must be > 0");
    if (M < 1 || M > eigen.size()) throw InvalidArgument("regularized division: M out of range");
    if (A.rows() != eigen.blocks) throw InvalidArgument("regularized division: eigensystem shape");
    const BlockOp resolvent = ridge_resolvent(eigen, gamma);
    const BlockOp projector = spectral_projector(eigen, M);
    return Y * A.adjoint() * resolvent * projector;
}

std::vector<LinearOp> population_psi(const ModelSpec& model, int j_max) {
    model.validate();
    if (j_max < 1) throw InvalidArgument("population_psi: j_max must be >= 1");
    const BasisSpace space = model.space();
    const auto& beta = model.innovation_ops();
    const int p = model.p();
    const int q = static_cast<int>(beta.size());

    std::vector<LinearOp> psi;
    psi.reserve(j_max);
    for (int i = 1; i <= j_max; ++i) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim(), space.dim());
        if (i <= p) m += model.ar[i - 1].mat();
        if (i <= q) m += beta[i - 1].mat();
        for (int j = 1; j <= std::min(i - 1, q); ++j) m -= beta[j - 1].mat() * psi[i - j - 1].mat();
        psi.emplace_back(space, std::move(m));
    }
    return psi;
}

std::vector<LinearOp> phi_from_psi(const std::vector<LinearOp>& psi, int i_max) {
    if (i_max < 1) throw InvalidArgument("phi_from_psi: i_max must be >= 1");
    if (psi.empty()) throw InvalidArgument("phi_from_psi: empty psi list");
    const BasisSpace space = psi.front().space();
    const auto n = static_cast<int>(psi.size());
    // phi[0] = I
    std::vector<Eigen::MatrixXd> phi{Eigen::MatrixXd::Identity(space.dim(), space.dim())};
    phi.reserve(i_max + 1);
    for (int i = 1; i <= i_max; ++i) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim(), space.dim());
        for (int j = 1; j <= std::min(i, n); ++j) m += psi[j - 1].mat() * phi[i - j];
        phi.push_back(std::move(m));
    }
    std::vector<LinearOp> out;
    out.reserve(i_max);
    for (int i = 1; i <= i_max; ++i) out.emplace_back(space, std::move(phi[i]));
    return out;
}

double population_psi_tail_norm(const ModelSpec& model, int L, int j_max) {
    if (j_max <= L) return 0.0;
    const auto psi = population_psi(model, j_max);
    double sq = 0.0;
    for (int l = L + 1; l <= j_max; ++l) {
        const double n = psi[l - 1].hs_norm();
        sq += n * n;
    }
    return std::sqrt(sq);
}

}  // namespace hinv
