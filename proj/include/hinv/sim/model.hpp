#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hinv/core/operators.hpp"

namespace hinv {

/// Gaussian functional white noise with covariance diagonal in the basis.
struct NoiseSpec {
    BasisSpace space{1};
    Eigen::VectorXd eig;  ///< variances of the coefficients, positive and non-increasing
    std::uint64_t seed = 0;

    void validate() const;
    /// eig_j = scale * j^{-2}, j = 1..dim.
    static NoiseSpec inverse_square(BasisSpace space, double scale, std::uint64_t seed);
    [[nodiscard]] LinearOp covariance() const;
};

enum class ModelKind { FAR, FMA, FARMA, CausalLP };

[[nodiscard]] std::string_view to_string(ModelKind kind);
[[nodiscard]] ModelKind parse_model_kind(std::string_view name);

/**
 * @brief fAR(p), fMA(q), fARMA(p,q) or truncated causal linear process.
 *
 *   X_k = e_k + sum_i ar[i](X_{k-i}) + sum_j ma[j](e_{k-j})     (fAR/fMA/fARMA)
 *   X_k = e_k + sum_j lp[j](e_{k-j}),  j = 1..J                  (causal LP)
 */
struct ModelSpec {
    ModelKind kind = ModelKind::FAR;
    std::vector<LinearOp> ar;
    std::vector<LinearOp> ma;
    std::vector<LinearOp> lp;
    NoiseSpec noise;

    [[nodiscard]] const BasisSpace& space() const noexcept { return noise.space; }
    [[nodiscard]] int p() const noexcept { return static_cast<int>(ar.size()); }
    [[nodiscard]] int q() const noexcept { return static_cast<int>(ma.size()); }

    /// Operators applied to past innovations: ma for ARMA kinds, lp for causal LP.
    [[nodiscard]] const std::vector<LinearOp>& innovation_ops() const noexcept {
        return kind == ModelKind::CausalLP ? lp : ma;
    }

    /// Throws NumericalError when sum ||ar_i||_op >= 1 or sum ||ma_j||_op >= 1.
    void validate() const;
    [[nodiscard]] double ar_norm_sum() const;
    [[nodiscard]] double ma_norm_sum() const;
    /// FNV-1a over kind, orders, matrices and noise variances; excludes the seed.
    [[nodiscard]] std::string hash() const;

    static ModelSpec far(std::vector<LinearOp> ar, NoiseSpec noise);
    static ModelSpec fma(std::vector<LinearOp> ma, NoiseSpec noise);
    static ModelSpec farma(std::vector<LinearOp> ar, std::vector<LinearOp> ma, NoiseSpec noise);
    static ModelSpec causal_lp(std::vector<LinearOp> lp, NoiseSpec noise);
};

/// Random operator with entries g_ij / (i j), g_ij ~ N(0,1), rescaled to the target HS norm.
[[nodiscard]] LinearOp random_hs_operator(BasisSpace space, double target_hs_norm,
                                          std::uint64_t seed);

/// Causal representation phi_0 = I, phi_1, ... truncated once the HS tail is negligible.
/// For causal LPs this is (I, lp_1, ..., lp_J). Requires a validated model.
[[nodiscard]] std::vector<LinearOp> causal_operators(const ModelSpec& model,
                                                     double tail_tol = 1e-12);

}  // namespace hinv
