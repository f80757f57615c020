#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hinv/core/error.hpp"
#include "hinv/cov/covariance.hpp"
#include "hinv/invertible/psi.hpp"
#include "hinv/invertible/tuning.hpp"
#include "hinv/sim/simulate.hpp"
#include "test_util.hpp"

using namespace hinv;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

NoiseSpec unit_noise(std::uint64_t seed) { return NoiseSpec{BasisSpace(1), VectorXd::Ones(1), seed}; }

CovEstimate population_estimate(const ModelSpec& m, int L) {
    const PopulationOperators pop = population_operators(m, L);
    return make_cov_estimate(pop.C_stacked, pop.D_cross);
}

TuningPlan full_plan(int L, int dim, double theta = 1e-12) { return TuningPlan{L, L * dim, theta, "manual"}; }

}  // namespace

TEST(FitPsi, PopulationInjectionScalarFar1) {
    // (psi1, psi2) [[4/3, 2/3], [2/3, 4/3]] = (2/3, 1/3)  =>  (psi1, psi2) = (1/2, 0)
    const ModelSpec m = ModelSpec::far({test::scalar_op(0.5)}, unit_noise(1));
    const PsiEstimate est = fit_psi(population_estimate(m, 2), full_plan(2, 1));
    ASSERT_EQ(est.psi.size(), 2u);
    EXPECT_NEAR(est.psi[0].mat()(0, 0), 0.5, 1e-8);
    EXPECT_NEAR(est.psi[1].mat()(0, 0), 0.0, 1e-8);
}

TEST(FitPsi, WhiteNoiseGivesSmallOperator) {
    const NoiseSpec noise = NoiseSpec::inverse_square(BasisSpace(3), 1.0, 12);
    const SamplePath s = draw_white_noise(noise, 100000);
    const CovEstimate cov = estimate_covariance(s, 2, false);
    const PsiEstimate est = fit_psi(cov, default_truncation(s.size(), 2, cov.eigen));
    EXPECT_LE(est.Psi_L.hs_norm(), 0.05);
}

TEST(FitPsi, LargeThetaShrinksToZero) {
    const ModelSpec m = ModelSpec::far({random_hs_operator(BasisSpace(3), 0.5, 1)},
                                       NoiseSpec::inverse_square(BasisSpace(3), 1.0, 2));
    const SamplePath s = simulate(m, 300);
    const CovEstimate cov = estimate_covariance(s, 2, false);
    const double dnorm = op_norm(cov.D_cross.mat());
    for (double theta : {1e2, 1e4, 1e8}) {
        const PsiEstimate est = fit_psi(cov, full_plan(2, 3, theta));
        EXPECT_LE(est.Psi_L.mat().cwiseAbs().maxCoeff(), dnorm / theta);
    }
}

TEST(FitPsi, HsAdditivityAndBlocks) {
    const ModelSpec m = ModelSpec::far({random_hs_operator(BasisSpace(4), 0.5, 3)},
                                       NoiseSpec::inverse_square(BasisSpace(4), 1.0, 4));
    const SamplePath s = simulate(m, 500);
    const PsiEstimate est = fit_psi(s, TuningPlan{3, 7, 1e-3, "manual"});
    double sq = 0.0;
    for (std::size_t j = 0; j < est.psi.size(); ++j) {
        EXPECT_EQ(est.psi[j].mat(), est.Psi_L.block(0, static_cast<int>(j)).mat());
        sq += std::pow(est.psi[j].hs_norm(), 2);
    }
    EXPECT_NEAR(est.Psi_L.hs_norm() * est.Psi_L.hs_norm(), sq, 1e-14 * sq);
}

TEST(FitPsi, SignInvariance) {
    const BasisSpace h(3);
    const ModelSpec m = ModelSpec::farma({random_hs_operator(h, 0.5, 5)}, {random_hs_operator(h, 0.3, 6)},
                                         NoiseSpec::inverse_square(h, 1.0, 7));
    const CovEstimate cov = estimate_covariance(simulate(m, 400), 3, false);
    const TuningPlan plan{3, 5, 1e-3, "manual"};
    const PsiEstimate ref = fit_psi(cov, plan);
    for (int pattern = 1; pattern < 16; ++pattern) {
        CovEstimate flipped = cov;
        for (int j = 0; j < flipped.eigen.size(); ++j)
            if ((pattern >> (j % 4)) & 1) flipped.eigen.vectors.col(j) *= -1.0;
        EXPECT_EQ(fit_psi(flipped, plan).Psi_L.mat(), ref.Psi_L.mat());
    }
}

TEST(FitPsi, ExactRecoveryForFar) {
    for (int dim : {1, 2, 3}) {
        const BasisSpace h(dim);
        const NoiseSpec noise = NoiseSpec::inverse_square(h, 1.0, 8);
        for (int p : {1, 2, 3}) {
            std::vector<LinearOp> ar;
            for (int i = 0; i < p; ++i) ar.push_back(random_hs_operator(h, 0.3 / p + 0.1, 10 * p + i));
            const ModelSpec m = ModelSpec::far(ar, noise);
            for (int L = p; L <= p + 3; ++L) {
                const PsiEstimate est = fit_psi(population_estimate(m, L), full_plan(L, dim));
                for (int i = 0; i < L; ++i) {
                    const MatrixXd truth = i < p ? ar[i].mat() : MatrixXd::Zero(dim, dim);
                    EXPECT_LE((est.psi[i].mat() - truth).norm(), 1e-7)
                        << "dim " << dim << " p " << p << " L " << L << " i " << i;
                }
            }
        }
    }
}

TEST(FitPsi, PreconditionErrors) {
    const SamplePath s(BasisSpace(2), MatrixXd::Ones(3, 2));
    EXPECT_THROW((void)fit_psi(s, TuningPlan{3, 1, 1.0, "manual"}), InvalidArgument);
    const SamplePath t(BasisSpace(2), MatrixXd::Random(20, 2));
    EXPECT_THROW((void)fit_psi(t, TuningPlan{2, 5, 1.0, "manual"}), InvalidArgument);
    EXPECT_THROW((void)fit_psi(t, TuningPlan{2, 0, 1.0, "manual"}), InvalidArgument);
    EXPECT_THROW((void)fit_psi(t, TuningPlan{2, 2, 0.0, "manual"}), InvalidArgument);
}

TEST(PopulationPsi, Fma1AlternatingGeometric) {
    const auto psi = population_psi(ModelSpec::fma({test::scalar_op(0.5)}, unit_noise(1)), 8);
    for (int i = 1; i <= 8; ++i)
        EXPECT_DOUBLE_EQ(psi[i - 1].mat()(0, 0), (i % 2 ? 1.0 : -1.0) * std::pow(0.5, i));
}

TEST(PopulationPsi, Farma11ByHand) {
    const auto psi = population_psi(
        ModelSpec::farma({test::scalar_op(0.5)}, {test::scalar_op(0.3)}, unit_noise(1)), 3);
    EXPECT_NEAR(psi[0].mat()(0, 0), 0.8, 1e-15);
    EXPECT_NEAR(psi[1].mat()(0, 0), -0.24, 1e-15);
    EXPECT_NEAR(psi[2].mat()(0, 0), 0.072, 1e-15);
}

TEST(PopulationPsi, Far2IsFiniteSequence) {
    const BasisSpace h(2);
    const std::vector<LinearOp> ar{random_hs_operator(h, 0.4, 1), random_hs_operator(h, 0.3, 2)};
    const auto psi = population_psi(ModelSpec::far(ar, NoiseSpec::inverse_square(h, 1.0, 0)), 6);
    EXPECT_EQ(psi[0].mat(), ar[0].mat());
    EXPECT_EQ(psi[1].mat(), ar[1].mat());
    for (int i = 2; i < 6; ++i) EXPECT_EQ(psi[i].mat(), MatrixXd::Zero(2, 2));
}

TEST(PopulationPsi, MatchesInvertedSeriesOracle) {
    const BasisSpace h(3);
    const NoiseSpec noise = NoiseSpec::inverse_square(h, 1.0, 0);
    const std::vector<LinearOp> ar{random_hs_operator(h, 0.4, 3), random_hs_operator(h, 0.2, 4)};
    const std::vector<LinearOp> ma{random_hs_operator(h, 0.3, 5), random_hs_operator(h, 0.2, 6)};
    const auto psi = population_psi(ModelSpec::farma(ar, ma, noise), 30);
    const auto oracle = test::inverted_series_oracle(test::matrices(ar), test::matrices(ma), 3, 31);
    for (int i = 0; i < 30; ++i) EXPECT_LT((psi[i].mat() - oracle[i]).norm(), 1e-12);
}

TEST(PopulationPsi, NonInvertibleRejected) {
    EXPECT_THROW((void)population_psi(ModelSpec::fma({test::scalar_op(1.5)}, unit_noise(1)), 5),
                 NumericalError);
}

TEST(PopulationPsi, TailNormDiagnostic) {
    const ModelSpec m = ModelSpec::fma({test::scalar_op(0.5)}, unit_noise(1));
    // sum_{l > 3} 0.25^l = 0.25^4 / (1 - 0.25)
    EXPECT_NEAR(population_psi_tail_norm(m, 3), std::sqrt(std::pow(0.25, 4) / 0.75), 1e-14);
    EXPECT_EQ(population_psi_tail_norm(ModelSpec::far({test::scalar_op(0.5)}, unit_noise(1)), 3), 0.0);
}

TEST(PhiFromPsi, DirectRecursion) {
    const auto phi = phi_from_psi({test::scalar_op(0.5), test::scalar_op(0.2)}, 3);
    EXPECT_NEAR(phi[0].mat()(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(phi[1].mat()(0, 0), 0.45, 1e-15);
    EXPECT_NEAR(phi[2].mat()(0, 0), 0.325, 1e-15);
}

TEST(PhiFromPsi, ZeroPsiGivesZeroPhi) {
    const BasisSpace h(3);
    const auto phi = phi_from_psi({LinearOp::zero(h)}, 5);
    for (const auto& op : phi) EXPECT_EQ(op.mat(), MatrixXd::Zero(3, 3));
}

TEST(PhiFromPsi, Fma2RoundTrip) {
    const BasisSpace h(3);
    const std::vector<LinearOp> ma{random_hs_operator(h, 0.4, 21), random_hs_operator(h, 0.3, 22)};
    const auto psi = population_psi(ModelSpec::fma(ma, NoiseSpec::inverse_square(h, 1.0, 0)), 60);
    const auto phi = phi_from_psi(psi, 60);
    EXPECT_LT((phi[0].mat() - ma[0].mat()).norm(), 1e-10);
    EXPECT_LT((phi[1].mat() - ma[1].mat()).norm(), 1e-10);
    for (int i = 2; i < 60; ++i) EXPECT_LT(phi[i].hs_norm(), 1e-10) << i;
}

TEST(PhiFromPsi, DualityAgainstPowerSeriesDivision) {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + trial % 4, p = 1 + trial % 2, q = 1 + (trial / 2) % 2;
        const BasisSpace h(d);
        std::vector<LinearOp> ar, ma;
        for (int i = 0; i < p; ++i) ar.push_back(random_hs_operator(h, 0.8 / p, rng()));
        for (int j = 0; j < q; ++j) ma.push_back(random_hs_operator(h, 0.8 / q, rng()));
        const ModelSpec m = ModelSpec::farma(ar, ma, NoiseSpec::inverse_square(h, 1.0, 0));
        const auto phi = phi_from_psi(population_psi(m, 60), 60);
        const auto oracle = test::causal_series_oracle(test::matrices(ar), test::matrices(ma), d, 61);
        for (int i = 0; i < 60; ++i) EXPECT_LT((phi[i].mat() - oracle[i]).norm(), 1e-9);
    }
}

TEST(DefaultTuning, LagArithmetic) {
    EXPECT_EQ(default_lag(256), 4);
    EXPECT_EQ(default_lag(257), 5);
    EXPECT_EQ(default_lag(20), 3);
    EXPECT_EQ(default_lag(1), 1);
    EXPECT_EQ(default_lag(10000), 10);
}

TEST(DefaultTuning, TruncationCap) {
    EigenSystem es;
    es.values = (VectorXd(4) << 1.0, 1e-9, 1e-10, 1e-11).finished();
    es.vectors = MatrixXd::Identity(4, 4);
    es.space = BasisSpace(1);
    es.blocks = 4;
    EXPECT_EQ(default_tuning(256, 1, es).K, 1);
}

TEST(DefaultTuning, ThetaRatioAndTraceFraction) {
    EigenSystem es;
    es.values.resize(40);
    for (int j = 0; j < 40; ++j) es.values(j) = std::pow(0.7, j);
    es.vectors = MatrixXd::Identity(40, 40);
    es.space = BasisSpace(4);
    es.blocks = 10;
    const TuningPlan plan = default_tuning(10000, 4, es);
    EXPECT_EQ(plan.L, 10);
    EXPECT_NEAR(plan.theta / es.values(plan.K - 1), 0.01, 1e-15);
    const double total = es.values.sum();
    EXPECT_GE(es.values.head(plan.K).sum(), 0.95 * total);
    EXPECT_LT(es.values.head(plan.K - 1).sum(), 0.95 * total);
    EXPECT_THROW((void)default_tuning(19, 4, es), InvalidArgument);
    EXPECT_THROW((void)default_tuning(100, 3, es), InvalidArgument);
}
