#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hinv/core/error.hpp"
#include "hinv/core/matrix_io.hpp"
#include "hinv/cov/covariance.hpp"
#include "hinv/sim/simulate.hpp"
#include "test_util.hpp"

using namespace hinv;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SamplePath scalar_path(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double e : v) x(i++) = e;
    return SamplePath(BasisSpace(1), MatrixXd(x));
}

NoiseSpec unit_noise(std::uint64_t seed) { return NoiseSpec{BasisSpace(1), VectorXd::Ones(1), seed}; }

// Stationary covariance of Z_k = A Z_{k-1} + B e_k by vectorization:
// vec(S) = (I - A (x) A)^{-1} vec(B Ce B^T).
MatrixXd lyapunov_kron(const MatrixXd& A, const MatrixXd& Q) {
    const int n = static_cast<int>(A.rows());
    MatrixXd kron(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = A(i, j) * A;
    const VectorXd q = Eigen::Map<const VectorXd>(Q.data(), n * n);
    const VectorXd s = (MatrixXd::Identity(n * n, n * n) - kron).fullPivLu().solve(q);
    return Eigen::Map<const MatrixXd>(s.data(), n, n);
}

// Lag covariances E[X_h X_0^T] of an fARMA(1,1) through the state (X_k, e_k).
std::vector<MatrixXd> farma11_lag_oracle(const MatrixXd& a, const MatrixXd& b, const MatrixXd& ce,
                                         int max_lag) {
    const int d = static_cast<int>(a.rows());
    MatrixXd A = MatrixXd::Zero(2 * d, 2 * d);
    A.topLeftCorner(d, d) = a;
    A.topRightCorner(d, d) = b;
    MatrixXd B(2 * d, d);
    B << MatrixXd::Identity(d, d), MatrixXd::Identity(d, d);
    const MatrixXd S = lyapunov_kron(A, B * ce * B.transpose());
    std::vector<MatrixXd> out;
    MatrixXd Ah = MatrixXd::Identity(2 * d, 2 * d);
    for (int h = 0; h <= max_lag; ++h) {
        out.push_back((Ah * S).topLeftCorner(d, d));
        Ah = A * Ah;
    }
    return out;
}

}  // namespace

TEST(EmpCovStacked, ConstantPath) {
    const BasisSpace h(2);
    MatrixXd data(5, 2);
    data.rowwise() = Eigen::RowVector2d(1.5, -2.0);
    const BlockOp c = emp_cov_stacked(SamplePath(h, data), 1);
    const Eigen::Vector2d v(1.5, -2.0);
    EXPECT_LT(test::max_abs_diff(c.mat(), v * v.transpose()), 1e-15);
}

TEST(EmpCovStacked, SingleTermWhenLEqualsN) {
    const SamplePath s = scalar_path({1.0, 2.0, 3.0});
    const BlockOp c = emp_cov_stacked(s, 3);
    const Eigen::Vector3d x(3.0, 2.0, 1.0);  // (X_3, X_2, X_1)
    EXPECT_EQ(c.mat(), MatrixXd(x * x.transpose()));
    EXPECT_THROW((void)emp_cov_stacked(s, 4), InvalidArgument);
}

TEST(EmpCovStacked, AlternatingPathByHand) {
    const BlockOp c = emp_cov_stacked(scalar_path({1, -1, 1, -1}), 2);
    EXPECT_LT(test::max_abs_diff(c.mat(), (MatrixXd(2, 2) << 1, -1, -1, 1).finished()), 1e-15);
}

TEST(EmpCrossCov, HandSum) {
    const BlockOp d = emp_crosscov_lag1(scalar_path({1, 2, 3}), 1);
    EXPECT_DOUBLE_EQ(d.mat()(0, 0), 4.0);
    EXPECT_THROW((void)emp_crosscov_lag1(scalar_path({1, 2, 3}), 3), InvalidArgument);
}

TEST(EmpCrossCov, WhiteNoiseNearZero) {
    const SamplePath s = draw_white_noise(unit_noise(31), 100000);
    EXPECT_LE(std::abs(emp_crosscov_lag1(s, 1).mat()(0, 0)), 0.02);
}

TEST(EmpCrossCov, BlockIndexing) {
    // D block j = (N-L)^{-1} sum_{k=L}^{N-1} X_{k-j+1} (x) X_{k+1}, i.e. X_{k+1} X_{k-j+1}^T.
    std::mt19937_64 rng(6);
    const int N = 9, L = 3, d = 2;
    const SamplePath s(BasisSpace(d), test::random_matrix(N, d, rng));
    const BlockOp D = emp_crosscov_lag1(s, L);
    for (int j = 1; j <= L; ++j) {
        MatrixXd expected = MatrixXd::Zero(d, d);
        for (int k = L; k <= N - 1; ++k)
            expected += s.data().row(k).transpose() * s.data().row(k - j);  // rows are 0-based
        expected /= (N - L);
        EXPECT_LT(test::max_abs_diff(D.block(0, j - 1).mat(), expected), 1e-14);
    }
}

TEST(EmpCrossCov, Far1LargeSampleMatchesYuleWalker) {
    const ModelSpec m = ModelSpec::far({test::scalar_op(0.5)}, unit_noise(32));
    const SamplePath s = simulate(m, 200000);
    const double c0 = emp_cov_stacked(s, 1).mat()(0, 0);
    EXPECT_NEAR(emp_crosscov_lag1(s, 1).mat()(0, 0), 0.5 * c0, 0.02);
}

TEST(EmpLagCov, HandSumAndConvention) {
    const SamplePath s = scalar_path({1, 2, 3});
    EXPECT_DOUBLE_EQ(emp_lag_cov(s, 1).mat()(0, 0), 4.0);
    EXPECT_THROW((void)emp_lag_cov(s, 3), InvalidArgument);
    EXPECT_THROW((void)emp_lag_cov(s, -3), InvalidArgument);

    std::mt19937_64 rng(7);
    const SamplePath r(BasisSpace(3), test::random_matrix(40, 3, rng));
    EXPECT_EQ(emp_lag_cov(r, -2).mat(), emp_lag_cov(r, 2).adjoint().mat());
    const MatrixXd c0 = emp_lag_cov(r, 0).mat();
    EXPECT_EQ(c0, c0.transpose());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(c0).eigenvalues().minCoeff(), 0.0);
}

TEST(EmpCovStacked, SymmetricBlocksAndTraceIdentity) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const int N = 30 + trial, L = 1 + trial % 4, d = 3;
        const SamplePath s(BasisSpace(d), test::random_matrix(N, d, rng));
        const BlockOp c = emp_cov_stacked(s, L);
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) EXPECT_EQ(c.block(a, b).mat(), c.block(b, a).adjoint().mat());
        double avg = 0.0;
        for (int k = L - 1; k < N; ++k) avg += s.data().middleRows(k - L + 1, L).squaredNorm();
        avg /= (N - L + 1);
        EXPECT_NEAR(c.mat().trace(), avg, 1e-13 * avg);
    }
}

TEST(EmpCrossCov, NuclearNormBound) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 25 + trial, L = 1 + trial % 5, d = 4;
        const SamplePath s(BasisSpace(d), test::random_matrix(N, d, rng));
        const BlockOp D = emp_crosscov_lag1(s, L);
        double next = 0.0, stacked = 0.0;
        for (int k = L - 1; k < N - 1; ++k) {
            next += s.data().row(k + 1).squaredNorm();
            stacked += s.data().middleRows(k - L + 1, L).squaredNorm();
        }
        next /= (N - L);
        stacked /= (N - L);
        const double moment = std::max(next, stacked / L);
        EXPECT_LE(norms(D).nuclear, std::sqrt(static_cast<double>(L)) * moment * (1 + 1e-12));
    }
}

TEST(Population, Fma1ByHand) {
    const ModelSpec m = ModelSpec::fma({test::scalar_op(0.5)}, unit_noise(1));
    const auto lags = population_lag_covariances(m, 4);
    EXPECT_NEAR(lags[0].mat()(0, 0), 1.25, 1e-15);
    EXPECT_NEAR(lags[1].mat()(0, 0), 0.5, 1e-15);
    for (int h = 2; h <= 4; ++h) EXPECT_EQ(lags[h].mat()(0, 0), 0.0);
}

TEST(Population, Far1StackedByHand) {
    const ModelSpec m = ModelSpec::far({test::scalar_op(0.5)}, unit_noise(1));
    const PopulationOperators pop = population_operators(m, 2);
    const MatrixXd c = (MatrixXd(2, 2) << 4.0 / 3, 2.0 / 3, 2.0 / 3, 4.0 / 3).finished();
    EXPECT_LT(test::max_abs_diff(pop.C_stacked.mat(), c), 1e-13);
    EXPECT_NEAR(pop.D_cross.mat()(0, 0), 2.0 / 3, 1e-13);
    EXPECT_NEAR(pop.D_cross.mat()(0, 1), 1.0 / 3, 1e-13);
}

TEST(Population, WhiteNoiseBlockDiagonal) {
    const NoiseSpec noise = NoiseSpec::inverse_square(BasisSpace(3), 1.0, 0);
    const PopulationOperators pop = population_operators(ModelSpec::causal_lp({}, noise), 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            EXPECT_EQ(pop.C_stacked.block(a, b).mat(),
                      a == b ? noise.covariance().mat() : MatrixXd::Zero(3, 3));
    EXPECT_EQ(pop.D_cross.mat(), MatrixXd::Zero(3, 9));
}

TEST(Population, Far1MatchesKroneckerLyapunov) {
    const BasisSpace h(3);
    const NoiseSpec noise = NoiseSpec::inverse_square(h, 1.0, 0);
    const LinearOp a = random_hs_operator(h, 0.6, 41);
    const auto lags = population_lag_covariances(ModelSpec::far({a}, noise), 5);
    const MatrixXd c0 = lyapunov_kron(a.mat(), noise.covariance().mat());
    MatrixXd ah = MatrixXd::Identity(3, 3);
    for (int lag = 0; lag <= 5; ++lag) {
        EXPECT_LT(test::max_abs_diff(lags[lag].mat(), ah * c0), 1e-13);
        ah = a.mat() * ah;
    }
}

TEST(Population, Farma11MatchesStateSpaceOracle) {
    const BasisSpace h(2);
    const NoiseSpec noise{h, (VectorXd(2) << 1.0, 0.5).finished(), 0};
    const LinearOp a(h, (MatrixXd(2, 2) << 0.4, 0.1, 0.0, 0.3).finished());
    const LinearOp b(h, (MatrixXd(2, 2) << 0.3, 0.1, -0.1, 0.25).finished());
    const auto lags = population_lag_covariances(ModelSpec::farma({a}, {b}, noise), 6);
    const auto oracle = farma11_lag_oracle(a.mat(), b.mat(), noise.covariance().mat(), 6);
    for (int lag = 0; lag <= 6; ++lag) EXPECT_LT(test::max_abs_diff(lags[lag].mat(), oracle[lag]), 1e-12);
}

TEST(Population, StackedLayout) {
    const BasisSpace h(2);
    const NoiseSpec noise = NoiseSpec::inverse_square(h, 1.0, 0);
    const ModelSpec m = ModelSpec::far({random_hs_operator(h, 0.5, 3)}, noise);
    const PopulationOperators pop = population_operators(m, 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const MatrixXd expected = b >= a ? pop.lag_cov[b - a].mat() : pop.lag_cov[a - b].mat().transpose();
            EXPECT_EQ(pop.C_stacked.block(a, b).mat(), expected);
        }
    for (int j = 0; j < 3; ++j) EXPECT_EQ(pop.D_cross.block(0, j).mat(), pop.lag_cov[j + 1].mat());
}

TEST(Population, NonContractiveModelRejected) {
    const ModelSpec m = ModelSpec::far({test::scalar_op(1.0)}, unit_noise(1));
    EXPECT_THROW((void)population_operators(m, 2), NumericalError);
}

TEST(EmpCovStacked, UnbiasedOverReplications) {
    const BasisSpace h(2);
    const NoiseSpec base{h, (VectorXd(2) << 1.0, 0.5).finished(), 0};
    const LinearOp b(h, (MatrixXd(2, 2) << 0.5, 0.2, -0.1, 0.3).finished());
    const int reps = 200, N = 60, L = 2;
    const ModelSpec truth = ModelSpec::fma({b}, base);
    const PopulationOperators pop = population_operators(truth, L);

    MatrixXd sum = MatrixXd::Zero(4, 4), sum_sq = MatrixXd::Zero(4, 4);
    MatrixXd dsum = MatrixXd::Zero(2, 4), dsum_sq = MatrixXd::Zero(2, 4);
    for (int r = 0; r < reps; ++r) {
        ModelSpec m = truth;
        m.noise.seed = 1000 + r;
        const SamplePath s = simulate(m, N);
        const MatrixXd c = emp_cov_stacked(s, L).mat();
        const MatrixXd d = emp_crosscov_lag1(s, L).mat();
        sum += c;
        sum_sq += c.cwiseProduct(c);
        dsum += d;
        dsum_sq += d.cwiseProduct(d);
    }
    auto check = [&](const MatrixXd& s1, const MatrixXd& s2, const MatrixXd& target) {
        const MatrixXd mean = s1 / reps;
        const MatrixXd var = (s2 / reps - mean.cwiseProduct(mean)) * reps / (reps - 1.0);
        for (int i = 0; i < mean.rows(); ++i)
            for (int j = 0; j < mean.cols(); ++j) {
                const double se = std::sqrt(var(i, j) / reps);
                EXPECT_LE(std::abs(mean(i, j) - target(i, j)), 3.0 * se + 1e-12) << i << "," << j;
            }
    };
    check(sum, sum_sq, pop.C_stacked.mat());
    check(dsum, dsum_sq, pop.D_cross.mat());
}

TEST(CovEstimate, CenteringAndSerialization) {
    std::mt19937_64 rng(10);
    MatrixXd data = test::random_matrix(50, 3, rng);
    data.rowwise() += Eigen::RowVector3d(5.0, -1.0, 2.0);
    const SamplePath s(BasisSpace(3), data);
    const CovEstimate raw = estimate_covariance(s, 2, false);
    const CovEstimate cen = estimate_covariance(s, 2, true);
    EXPECT_FALSE(raw.centered);
    EXPECT_TRUE(cen.centered);
    EXPECT_EQ(cen.C_stacked.mat(), emp_cov_stacked(s.centered(), 2).mat());
    EXPECT_EQ(cen.eigen.size(), 6);

    const auto dir = std::filesystem::temp_directory_path() / "hinv_cov_test";
    save_cov_estimate(cen, dir.string());
    EXPECT_EQ(io::read_binary(dir / "C.bin"), cen.C_stacked.mat());
    EXPECT_EQ(io::read_binary(dir / "D.bin"), cen.D_cross.mat());
    const auto meta = nlohmann::json::parse(io::read_text(dir / "cov.json"));
    EXPECT_EQ(meta["L"], 2);
    EXPECT_EQ(meta["N"], 50);
    EXPECT_EQ(meta["centered"], true);
}
