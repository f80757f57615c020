#include "hinv/cov/covariance.hpp"

#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "hinv/core/error.hpp"
#include "hinv/core/matrix_io.hpp"

namespace hinv {

namespace {

// Columns are X_k^[L] for k = L..last (1-based times).
Eigen::MatrixXd stacked_columns(const Eigen::MatrixXd& data, int L, int last) {
    const auto d = data.cols();
    const int count = last - L + 1;
    Eigen::MatrixXd z(L * d, count);
    for (int c = 0; c < count; ++c) {
        const int k = L + c;  // 1-based
        for (int a = 0; a < L; ++a) z.block(a * d, c, d, 1) = data.row(k - 1 - a).transpose();
    }
    return z;
}

}  // namespace

BlockOp emp_cov_stacked(const SamplePath& s, int L) {
    const int N = s.size();
    if (L < 1 || L > N) throw InvalidArgument("emp_cov_stacked: need 1 <= L <= N");
    const Eigen::MatrixXd z = stacked_columns(s.data(), L, N);
    const auto n = z.rows();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    c.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / (N - L + 1));
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
    return BlockOp(s.space(), L, L, std::move(c));
}

BlockOp emp_crosscov_lag1(const SamplePath& s, int L) {
    const int N = s.size();
    if (L < 1 || L >= N) throw InvalidArgument("emp_crosscov_lag1: need 1 <= L < N");
    const Eigen::MatrixXd z = stacked_columns(s.data(), L, N - 1);
    // Y columns are X_{k+1}, k = L..N-1.
    const Eigen::MatrixXd y = s.data().middleRows(L, N - L).transpose();
    Eigen::MatrixXd dmat = (y * z.transpose()) / static_cast<double>(N - L);
    return BlockOp(s.space(), 1, L, std::move(dmat));
}

LinearOp emp_lag_cov(const SamplePath& s, int h) {
    const int N = s.size();
    if (std::abs(h) >= N) throw InvalidArgument("emp_lag_cov: need |h| < N");
    if (h < 0) return emp_lag_cov(s, -h).adjoint();
    const int n = N - h;
    const auto& x = s.data();
    // sum_k X_{k+h} X_k^T over k = 1..N-h
    Eigen::MatrixXd m = x.middleRows(h, n).transpose() * x.topRows(n);
    m /= static_cast<double>(n);
    if (h == 0) m = 0.5 * (m + m.transpose()).eval();
    return LinearOp(s.space(), std::move(m));
}

std::vector<LinearOp> population_lag_covariances(const ModelSpec& model, int max_lag) {
    model.validate();
    if (max_lag < 0) throw InvalidArgument("population_lag_covariances: max_lag < 0");
    const BasisSpace space = model.space();
    const Eigen::MatrixXd ce = model.noise.covariance().mat();
    std::vector<LinearOp> out;
    out.reserve(max_lag + 1);

    if (model.kind == ModelKind::FAR && model.p() == 1) {
        const Eigen::MatrixXd& a = model.ar[0].mat();
        Eigen::MatrixXd c = ce;
        constexpr int kMaxIter = 1'000'000;
        int it = 0;
        for (; it < kMaxIter; ++it) {
            Eigen::MatrixXd next = a * c * a.transpose() + ce;
            const double delta = (next - c).norm();
            c = std::move(next);
            if (delta <= 1e-14 * c.norm()) break;
        }
        if (it == kMaxIter) throw NumericalError("population_operators: fixed point did not converge");
        c = 0.5 * (c + c.transpose()).eval();
        Eigen::MatrixXd ch = c;
        for (int h = 0; h <= max_lag; ++h) {
            out.emplace_back(space, ch);
            ch = a * ch;
        }
        return out;
    }

    // C^h = E[X_h X_0^T] = sum_i phi_{i+h} C_e phi_i^T
    const auto phi = causal_operators(model);
    const auto n = static_cast<int>(phi.size());
    for (int h = 0; h <= max_lag; ++h) {
        Eigen::MatrixXd ch = Eigen::MatrixXd::Zero(space.dim(), space.dim());
        for (int i = 0; i + h < n; ++i) ch += phi[i + h].mat() * ce * phi[i].mat().transpose();
        if (h == 0) ch = 0.5 * (ch + ch.transpose()).eval();
        out.emplace_back(space, std::move(ch));
    }
    return out;
}

BlockOp stack_lag_covariances(const std::vector<LinearOp>& lag_cov, int L) {
    if (L < 1 || static_cast<int>(lag_cov.size()) < L)
        throw InvalidArgument("stack_lag_covariances: need lags 0..L-1");
    BlockGrid grid(L);
    for (int a = 0; a < L; ++a) {
        grid[a].reserve(L);
        for (int b = 0; b < L; ++b)
            grid[a].push_back(b >= a ? lag_cov[b - a] : lag_cov[a - b].adjoint());
    }
    return block_assemble(grid);
}

PopulationOperators population_operators(const ModelSpec& model, int L) {
    if (L < 1) throw InvalidArgument("population_operators: L must be >= 1");
    auto lags = population_lag_covariances(model, L);
    BlockOp c = stack_lag_covariances(lags, L);
    std::vector<LinearOp> d_blocks(lags.begin() + 1, lags.begin() + 1 + L);
    BlockOp d = block_row(d_blocks);
    return {std::move(c), std::move(d), std::move(lags)};
}

CovEstimate make_cov_estimate(BlockOp C, BlockOp D, int N) {
    if (C.rows() != C.cols() || D.rows() != 1 || D.cols() != C.rows())
        throw InvalidArgument("make_cov_estimate: C must be L x L and D 1 x L");
    const int L = C.rows();
    EigenSystem es = sym_eigen(C, L * C.dim());
    return CovEstimate{std::move(C), std::move(D), L, N, false, std::move(es)};
}

CovEstimate estimate_covariance(const SamplePath& s, int L, bool center) {
    const SamplePath& src = s;
    const SamplePath work = center ? src.centered() : src;
    CovEstimate cov = make_cov_estimate(emp_cov_stacked(work, L), emp_crosscov_lag1(work, L),
                                        s.size());
    cov.centered = center;
    return cov;
}

void save_cov_estimate(const CovEstimate& cov, const std::string& dir) {
    const std::filesystem::path root(dir);
    io::write_binary(root / "C.bin", cov.C_stacked.mat());
    io::write_binary(root / "D.bin", cov.D_cross.mat());
    nlohmann::ordered_json meta;
    meta["L"] = cov.L;
    meta["N"] = cov.N;
    meta["dim"] = cov.C_stacked.dim();
    meta["centered"] = cov.centered;
    meta["clamped_mass"] = cov.eigen.clamped_mass;
    io::write_text(root / "cov.json", meta.dump(2) + "\n");
}

}  // namespace hinv
