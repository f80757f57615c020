#include "hinv/sim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hinv/core/error.hpp"

namespace hinv {

namespace {

// Derives the pre-sample stream so it never coincides with the in-sample one.
std::uint64_t presample_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd gaussian_rows(const Eigen::VectorXd& eig, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXd sd = eig.cwiseSqrt();
    Eigen::MatrixXd out(n, eig.size());
    for (int k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < eig.size(); ++j) out(k, j) = sd[j] * normal(rng);
    return out;
}

}  // namespace

SamplePath::SamplePath(BasisSpace space, Eigen::MatrixXd data, SampleProvenance provenance)
    : space_(space), data_(std::move(data)), provenance_(std::move(provenance)) {
    if (data_.rows() < 1) throw InvalidArgument("SamplePath: N must be >= 1");
    if (data_.cols() != space_.dim()) throw InvalidArgument("SamplePath: column count != dim");
    require_finite(data_, "SamplePath");
}

Curve SamplePath::curve(int k) const {
    if (k < 0 || k >= size()) throw InvalidArgument("SamplePath::curve: index out of range");
    return Curve(space_, data_.row(k).transpose());
}

Eigen::VectorXd SamplePath::mean() const { return data_.colwise().mean().transpose(); }

SamplePath SamplePath::centered() const {
    Eigen::MatrixXd c = data_.rowwise() - data_.colwise().mean();
    return SamplePath(space_, std::move(c), provenance_);
}

SamplePath draw_white_noise(const NoiseSpec& spec, int N) {
    spec.validate();
    if (N < 1) throw InvalidArgument("draw_white_noise: N must be >= 1");
    SampleProvenance prov{"", "white_noise", spec.seed, 0};
    return SamplePath(spec.space, gaussian_rows(spec.eig, N, spec.seed), std::move(prov));
}

int default_burnin(const ModelSpec& model) {
    if (model.ar.empty()) return 0;
    constexpr int kFloor = 500;
    const double s = model.ar_norm_sum();
    if (s <= 0.0) return kFloor;
    // s^{b/p} < 1e-8  <=>  b > p ln(1e-8) / ln(s)
    const double bound = model.p() * std::log(1e-8) / std::log(s);
    const int b = static_cast<int>(std::floor(bound)) + 1;
    return std::max(kFloor, b);
}

SamplePath simulate(const ModelSpec& model, int N, std::optional<int> burnin) {
    model.validate();
    if (N < 1) throw InvalidArgument("simulate: N must be >= 1");
    const int b = burnin.value_or(default_burnin(model));
    if (b < 0) throw InvalidArgument("simulate: burnin must be >= 0");

    const auto& ar = model.ar;
    const auto& ma = model.innovation_ops();
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    const int d = model.space().dim();

    // Innovations for times 1-pre .. N; the recursion starts at time 1-b (AR) or 1 (MA only),
    // with q further innovations before that.
    const int lead = p > 0 ? b : 0;
    const int pre = lead + q;
    const Eigen::MatrixXd in_sample = gaussian_rows(model.noise.eig, N, model.noise.seed);
    const Eigen::MatrixXd before =
        gaussian_rows(model.noise.eig, pre, presample_seed(model.noise.seed));
    Eigen::MatrixXd eps(pre + N, d);
    for (int t = 0; t < pre; ++t) eps.row(pre - 1 - t) = before.row(t);  // before.row(0) is e_0
    eps.bottomRows(N) = in_sample;

    const int start = q;  // row of the first simulated time
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(pre + N, d);
    Eigen::VectorXd xk(d);
    for (int r = start; r < pre + N; ++r) {
        xk = eps.row(r).transpose();
        for (int i = 1; i <= p; ++i)
            if (r - i >= start) xk.noalias() += ar[i - 1].mat() * x.row(r - i).transpose();
        for (int j = 1; j <= q; ++j) xk.noalias() += ma[j - 1].mat() * eps.row(r - j).transpose();
        x.row(r) = xk.transpose();
    }

    SampleProvenance prov{model.hash(), std::string(to_string(model.kind)), model.noise.seed,
                          p > 0 ? b : 0};
    return SamplePath(model.space(), x.bottomRows(N), std::move(prov));
}

}  // namespace hinv
