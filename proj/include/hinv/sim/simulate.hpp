#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hinv/core/operators.hpp"
#include "hinv/sim/model.hpp"

namespace hinv {

struct SampleProvenance {
    std::string model_hash;
    std::string model_kind;
    std::uint64_t seed = 0;
    int burnin = 0;
};

/**
 * @brief N curves of one process, row k holding the coefficients of X_{k+1}.
 */
class SamplePath {
public:
    SamplePath(BasisSpace space, Eigen::MatrixXd data, SampleProvenance provenance = {});

    [[nodiscard]] const BasisSpace& space() const noexcept { return space_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(data_.rows()); }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }
    /// Rows are time, columns are basis coefficients.
    [[nodiscard]] const Eigen::MatrixXd& data() const noexcept { return data_; }
    /// 0-based time index.
    [[nodiscard]] Curve curve(int k) const;
    [[nodiscard]] const SampleProvenance& provenance() const noexcept { return provenance_; }

    [[nodiscard]] Eigen::VectorXd mean() const;
    [[nodiscard]] SamplePath centered() const;

private:
    BasisSpace space_;
    Eigen::MatrixXd data_;
    SampleProvenance provenance_;
};

/// i.i.d. N(0, diag(eig)) curves drawn from spec.seed.
[[nodiscard]] SamplePath draw_white_noise(const NoiseSpec& spec, int N);

/// Default burn-in: smallest b with (sum ||alpha_i||_op)^{b/p} < 1e-8, at least 500, for
/// recursively defined models; 0 for models without an AR part.
[[nodiscard]] int default_burnin(const ModelSpec& model);

/**
 * @brief Simulates N curves of the model.
 *
 * The innovations e_1..e_N are exactly the curves draw_white_noise(noise, N)
 * would return. Pre-sample innovations e_0, e_{-1}, ... come from an
 * independent stream, drawn backwards in time, so models that share operators
 * produce bitwise identical paths. AR recursions start from zero state
 * `burnin` steps before time 1.
 */
[[nodiscard]] SamplePath simulate(const ModelSpec& model, int N,
                                  std::optional<int> burnin = std::nullopt);

}  // namespace hinv
