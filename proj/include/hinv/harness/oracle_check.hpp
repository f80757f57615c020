#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hinv/sim/model.hpp"

namespace hinv {

struct CheckResult {
    std::string name;
    bool passed = false;
    double error = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Regularization used when population operators are injected.
inline constexpr double kInjectionRegularization = 1e-12;

/// fAR(p): population C, D with L = p, K = p*dim, theta = 1e-12; max HS error of alpha.
[[nodiscard]] double far_population_recovery_error(const ModelSpec& model);
/// fMA(q) (or causal LP): population C, D with the given L; max HS error of beta.
[[nodiscard]] double fma_population_recovery_error(const ModelSpec& model, int L = 40);
/// fARMA(p,q): population psi, gamma = 1e-12, M = q*dim; max HS error over alpha and beta.
[[nodiscard]] double farma_population_recovery_error(const ModelSpec& model);

/// Population-injection exact recovery for one model.
[[nodiscard]] std::vector<CheckResult> oracle_check_model(const std::string& name,
                                                          const ModelSpec& model);
/// Every *.toml model file in `dir`, in file name order.
[[nodiscard]] std::vector<CheckResult> run_oracle_checks(const std::filesystem::path& dir);

}  // namespace hinv
