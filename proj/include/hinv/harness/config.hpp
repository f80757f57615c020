#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hinv/invertible/tuning.hpp"
#include "hinv/sim/model.hpp"

namespace hinv {

/// Which estimator a Monte Carlo run applies. Auto picks by model kind.
enum class EstimatorKind { Auto, Psi, FAR, FMA, FARMA };

[[nodiscard]] std::string_view to_string(EstimatorKind kind);
[[nodiscard]] EstimatorKind parse_estimator_kind(std::string_view name);
/// Auto resolved against the model: fAR -> FAR, fMA -> FMA, fARMA -> FARMA, LP -> Psi.
[[nodiscard]] EstimatorKind resolve_estimator(EstimatorKind kind, const ModelSpec& model);

struct ExperimentConfig {
    ModelSpec model;
    EstimatorKind estimator = EstimatorKind::Auto;
    std::vector<int> Ns;
    int reps = 1;
    TuningOverrides tuning;
    std::uint64_t seed_base = 0;
    int report_lags = 3;  ///< psi_j and phi_j errors are reported for j = 1..report_lags
    int threads = 0;      ///< 0: HINV_THREADS or hardware concurrency
    std::filesystem::path out_dir = "mc_out";
    std::string prefix = "mc";

    /// reps >= 1, Ns strictly increasing and > 1, report_lags >= 1, model valid.
    void validate() const;
};

/**
 * Model tables look like
 *
 *   [model]
 *   kind = "farma"            # far | fma | farma | causal_lp | wn
 *   dim = 10
 *   basis = "fourier"
 *   ar = [ { hs = 0.5, seed = 11 } ]
 *   ma = [ { matrix = [[0.3, 0.0], [0.1, 0.2]] } ]
 *   [model.noise]
 *   eig = "inverse_square"    # or an explicit array
 *   seed = 1
 *
 * Operators accept `matrix`, `diag`, `scalar` (multiple of the identity) or
 * `hs` + `seed` (random_hs_operator).
 */
[[nodiscard]] ModelSpec load_model_toml(const std::filesystem::path& path);
[[nodiscard]] ModelSpec parse_model_toml(std::string_view text);

/// Experiment files add [experiment], optional [tuning] and [output] tables.
/// Relative output directories are resolved against `workdir`.
[[nodiscard]] ExperimentConfig load_experiment_toml(const std::filesystem::path& path,
                                                    const std::filesystem::path& workdir = {});
[[nodiscard]] ExperimentConfig parse_experiment_toml(std::string_view text,
                                                     const std::filesystem::path& workdir = {});

}  // namespace hinv
