// hinv: simulate, fit and validate invertible functional linear process models.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "hinv/arma/arma.hpp"
#include "hinv/core/eigen_system.hpp"
#include "hinv/core/error.hpp"
#include "hinv/core/matrix_io.hpp"
#include "hinv/harness/config.hpp"
#include "hinv/harness/monte_carlo.hpp"
#include "hinv/harness/oracle_check.hpp"
#include "hinv/invertible/psi.hpp"
#include "hinv/sim/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

fs::path resolve(const fs::path& workdir, const fs::path& p) {
    return p.is_relative() && !workdir.empty() ? workdir / p : p;
}

ordered_json optional_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

void write_operator(const fs::path& dir, const std::string& name, const Eigen::MatrixXd& m) {
    hinv::io::write_binary(dir / (name + ".bin"), m);
    hinv::io::write_csv(dir / (name + ".csv"), m);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model;
    int N = 0;
    std::optional<long long> seed;
    std::optional<int> burnin;
    std::string out;
    int grid = 0;
};

int run_simulate(const SimulateArgs& a, const fs::path& workdir) {
    hinv::ModelSpec model = hinv::load_model_toml(resolve(workdir, a.model));
    if (a.seed) model.noise.seed = static_cast<std::uint64_t>(*a.seed);
    const hinv::SamplePath s = hinv::simulate(model, a.N, a.burnin);
    const fs::path out = resolve(workdir, a.out);
    hinv::io::write_csv(out, s.data());

    ordered_json meta;
    meta["N"] = s.size();
    meta["dim"] = s.dim();
    meta["basis"] = std::string(hinv::to_string(s.space().kind()));
    meta["model"] = {{"kind", s.provenance().model_kind},
                     {"hash", s.provenance().model_hash},
                     {"p", model.p()},
                     {"q", static_cast<int>(model.innovation_ops().size())}};
    meta["seed"] = s.provenance().seed;
    meta["burnin"] = s.provenance().burnin;
    meta["source"] = a.model;
    fs::path sidecar = out;
    sidecar.replace_extension(".json");
    hinv::io::write_text(sidecar, meta.dump(2) + "\n");

    if (a.grid > 0) {
        const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(a.grid, 0.0, 1.0);
        Eigen::MatrixXd values(s.size(), a.grid);
        for (int k = 0; k < s.size(); ++k)
            values.row(k) = s.space().evaluate(s.data().row(k).transpose(), t).transpose();
        fs::path grid_path = out;
        grid_path.replace_extension(".grid.csv");
        hinv::io::write_csv(grid_path, values);
    }
    std::cout << "wrote " << s.size() << " curves to " << out.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string model = "far";
    int p = 1;
    int q = 1;
    std::optional<int> L;
    std::optional<int> K;
    std::optional<double> theta;
    std::optional<int> M;
    std::optional<double> gamma;
    std::string input;
    std::string out = "fit";
    bool center = true;
    std::string basis = "fourier";
};

int run_fit(const FitArgs& a, const fs::path& workdir) {
    const Eigen::MatrixXd data = hinv::io::read_matrix(resolve(workdir, a.input));
    if (data.rows() < 2 || data.cols() < 1)
        throw hinv::InvalidArgument("fit: input needs at least two rows of coefficients");
    const hinv::BasisSpace space(static_cast<int>(data.cols()), hinv::parse_basis_kind(a.basis));
    const hinv::SamplePath s(space, data);
    const int N = s.size();
    const auto est = hinv::parse_estimator_kind(a.model);

    hinv::TuningOverrides ov;
    ov.L = a.L;
    ov.K = a.K;
    ov.theta = a.theta;
    ov.M = a.M;
    ov.gamma = a.gamma;
    ov.center = a.center;

    int default_L = hinv::default_lag(N);
    if (est == hinv::EstimatorKind::FAR) {
        if (a.L && *a.L != a.p) throw hinv::InvalidArgument("fit: fAR fits use L = p");
        ov.L = a.p;
    }
    if (est == hinv::EstimatorKind::FARMA) default_L = hinv::default_arma_lag(N, a.p, a.q);

    const hinv::ResolvedFirstStage first = hinv::resolve_first_stage(s, ov, default_L);
    const hinv::PsiEstimate psi = hinv::fit_psi(first.cov, first.plan);

    hinv::ArmaFit fit;
    if (est == hinv::EstimatorKind::FAR) {
        fit.alpha = psi.psi;
    } else if (est == hinv::EstimatorKind::FMA) {
        fit = hinv::fit_fma_from_psi(psi, a.q);
    } else if (est == hinv::EstimatorKind::FARMA) {
        fit = hinv::fit_farma_auto(psi, a.p, a.q, a.M, a.gamma);
    } else if (est != hinv::EstimatorKind::Psi) {
        throw hinv::InvalidArgument("fit: --model must be far, fma, farma or psi");
    }

    const fs::path dir = resolve(workdir, a.out);
    fs::create_directories(dir);
    write_operator(dir, "Psi_L", psi.Psi_L.mat());
    for (std::size_t i = 0; i < fit.alpha.size(); ++i)
        write_operator(dir, "alpha_" + std::to_string(i + 1), fit.alpha[i].mat());
    for (std::size_t j = 0; j < fit.beta.size(); ++j)
        write_operator(dir, "beta_" + std::to_string(j + 1), fit.beta[j].mat());

    ordered_json diag;
    diag["estimator"] = std::string(hinv::to_string(est));
    diag["N"] = N;
    diag["dim"] = space.dim();
    diag["centered"] = a.center;
    diag["tuning"] = {{"L", first.plan.L},
                      {"K", first.plan.K},
                      {"theta", first.plan.theta},
                      {"schedule", first.plan.schedule_id}};
    diag["first_stage"] = {{"lambda_K", psi.diagnostics.lambda_K},
                           {"Lambda_K", optional_json(psi.diagnostics.Lambda_K)},
                           {"clamped_mass", psi.diagnostics.clamped_mass},
                           {"degenerate", psi.diagnostics.degenerate}};
    if (est == hinv::EstimatorKind::FARMA) {
        const auto& d = fit.diagnostics;
        diag["second_stage"] = {{"M", d.M},
                                {"gamma", d.gamma},
                                {"leading_value", d.leading_value},
                                {"truncation_value", d.truncation_value},
                                {"condition", std::isfinite(d.condition) ? ordered_json(d.condition)
                                                                         : ordered_json(nullptr)},
                                {"Lambda_M", optional_json(d.Lambda_M)},
                                {"degenerate", d.degenerate},
                                {"identifiability_warning", d.identifiability_warning}};
    }
    ordered_json norms_json = ordered_json::array();
    for (const auto& op : psi.psi) norms_json.push_back(op.hs_norm());
    diag["psi_hs_norms"] = norms_json;
    hinv::io::write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
    std::cout << "fit " << hinv::to_string(est) << " (L=" << first.plan.L << ", K=" << first.plan.K
              << ", theta=" << first.plan.theta << ") written to " << dir.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int run_mc_cmd(const std::string& config, const fs::path& workdir) {
    const hinv::ExperimentConfig cfg = hinv::load_experiment_toml(resolve(workdir, config), workdir);
    const hinv::MCReport report = hinv::run_mc(cfg);
    const hinv::ReportFiles files = hinv::write_report(report, cfg);
    for (const auto& s : report.summary) {
        std::cout << "N=" << s.N << " ok=" << s.ok << " failed=" << s.failed;
        for (std::size_t m = 0; m < report.metric_names.size(); ++m)
            if (s.metrics[m].count > 0)
                std::cout << " " << report.metric_names[m] << "=" << s.metrics[m].median;
        std::cout << "\n";
    }
    if (report.summary.size() >= 3) {
        std::cout << "log-log slopes:";
        for (const auto& r : hinv::rate_table(report))
            std::cout << " " << r.metric << "=" << (r.slope ? std::to_string(*r.slope) : "n/a");
        std::cout << "\n";
    }
    std::cout << "wrote " << files.csv << " and " << files.json << "\n";
    return kExitOk;
}

int run_eigen(const std::string& input, int k, const std::string& out, const fs::path& workdir) {
    const Eigen::MatrixXd a = hinv::io::read_matrix(resolve(workdir, input));
    if (a.rows() != a.cols() || a.rows() == 0)
        throw hinv::InvalidArgument("eigen: input must be a non-empty square matrix");
    const hinv::BasisSpace space(static_cast<int>(a.rows()));
    const hinv::EigenSystem es =
        hinv::sym_eigen(hinv::LinearOp(space, a), k, hinv::EigenOptions{false});
    ordered_json j;
    j["values"] = std::vector<double>(es.values.data(), es.values.data() + es.values.size());
    j["k"] = es.gaps.k;
    j["k_clamped"] = es.k_clamped;
    j["alphas"] = std::vector<double>(es.gaps.alphas.data(),
                                      es.gaps.alphas.data() + es.gaps.alphas.size());
    j["Lambda"] = optional_json(es.gaps.Lambda);
    j["degenerate"] = es.gaps.degenerate;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) {
        hinv::io::write_text(resolve(workdir, out), text);
        fs::path vec = resolve(workdir, out);
        vec.replace_extension(".vectors.csv");
        hinv::io::write_csv(vec, es.vectors);
    }
    return kExitOk;
}

int run_oracle(const std::string& dir, const fs::path& workdir) {
    const auto results = hinv::run_oracle_checks(resolve(workdir, dir));
    bool all = !results.empty();
    for (const auto& r : results) {
        std::printf("[%s] %s  error=%.3e  tol=%.1e%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.error, r.tolerance, r.detail.empty() ? "" : "  ", r.detail.c_str());
        all = all && r.passed;
    }
    std::printf("%zu checks, %s\n", results.size(), all ? "all passed" : "FAILURES");
    return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hinv: Yule-Walker/Tychonoff estimation for functional linear processes"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    std::string workdir;
    app.add_option("--workdir", workdir, "Base directory for relative paths");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a model described in a TOML file");
    sim_cmd->add_option("--model", sim.model, "Model TOML file")->required();
    sim_cmd->add_option("--N", sim.N, "Sample size")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Noise seed (overrides the spec)");
    sim_cmd->add_option("--burnin", sim.burnin, "Burn-in steps (default: model heuristic)");
    sim_cmd->add_option("--out", sim.out, "Output CSV (one row per time index)")->required();
    sim_cmd->add_option("--grid", sim.grid, "Also write curves evaluated on this many points");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit far/fma/farma/psi to a CSV of curves");
    fit_cmd->add_option("--model", fit.model, "far | fma | farma | psi")
        ->check(CLI::IsMember({"far", "fma", "farma", "psi"}));
    fit_cmd->add_option("--p", fit.p, "AR order")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--q", fit.q, "MA order")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--L", fit.L, "Stacking depth");
    fit_cmd->add_option("--K", fit.K, "Spectral truncation");
    fit_cmd->add_option("--theta", fit.theta, "Tychonoff parameter");
    fit_cmd->add_option("--M", fit.M, "Second-stage truncation");
    fit_cmd->add_option("--gamma", fit.gamma, "Second-stage Tychonoff parameter");
    fit_cmd->add_option("--input", fit.input, "Sample CSV or .bin")->required();
    fit_cmd->add_option("--out", fit.out, "Output directory");
    fit_cmd->add_flag("--center,!--no-center", fit.center, "Subtract the sample mean (default on)");
    fit_cmd->add_option("--basis", fit.basis, "fourier | indicator-grid");

    std::string mc_config;
    auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo experiment");
    mc_cmd->add_option("--config", mc_config, "Experiment TOML")->required();

    std::string eig_input, eig_out;
    int eig_k = 1;
    auto* eig_cmd = app.add_subcommand("eigen", "Symmetric eigendecomposition with gap statistics");
    eig_cmd->add_option("--input", eig_input, "Square matrix CSV or .bin")->required();
    eig_cmd->add_option("--k", eig_k, "Number of leading gaps")->check(CLI::PositiveNumber);
    eig_cmd->add_option("--out", eig_out, "Write JSON here (vectors next to it)");

    std::string oracle_dir = std::string(HINV_CONFIG_DIR) + "/models";
    auto* oracle_cmd =
        app.add_subcommand("oracle-check", "Population-injection exact recovery on model configs");
    oracle_cmd->add_option("--config-dir", oracle_dir, "Directory of model TOML files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const fs::path wd(workdir);
    try {
        if (*sim_cmd) return run_simulate(sim, wd);
        if (*fit_cmd) return run_fit(fit, wd);
        if (*mc_cmd) return run_mc_cmd(mc_config, wd);
        if (*eig_cmd) return run_eigen(eig_input, eig_k, eig_out, wd);
        if (*oracle_cmd) return run_oracle(oracle_dir, wd);
    } catch (const hinv::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    std::cerr << app.help();
    return kExitUsage;
}
