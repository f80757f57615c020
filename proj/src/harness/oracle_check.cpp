#include "hinv/harness/oracle_check.hpp"

#include <algorithm>

#include "hinv/arma/arma.hpp"
#include "hinv/core/error.hpp"
#include "hinv/cov/covariance.hpp"
#include "hinv/harness/config.hpp"
#include "hinv/invertible/psi.hpp"

namespace hinv {

namespace {

double max_hs_error(const std::vector<LinearOp>& est, const std::vector<LinearOp>& truth) {
    if (est.size() != truth.size()) throw InvalidArgument("recovery check: operator count mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i)
        worst = std::max(worst, (est[i].mat() - truth[i].mat()).norm());
    return worst;
}

TuningPlan injection_plan(int L, int dim) {
    return TuningPlan{L, L * dim, kInjectionRegularization, "population-injection"};
}

}  // namespace

double far_population_recovery_error(const ModelSpec& model) {
    const int p = model.p();
    if (p < 1) throw InvalidArgument("far recovery: model has no AR part");
    auto pop = population_operators(model, p);
    const CovEstimate cov = make_cov_estimate(std::move(pop.C_stacked), std::move(pop.D_cross));
    const ArmaFit fit = fit_far(cov, p, injection_plan(p, model.space().dim()));
    return max_hs_error(fit.alpha, model.ar);
}

double fma_population_recovery_error(const ModelSpec& model, int L) {
    const auto& beta = model.innovation_ops();
    if (beta.empty()) throw InvalidArgument("fma recovery: model has no MA part");
    auto pop = population_operators(model, L);
    const CovEstimate cov = make_cov_estimate(std::move(pop.C_stacked), std::move(pop.D_cross));
    const PsiEstimate psi = fit_psi(cov, injection_plan(L, model.space().dim()));
    const ArmaFit fit = fit_fma_from_psi(psi, static_cast<int>(beta.size()));
    return max_hs_error(fit.beta, beta);
}

double farma_population_recovery_error(const ModelSpec& model) {
    const int p = model.p();
    const int q = model.q();
    if (p < 1 || q < 1) throw InvalidArgument("farma recovery: need p, q >= 1");
    const auto psi = population_psi(model, p + 2 * q + 2);
    const ArmaFit fit = fit_farma_pq_from_psi(psi, p, q, q * model.space().dim(),
                                              kInjectionRegularization);
    return std::max(max_hs_error(fit.alpha, model.ar), max_hs_error(fit.beta, model.ma));
}

std::vector<CheckResult> oracle_check_model(const std::string& name, const ModelSpec& model) {
    std::vector<CheckResult> out;
    auto record = [&](const std::string& label, double tol, auto&& compute) {
        CheckResult r;
        r.name = name + ": " + label;
        r.tolerance = tol;
        try {
            r.error = compute();
            r.passed = r.error <= tol;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };
    switch (model.kind) {
        case ModelKind::FAR:
            record("fAR exact recovery", 1e-7, [&] { return far_population_recovery_error(model); });
            break;
        case ModelKind::FMA:
            record("fMA recovery (L=40)", 1e-6, [&] { return fma_population_recovery_error(model); });
            break;
        case ModelKind::FARMA:
            record("fARMA exact recovery", 1e-6,
                   [&] { return farma_population_recovery_error(model); });
            break;
        case ModelKind::CausalLP:
            record("causal LP psi/phi round trip", 1e-10, [&] {
                if (model.lp.empty()) return 0.0;
                const int J = static_cast<int>(model.lp.size());
                const auto phi = phi_from_psi(population_psi(model, 60), J);
                return max_hs_error(phi, model.lp);
            });
            break;
    }
    return out;
}

std::vector<CheckResult> run_oracle_checks(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw InvalidArgument("oracle-check: '" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".toml")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<CheckResult> out;
    for (const auto& f : files) {
        const std::string name = f.stem().string();
        try {
            auto checks = oracle_check_model(name, load_model_toml(f));
            out.insert(out.end(), checks.begin(), checks.end());
        } catch (const std::exception& e) {
            out.push_back({name + ": load", false, 0.0, 0.0, e.what()});
        }
    }
    return out;
}

}  // namespace hinv
