#include "hinv/harness/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "hinv/arma/arma.hpp"
#include "hinv/core/error.hpp"
#include "hinv/invertible/psi.hpp"
#include "hinv/sim/simulate.hpp"

namespace hinv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double hs_distance(const LinearOp* estimate, const LinearOp* truth, int dim) {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::MatrixXd& a = estimate ? estimate->mat() : zero;
    const Eigen::MatrixXd& b = truth ? truth->mat() : zero;
    return (a - b).norm();
}

const LinearOp* at_or_null(const std::vector<LinearOp>& ops, int i) {
    return i < static_cast<int>(ops.size()) ? &ops[static_cast<std::size_t>(i)] : nullptr;
}

struct Truth {
    std::vector<LinearOp> psi;  // psi_1..
    std::vector<LinearOp> phi;  // phi_1..
};

Truth model_truth(const ModelSpec& model, int lags) {
    Truth t;
    t.psi = population_psi(model, lags);
    const auto phi = causal_operators(model);
    for (int i = 1; i <= lags; ++i)
        t.phi.push_back(i < static_cast<int>(phi.size()) ? phi[static_cast<std::size_t>(i)]
                                                         : LinearOp::zero(model.space()));
    return t;
}

std::vector<std::string> metric_names(const ExperimentConfig& cfg, EstimatorKind est) {
    std::vector<std::string> names;
    for (int j = 1; j <= cfg.report_lags; ++j) names.push_back("psi_" + std::to_string(j));
    for (int j = 1; j <= cfg.report_lags; ++j) names.push_back("phi_" + std::to_string(j));
    if (est == EstimatorKind::FAR || est == EstimatorKind::FARMA)
        for (int i = 1; i <= cfg.model.p(); ++i) names.push_back("alpha_" + std::to_string(i));
    if (est == EstimatorKind::FMA || est == EstimatorKind::FARMA)
        for (int j = 1; j <= cfg.model.q(); ++j) names.push_back("beta_" + std::to_string(j));
    return names;
}

void run_replication(const ExperimentConfig& cfg, EstimatorKind est, const Truth& truth,
                     MCRow& row) {
    ModelSpec model = cfg.model;
    model.noise.seed = row.seed;
    const SamplePath sample = simulate(model, row.N);
    const int dim = model.space().dim();
    const int p = model.p();
    const int q = model.q();

    const auto start = std::chrono::steady_clock::now();
    int default_L = default_lag(row.N);
    if (est == EstimatorKind::FAR) default_L = p;
    if (est == EstimatorKind::FARMA) default_L = default_arma_lag(row.N, p, q);
    TuningOverrides overrides = cfg.tuning;
    if (est == EstimatorKind::FAR) overrides.L = p;
    ResolvedFirstStage first = resolve_first_stage(sample, overrides, default_L);
    PsiEstimate psi = fit_psi(first.cov, first.plan);

    ArmaFit fit;
    if (est == EstimatorKind::FAR) {
        fit.alpha = psi.psi;
    } else if (est == EstimatorKind::FMA) {
        fit = fit_fma_from_psi(psi, q);
    } else if (est == EstimatorKind::FARMA) {
        if (p == 1 && q == 1) {
            const EigenSystem es = sym_eigen(psi.psi[0] * psi.psi[0].adjoint(), dim);
            const SecondStage def = default_second_stage(es, row.N);
            const int M = cfg.tuning.M.value_or(def.M);
            const double gamma = cfg.tuning.gamma.value_or(def.gamma);
            fit = fit_farma11_from_psi(psi.psi, M, gamma, es);
        } else {
            fit = fit_farma_auto(psi, p, q, cfg.tuning.M, cfg.tuning.gamma);
        }
        row.M = fit.diagnostics.M;
        row.gamma = fit.diagnostics.gamma;
        row.degenerate = row.degenerate || fit.diagnostics.degenerate;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    row.L = first.plan.L;
    row.K = first.plan.K;
    row.theta = first.plan.theta;
    row.degenerate = row.degenerate || psi.diagnostics.degenerate;

    const auto phi_hat = phi_from_psi(psi.psi, cfg.report_lags);
    for (int j = 0; j < cfg.report_lags; ++j)
        row.metrics.push_back(hs_distance(at_or_null(psi.psi, j), at_or_null(truth.psi, j), dim));
    for (int j = 0; j < cfg.report_lags; ++j)
        row.metrics.push_back(hs_distance(&phi_hat[j], &truth.phi[j], dim));
    if (est == EstimatorKind::FAR || est == EstimatorKind::FARMA)
        for (int i = 0; i < p; ++i)
            row.metrics.push_back(hs_distance(at_or_null(fit.alpha, i), &model.ar[i], dim));
    if (est == EstimatorKind::FMA || est == EstimatorKind::FARMA)
        for (int j = 0; j < q; ++j)
            row.metrics.push_back(hs_distance(at_or_null(fit.beta, j), &model.ma[j], dim));
    row.ok = true;
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t seed_base, int N, int rep) {
    std::uint64_t h = splitmix64(seed_base);
    h = splitmix64(h ^ static_cast<std::uint64_t>(N));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(rep) << 32));
    return h;
}

MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto pick = [&](double f) {
        return values[static_cast<std::size_t>(std::floor(f * (values.size() - 1)))];
    };
    s.median = pick(0.5);
    s.q1 = pick(0.25);
    s.q3 = pick(0.75);
    return s;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HINV_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

MCReport run_mc(const ExperimentConfig& cfg) {
    cfg.validate();
    const EstimatorKind est = resolve_estimator(cfg.estimator, cfg.model);

    MCReport report;
    report.model_kind = std::string(to_string(cfg.model.kind));
    report.model_hash = cfg.model.hash();
    report.estimator = std::string(to_string(est));
    report.dim = cfg.model.space().dim();
    report.seed_base = cfg.seed_base;
    report.reps = cfg.reps;
    report.Ns = cfg.Ns;
    report.metric_names = metric_names(cfg, est);

    const Truth truth = model_truth(cfg.model, cfg.report_lags);

    for (int N : cfg.Ns)
        for (int r = 0; r < cfg.reps; ++r) {
            MCRow row;
            row.N = N;
            row.rep = r;
            row.seed = replication_seed(cfg.seed_base, N, r);
            report.rows.push_back(std::move(row));
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < report.rows.size(); i = next++) {
            MCRow& row = report.rows[i];
            try {
                run_replication(cfg, est, truth, row);
            } catch (const std::exception& e) {
                row.ok = false;
                row.status = e.what();
                row.metrics.clear();
            }
        }
    };
    const int n_workers =
        std::min<int>(worker_count(cfg.threads), static_cast<int>(report.rows.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    for (int N : cfg.Ns) {
        SizeSummary size;
        size.N = N;
        std::vector<std::vector<double>> columns(report.metric_names.size());
        for (const auto& row : report.rows) {
            if (row.N != N) continue;
            if (!row.ok) {
                ++size.failed;
                continue;
            }
            ++size.ok;
            for (std::size_t m = 0; m < columns.size(); ++m) columns[m].push_back(row.metrics[m]);
        }
        for (auto& col : columns) size.metrics.push_back(summarize(std::move(col)));
        report.summary.push_back(std::move(size));
    }
    return report;
}

std::optional<double> log_log_slope(const std::vector<int>& Ns, const std::vector<double>& medians) {
    if (Ns.size() < 3 || Ns.size() != medians.size())
        throw InvalidArgument("rate_table: need at least 3 sample sizes");
    const auto n = static_cast<double>(Ns.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (!(medians[i] > 0.0)) return std::nullopt;
        sx += std::log(static_cast<double>(Ns[i]));
        sy += std::log(medians[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const double dx = std::log(static_cast<double>(Ns[i])) - mx;
        sxy += dx * (std::log(medians[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

std::vector<RateEntry> rate_table(const MCReport& report) {
    if (report.summary.size() < 3) throw InvalidArgument("rate_table: need at least 3 sample sizes");
    std::vector<RateEntry> out;
    for (std::size_t m = 0; m < report.metric_names.size(); ++m) {
        std::vector<int> ns;
        std::vector<double> med;
        for (const auto& s : report.summary) {
            ns.push_back(s.N);
            med.push_back(s.metrics[m].count > 0 ? s.metrics[m].median : 0.0);
        }
        out.push_back({report.metric_names[m], log_log_slope(ns, med)});
    }
    return out;
}

}  // namespace hinv
