#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hinv/core/error.hpp"
#include "hinv/core/matrix_io.hpp"
#include "hinv/harness/config.hpp"
#include "hinv/harness/monte_carlo.hpp"
#include "hinv/harness/oracle_check.hpp"
#include "test_util.hpp"

using namespace hinv;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = HINV_CONFIG_DIR;

const char* kWhiteNoise = R"(
[model]
kind = "wn"
dim = 3

[model.noise]
seed = 4

[experiment]
Ns = [200]
reps = 1
seed_base = 9
)";

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(ModelConfig, OperatorForms) {
    const ModelSpec m = parse_model_toml(R"(
[model]
kind = "farma"
dim = 2
basis = "indicator-grid"
ar = [ { matrix = [[0.4, 0.1], [0.0, 0.3]] }, { diag = [0.1, 0.05] } ]
ma = [ { scalar = 0.2 } ]

[model.noise]
eig = [1.0, 0.5]
seed = 17
)");
    EXPECT_EQ(m.kind, ModelKind::FARMA);
    EXPECT_EQ(m.space(), BasisSpace(2, BasisKind::IndicatorGrid));
    ASSERT_EQ(m.p(), 2);
    EXPECT_EQ(m.ar[0].mat(), (MatrixXd(2, 2) << 0.4, 0.1, 0.0, 0.3).finished());
    EXPECT_EQ(m.ar[1].mat(), (MatrixXd(2, 2) << 0.1, 0.0, 0.0, 0.05).finished());
    EXPECT_EQ(m.ma[0].mat(), 0.2 * MatrixXd::Identity(2, 2));
    EXPECT_EQ(m.noise.eig, (Eigen::VectorXd(2) << 1.0, 0.5).finished());
    EXPECT_EQ(m.noise.seed, 17u);
}

TEST(ModelConfig, RandomOperatorsAndDefaults) {
    const ModelSpec m = parse_model_toml(R"(
kind = "far"
dim = 4
ar = [ { hs = 0.3, seed = 5 } ]
[noise]
scale = 2.0
)");
    EXPECT_EQ(m.ar[0].mat(), random_hs_operator(BasisSpace(4), 0.3, 5).mat());
    EXPECT_EQ(m.noise.eig, NoiseSpec::inverse_square(BasisSpace(4), 2.0, 0).eig);
}

TEST(ModelConfig, Errors) {
    EXPECT_THROW((void)parse_model_toml("[model]\ndim = 2\n"), InvalidArgument);
    EXPECT_THROW((void)parse_model_toml("[model]\nkind = \"far\"\ndim = 2\nar = [ { matrix = [[1.0]] } ]\n"),
                 InvalidArgument);
    EXPECT_THROW((void)parse_model_toml("[model]\nkind = \"far\"\ndim = 2\n[model.noise]\neig = [1.0]\n"),
                 InvalidArgument);
    EXPECT_THROW((void)parse_model_toml("[model\nkind = 1"), InvalidArgument);
    EXPECT_THROW((void)parse_model_toml("[model]\nkind = \"garch\"\ndim = 1\n"), InvalidArgument);
    EXPECT_THROW((void)parse_model_toml("[model]\nkind = \"far\"\ndim = 1\nar = [ { scalar = 1.5 } ]\n"),
                 NumericalError);
}

TEST(ExperimentConfig, ParsesAllTables) {
    const ExperimentConfig cfg = parse_experiment_toml(R"(
[model]
kind = "fma"
dim = 3
ma = [ { hs = 0.4, seed = 1 } ]

[experiment]
Ns = [100, 200, 400]
reps = 7
seed_base = 42
estimator = "psi"
report_lags = 2
threads = 3

[tuning]
K = 4
theta = 0.01
center = true

[output]
dir = "out"
prefix = "run"
)", "/tmp/base");
    EXPECT_EQ(cfg.Ns, (std::vector<int>{100, 200, 400}));
    EXPECT_EQ(cfg.reps, 7);
    EXPECT_EQ(cfg.seed_base, 42u);
    EXPECT_EQ(cfg.estimator, EstimatorKind::Psi);
    EXPECT_EQ(cfg.report_lags, 2);
    EXPECT_EQ(cfg.threads, 3);
    EXPECT_EQ(cfg.tuning.K, 4);
    EXPECT_DOUBLE_EQ(*cfg.tuning.theta, 0.01);
    EXPECT_FALSE(cfg.tuning.L.has_value());
    EXPECT_TRUE(cfg.tuning.center);
    EXPECT_EQ(cfg.out_dir, fs::path("/tmp/base/out"));
    EXPECT_EQ(cfg.prefix, "run");
}

TEST(ExperimentConfig, Invariants) {
    const std::string model = "[model]\nkind = \"far\"\ndim = 1\nar = [ { scalar = 0.5 } ]\n";
    EXPECT_THROW((void)parse_experiment_toml(model + "[experiment]\nNs = [200, 100]\n"), InvalidArgument);
    EXPECT_THROW((void)parse_experiment_toml(model + "[experiment]\nNs = [100]\nreps = 0\n"), InvalidArgument);
    EXPECT_THROW((void)parse_experiment_toml(model + "[experiment]\nNs = []\n"), InvalidArgument);
    EXPECT_THROW((void)parse_experiment_toml(model), InvalidArgument);
    EXPECT_THROW((void)parse_experiment_toml(model + "[experiment]\nNs = [100]\nestimator = \"fma\"\n"),
                 InvalidArgument);
    EXPECT_NO_THROW((void)parse_experiment_toml(model + "[experiment]\nNs = [100]\n"));
}

TEST(ExperimentConfig, ShippedConfigsLoad) {
    for (const auto& entry : fs::directory_iterator(kConfigDir / "experiments"))
        EXPECT_NO_THROW((void)load_experiment_toml(entry.path())) << entry.path();
    for (const auto& entry : fs::directory_iterator(kConfigDir / "models"))
        EXPECT_NO_THROW((void)load_model_toml(entry.path())) << entry.path();
}

TEST(MonteCarlo, ReplicationSeeds) {
    EXPECT_EQ(replication_seed(1, 100, 0), replication_seed(1, 100, 0));
    EXPECT_NE(replication_seed(1, 100, 0), replication_seed(1, 100, 1));
    EXPECT_NE(replication_seed(1, 100, 0), replication_seed(1, 200, 0));
    EXPECT_NE(replication_seed(1, 100, 0), replication_seed(2, 100, 0));
}

TEST(MonteCarlo, LowerMedianConvention) {
    const MetricSummary s = summarize({4.0, 1.0, 3.0, 2.0});
    EXPECT_EQ(s.count, 4);
    EXPECT_EQ(s.median, 2.0);
    EXPECT_EQ(s.q1, 1.0);
    EXPECT_EQ(s.q3, 3.0);
    EXPECT_EQ(s.iqr(), 2.0);
    EXPECT_EQ(summarize({5.0, 1.0, 3.0}).median, 3.0);
    EXPECT_EQ(summarize({}).count, 0);
}

TEST(RateTable, ExactSlopes) {
    const std::vector<int> Ns{250, 1000, 4000, 16000};
    std::vector<double> half, flat;
    for (int n : Ns) {
        half.push_back(3.7 / std::sqrt(static_cast<double>(n)));
        flat.push_back(0.25);
    }
    EXPECT_NEAR(*log_log_slope(Ns, half), -0.5, 1e-12);
    EXPECT_NEAR(*log_log_slope(Ns, flat), 0.0, 1e-12);
    EXPECT_FALSE(log_log_slope(Ns, {1.0, 0.0, 1.0, 1.0}).has_value());
    EXPECT_THROW((void)log_log_slope({100, 200}, {1.0, 0.5}), InvalidArgument);
}

TEST(MonteCarlo, WhiteNoiseSingleRow) {
    const ExperimentConfig cfg = parse_experiment_toml(kWhiteNoise);
    const MCReport r = run_mc(cfg);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(r.rows[0].ok);
    EXPECT_EQ(r.estimator, "psi");
    EXPECT_EQ(r.metric_names.front(), "psi_1");
    for (double v : r.rows[0].metrics) EXPECT_GE(v, 0.0);
    EXPECT_THROW((void)rate_table(r), InvalidArgument);
    EXPECT_EQ(line_count(report_csv(r)), 2u);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreadCounts) {
    ExperimentConfig cfg = parse_experiment_toml(R"(
[model]
kind = "farma"
dim = 4
ar = [ { hs = 0.5, seed = 1 } ]
ma = [ { hs = 0.3, seed = 2 } ]

[experiment]
Ns = [100, 200, 400]
reps = 4
seed_base = 5
)");
    cfg.threads = 1;
    const MCReport a = run_mc(cfg);
    cfg.threads = 4;
    const MCReport b = run_mc(cfg);
    EXPECT_EQ(report_csv(a), report_csv(b));
    EXPECT_EQ(report_json(a), report_json(b));
    EXPECT_EQ(rate_table(a).size(), a.metric_names.size());
    const auto j = nlohmann::json::parse(report_json(a));
    EXPECT_EQ(j["summary"].size(), 3u);
    EXPECT_TRUE(j.contains("rate_table"));
}

TEST(MonteCarlo, FailedReplicationsAreRecorded) {
    ExperimentConfig cfg = parse_experiment_toml(kWhiteNoise);
    cfg.Ns = {100, 200};
    cfg.reps = 3;
    cfg.tuning.K = 1000;
    const MCReport r = run_mc(cfg);
    ASSERT_EQ(r.rows.size(), 6u);
    for (const auto& row : r.rows) {
        EXPECT_FALSE(row.ok);
        EXPECT_NE(row.status, "ok");
    }
    EXPECT_EQ(r.summary[0].failed, 3);
    const std::string csv = report_csv(r);
    EXPECT_EQ(line_count(csv), 7u);
    std::istringstream lines(csv);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(first.begin(), first.end(), ','));
    EXPECT_TRUE(nlohmann::json::accept(report_json(r)));
}

TEST(MonteCarlo, WritesArtifacts) {
    ExperimentConfig cfg = parse_experiment_toml(kWhiteNoise);
    cfg.out_dir = fs::temp_directory_path() / "hinv_mc_artifacts";
    cfg.prefix = "wn";
    const MCReport r = run_mc(cfg);
    const ReportFiles files = write_report(r, cfg);
    EXPECT_EQ(io::read_text(files.csv), report_csv(r));
    EXPECT_EQ(io::read_text(files.json), report_json(r));
    EXPECT_TRUE(fs::exists(files.timing));
    EXPECT_EQ(report_csv(r).find("seconds"), std::string::npos);
}

TEST(MonteCarlo, FmaPsiConsistency) {
    const ExperimentConfig cfg = load_experiment_toml(kConfigDir / "experiments" / "mc_fma1.toml");
    ASSERT_EQ(cfg.model.space().dim(), 15);
    const MCReport r = run_mc(cfg);
    const auto it = std::find(r.metric_names.begin(), r.metric_names.end(), "psi_1");
    ASSERT_NE(it, r.metric_names.end());
    const auto m = static_cast<std::size_t>(it - r.metric_names.begin());
    for (std::size_t i = 1; i < r.summary.size(); ++i)
        EXPECT_LT(r.summary[i].metrics[m].median, r.summary[i - 1].metrics[m].median);
}

TEST(OracleCheck, ShippedModelsPass) {
    const auto results = run_oracle_checks(kConfigDir / "models");
    ASSERT_FALSE(results.empty());
    for (const auto& c : results) EXPECT_TRUE(c.passed) << c.name << " error " << c.error;
    EXPECT_THROW((void)run_oracle_checks(kConfigDir / "does-not-exist"), InvalidArgument);
}
