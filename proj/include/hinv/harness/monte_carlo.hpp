#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hinv/harness/config.hpp"

namespace hinv {

/// One replication at one sample size. Metric values are HS errors against the truth.
struct MCRow {
    int N = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string status = "ok";  ///< "ok" or the error message
    bool degenerate = false;
    int L = 0;
    int K = 0;
    double theta = 0.0;
    int M = 0;
    double gamma = 0.0;
    std::vector<double> metrics;  ///< aligned with MCReport::metric_names
    double seconds = 0.0;         ///< wall clock of the fit (not part of the deterministic CSV)
};

struct MetricSummary {
    int count = 0;
    double median = 0.0;  ///< lower median
    double q1 = 0.0;
    double q3 = 0.0;
    [[nodiscard]] double iqr() const { return q3 - q1; }
};

struct SizeSummary {
    int N = 0;
    int ok = 0;
    int failed = 0;
    std::vector<MetricSummary> metrics;  ///< aligned with metric_names
};

struct MCReport {
    std::string model_kind;
    std::string model_hash;
    std::string estimator;
    int dim = 0;
    std::uint64_t seed_base = 0;
    int reps = 0;
    std::vector<int> Ns;
    std::vector<std::string> metric_names;
    std::vector<MCRow> rows;  ///< ordered by (N, rep)
    std::vector<SizeSummary> summary;
};

/// splitmix64-based mix of (seed_base, N, rep).
[[nodiscard]] std::uint64_t replication_seed(std::uint64_t seed_base, int N, int rep);

/// Lower median and lower quartiles: sorted[floor(f (n-1))].
[[nodiscard]] MetricSummary summarize(std::vector<double> values);

/// Runs every (N, rep) replication on a worker pool; failures are recorded per row.
[[nodiscard]] MCReport run_mc(const ExperimentConfig& config);

/// Worker count: explicit value if > 0, else HINV_THREADS, else hardware concurrency.
[[nodiscard]] int worker_count(int requested);

struct RateEntry {
    std::string metric;
    std::optional<double> slope;  ///< empty if a median is not positive
};

/// Least-squares slope of log(median error) against log N per metric. Needs >= 3 sizes.
[[nodiscard]] std::vector<RateEntry> rate_table(const MCReport& report);
/// Same on explicit (N, median) series.
[[nodiscard]] std::optional<double> log_log_slope(const std::vector<int>& Ns,
                                                  const std::vector<double>& medians);

/// Deterministic artifacts.
[[nodiscard]] std::string report_csv(const MCReport& report);
[[nodiscard]] std::string report_json(const MCReport& report);
[[nodiscard]] std::string timing_csv(const MCReport& report);

struct ReportFiles {
    std::string csv;
    std::string json;
    std::string timing;
};
/// Writes <prefix>.csv, <prefix>.json and <prefix>_timing.csv into config.out_dir.
ReportFiles write_report(const MCReport& report, const ExperimentConfig& config);

}  // namespace hinv
