#include <charconv>
#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "hinv/core/matrix_io.hpp"
#include "hinv/harness/monte_carlo.hpp"

namespace hinv {

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

std::string report_csv(const MCReport& report) {
    std::string out = "N,rep,seed,status,degenerate,L,K,theta,M,gamma";
    for (const auto& name : report.metric_names) out += "," + name;
    out += '\n';
    for (const auto& row : report.rows) {
        out += std::to_string(row.N) + ',' + std::to_string(row.rep) + ',' + std::to_string(row.seed) +
               ',' + (row.ok ? std::string("ok") : "error: " + csv_field(row.status)) + ',' +
               (row.degenerate ? "1" : "0");
        if (row.ok) {
            out += ',' + std::to_string(row.L) + ',' + std::to_string(row.K) + ',' + num(row.theta) +
                   ',' + std::to_string(row.M) + ',' + num(row.gamma);
            for (double m : row.metrics) out += ',' + num(m);
        } else {
            out += std::string(5 + report.metric_names.size(), ',');
        }
        out += '\n';
    }
    return out;
}

std::string timing_csv(const MCReport& report) {
    std::string out = "N,rep,seconds\n";
    for (const auto& row : report.rows)
        out += std::to_string(row.N) + ',' + std::to_string(row.rep) + ',' + num(row.seconds) + '\n';
    return out;
}

std::string report_json(const MCReport& report) {
    nlohmann::ordered_json j;
    j["model"] = {{"kind", report.model_kind}, {"hash", report.model_hash}, {"dim", report.dim}};
    j["estimator"] = report.estimator;
    j["seed_base"] = report.seed_base;
    j["reps"] = report.reps;
    j["Ns"] = report.Ns;
    j["median_convention"] = "lower";
    auto& sizes = j["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : report.summary) {
        nlohmann::ordered_json entry;
        entry["N"] = s.N;
        entry["ok"] = s.ok;
        entry["failed"] = s.failed;
        auto& metrics = entry["metrics"] = nlohmann::ordered_json::object();
        for (std::size_t m = 0; m < report.metric_names.size(); ++m) {
            const auto& ms = s.metrics[m];
            if (ms.count == 0) {
                metrics[report.metric_names[m]] = nullptr;
                continue;
            }
            metrics[report.metric_names[m]] = {{"median", json_number(ms.median)},
                                               {"q1", json_number(ms.q1)},
                                               {"q3", json_number(ms.q3)},
                                               {"iqr", json_number(ms.iqr())}};
        }
        sizes.push_back(std::move(entry));
    }
    if (report.summary.size() >= 3) {
        auto& rates = j["rate_table"] = nlohmann::ordered_json::object();
        for (const auto& r : rate_table(report))
            rates[r.metric] = r.slope ? json_number(*r.slope) : nlohmann::ordered_json(nullptr);
    }
    return j.dump(2) + "\n";
}

ReportFiles write_report(const MCReport& report, const ExperimentConfig& config) {
    const auto base = config.out_dir / config.prefix;
    ReportFiles files{base.string() + ".csv", base.string() + ".json",
                      base.string() + "_timing.csv"};
    io::write_text(files.csv, report_csv(report));
    io::write_text(files.json, report_json(report));
    io::write_text(files.timing, timing_csv(report));
    return files;
}

}  // namespace hinv
