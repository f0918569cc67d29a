#pragma once

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "config.hpp"
#include "kelvin.hpp"
#include "metric.hpp"
#include "numeric.hpp"
#include "serialize.hpp"

namespace ale {

/// Slack allowed on measured decay slopes against the certified exponent.
inline constexpr double kSlopeMargin = 0.1;

struct ExpandResult {
    int exit_code = 0;
    Report report;
    std::string expansion_path;
    std::string report_path;
};

/// Full expand pipeline: load config, run the bootstrap, write the expansion
/// and report files. Exit code 0 iff every residual entry cancels.
inline ExpandResult run_expand(const std::string& config_path, const std::string& out_dir,
                               bool include_timings = false) {
    RunConfig cfg = parse_config(config_path);
    auto [U, report] = run_bootstrap(cfg.n, cfg.Q, cfg.seeds, cfg.log_depth_guard);

    std::filesystem::create_directories(out_dir);
    ExpandResult res;
    res.report = report;
    res.expansion_path = (std::filesystem::path(out_dir) / "expansion.json").string();
    res.report_path = (std::filesystem::path(out_dir) / "report.json").string();
    write_json_file(res.expansion_path, metric_to_json(U));
    write_json_file(res.report_path, report_to_json(report, include_timings));
    res.exit_code = report.residual_ok ? 0 : 1;
    return res;
}

struct VerifyResult {
    int exit_code = 0;
    bool below_noise = false;
    double slope = 0.0;
    double slope_threshold = 0.0;
    double fd_worst_ratio = 0.0;  // max over sample points of the FD agreement ratio
    std::string worst_entry;
    std::string csv_path;
    std::string summary_path;
};

/// Numeric verification: sample the Ricci proxy of the stored expansion over
/// the plan, emit the per-entry CSV table and a slope summary. Exit 0 iff
/// the measured slope meets -(Q+2)+margin and finite differences agree with
/// the symbolic derivatives everywhere.
inline VerifyResult run_verify(const std::string& config_path, const std::string& expansion_path,
                               const std::string& out_dir) {
    RunConfig cfg = parse_config(config_path);
    json mj = load_json_file(expansion_path);
    ExpansionMatrix U = metric_from_json(mj);
    if (U.dim() != cfg.n) throw std::invalid_argument("verify: expansion/config dimension mismatch");

    SamplePlan plan = cfg.verify ? *cfg.verify : default_plan(cfg.n);
    plan.validate(cfg.n);
    NumericMetric nm(U);
    const int n = cfg.n;

    std::filesystem::create_directories(out_dir);
    VerifyResult res;
    res.csv_path = (std::filesystem::path(out_dir) / "samples.csv").string();
    res.summary_path = (std::filesystem::path(out_dir) / "verify_summary.json").string();
    res.slope_threshold = -(cfg.Q + 2.0) + kSlopeMargin;

    std::ostringstream csv;
    csv << "r,direction_id,entry_i,entry_j,value\n";
    double worst_abs = -1.0;
    for (std::size_t d = 0; d < plan.directions.size(); ++d) {
        const auto& dir = plan.directions[d];
        double norm = 0;
        for (double v : dir) norm += v * v;
        norm = std::sqrt(norm);
        for (double r : plan.radii) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = r * dir[i] / norm;
            Eigen::MatrixXd pm = nm.proxy_matrix(x);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    csv << format_double(r) << ',' << d << ',' << i + 1 << ',' << j + 1 << ','
                        << format_double(pm(i, j)) << '\n';
                    if (std::fabs(pm(i, j)) > worst_abs) {
                        worst_abs = std::fabs(pm(i, j));
                        std::ostringstream w;
                        w << "entry (" << i + 1 << "," << j + 1 << ") at r=" << r
                          << " direction " << d;
                        res.worst_entry = w.str();
                    }
                }
            double ratio = nm.fd_check_ratio(x, plan.fd_ratio);
            if (ratio > res.fd_worst_ratio) res.fd_worst_ratio = ratio;
        }
    }
    write_text_file(res.csv_path, csv.str());

    SlopeResult sl = decay_slope([&](const std::vector<double>& x) { return nm.ricci_proxy(x); },
                                 plan, n);
    res.below_noise = sl.below_noise;
    res.slope = sl.slope;

    bool slope_ok = sl.below_noise || sl.slope <= res.slope_threshold;
    bool fd_ok = res.fd_worst_ratio <= 1.0;
    res.exit_code = (slope_ok && fd_ok) ? 0 : 1;

    json summary;
    summary["n"] = cfg.n;
    summary["Q"] = cfg.Q;
    summary["slope_threshold"] = res.slope_threshold;
    if (sl.below_noise)
        summary["slope"] = "identically-zero proxy";
    else
        summary["slope"] = sl.slope;
    summary["fd_worst_ratio"] = res.fd_worst_ratio;
    summary["worst_entry"] = res.worst_entry;
    summary["pass"] = res.exit_code == 0;
    write_json_file(res.summary_path, summary);
    return res;
}

struct KelvinResult {
    int exit_code = 0;
    std::string message;
    std::string out_path;
};

/// Kelvin-transforms a stored metric deviation and writes the polynomial
/// extensions (or offending-term lists). Odd dimension and log-bearing
/// inputs are rejected with exit code 2.
inline KelvinResult run_kelvin(const std::string& expansion_path, int n,
                               const std::string& out_dir) {
    KelvinResult res;
    if (n % 2 != 0 || n <= 4) {
        res.exit_code = 2;
        res.message = "odd or unsupported dimension for Kelvin polynomial check";
        return res;
    }
    json mj = load_json_file(expansion_path);
    ExpansionMatrix U = metric_from_json(mj);
    if (U.dim() != n) {
        res.exit_code = 2;
        res.message = "expansion dimension does not match --n";
        return res;
    }
    auto logs = collect_log_inventory(U);
    if (!logs.empty()) {
        std::ostringstream m;
        m << "log terms present:";
        for (const auto& [sigma, logpow] : logs)
            m << " (sigma=" << sigma << ", logpow=" << logpow << ")";
        res.exit_code = 2;
        res.message = m.str();
        return res;
    }

    json out = kelvin_to_json(U);
    std::filesystem::create_directories(out_dir);
    res.out_path = (std::filesystem::path(out_dir) / "kelvin.json").string();
    write_json_file(res.out_path, out);
    res.exit_code = out.at("all_polynomial").get<bool>() ? 0 : 1;
    res.message = res.exit_code == 0 ? "all entries extend to polynomials"
                                     : "non-polynomial entries present";
    return res;
}

}  // namespace ale
