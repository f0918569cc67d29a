// Command-line front end: expand | verify | kelvin.
#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "ale/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Order-by-order asymptotic expansion of Ricci-flat ALE metrics "
                 "in harmonic coordinates"};
    app.require_subcommand(1);

    std::string config_path, out_dir, expansion_path;
    int n = 0;
    bool timings = false;

    auto* expand = app.add_subcommand("expand", "Run the bootstrap and write expansion + report");
    expand->add_option("--config", config_path, "Run configuration JSON")->required();
    expand->add_option("--out", out_dir, "Output directory")->required();
    expand->add_flag("--timings", timings,
                     "Embed measured stage timings in the report (breaks byte-for-byte "
                     "reproducibility)");

    auto* verify = app.add_subcommand("verify", "Numerically verify a stored expansion");
    verify->add_option("--config", config_path, "Run configuration JSON")->required();
    verify->add_option("--expansion", expansion_path, "Expansion JSON written by expand")
        ->required();
    verify->add_option("--out", out_dir, "Output directory (default: alongside the expansion)");

    auto* kelvin = app.add_subcommand("kelvin", "Kelvin-transform a stored expansion");
    kelvin->add_option("--expansion", expansion_path, "Expansion JSON written by expand")
        ->required();
    kelvin->add_option("--n", n, "Dimension (must be even, > 4)")->required();
    kelvin->add_option("--out", out_dir, "Output directory (default: alongside the expansion)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (expand->parsed()) {
            ale::ExpandResult res = ale::run_expand(config_path, out_dir, timings);
            for (const auto& s : res.report.stages)
                std::cerr << "stage N=" << s.N << " q_N=" << s.q << " terms=" << s.term_count
                          << " wall_ms=" << s.wall_ms << "\n";
            std::cout << "expansion: " << res.expansion_path << "\n"
                      << "report:    " << res.report_path << "\n"
                      << "residual cancellation: " << (res.report.residual_ok ? "pass" : "FAIL")
                      << "\n";
            if (!res.report.log_inventory.empty()) {
                std::cout << "log terms:";
                for (const auto& [sigma, logpow] : res.report.log_inventory)
                    std::cout << " (sigma=" << sigma << ", logpow=" << logpow << ")";
                std::cout << "\n";
            }
            return res.exit_code;
        }
        if (verify->parsed()) {
            if (out_dir.empty())
                out_dir = std::filesystem::path(expansion_path).parent_path().string();
            if (out_dir.empty()) out_dir = ".";
            ale::VerifyResult res = ale::run_verify(config_path, expansion_path, out_dir);
            std::cout << "samples:   " << res.csv_path << "\n"
                      << "summary:   " << res.summary_path << "\n";
            if (res.below_noise)
                std::cout << "slope:     identically-zero proxy\n";
            else
                std::cout << "slope:     " << res.slope << " (threshold " << res.slope_threshold
                          << ")\n";
            std::cout << "fd check:  worst ratio " << res.fd_worst_ratio << " (must be <= 1)\n";
            if (res.exit_code != 0) std::cout << "worst:     " << res.worst_entry << "\n";
            return res.exit_code;
        }
        if (kelvin->parsed()) {
            if (out_dir.empty())
                out_dir = std::filesystem::path(expansion_path).parent_path().string();
            if (out_dir.empty()) out_dir = ".";
            ale::KelvinResult res = ale::run_kelvin(expansion_path, n, out_dir);
            if (!res.out_path.empty()) std::cout << "kelvin:    " << res.out_path << "\n";
            std::cout << res.message << "\n";
            return res.exit_code;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
