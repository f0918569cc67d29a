#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "metric.hpp"
#include "numeric.hpp"
#include "serialize.hpp"

namespace ale {

struct RunConfig {
    int n = 0;
    int Q = 0;
    int log_depth_guard = 4;
    SeedData seeds;
    std::optional<SamplePlan> verify;
};

/// Stage count needed to certify order Q, starting from q_1 = n-1.
inline int stages_for(int n, int Q) {
    int per = n - 1;
    return (Q + per - 1) / per;
}

/// Loads and fully validates a run configuration. Seed polynomials must be
/// harmonic and homogeneous of their level's degree; seed indices use i <= j
/// (1-based); for n = 4 the predicted log depth, stages-1, must not exceed
/// the guard.
inline RunConfig parse_config(const std::string& path) {
    json j;
    try {
        j = load_json_file(path);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }

    RunConfig cfg;
    cfg.n = j.at("n").get<int>();
    cfg.Q = j.at("Q").get<int>();
    if (cfg.n < 4) throw std::invalid_argument("config: n must be >= 4");
    if (cfg.Q < cfg.n - 1) throw std::invalid_argument("config: Q must be >= n-1");
    if (j.contains("log_depth_guard")) cfg.log_depth_guard = j.at("log_depth_guard").get<int>();
    if (cfg.log_depth_guard < 0) throw std::invalid_argument("config: negative log depth guard");
    if (cfg.n == 4 && stages_for(cfg.n, cfg.Q) - 1 > cfg.log_depth_guard)
        throw std::invalid_argument(
            "config: n=4 with Q beyond the log-depth guard (predicted depth " +
            std::to_string(stages_for(cfg.n, cfg.Q) - 1) + " > guard " +
            std::to_string(cfg.log_depth_guard) + ")");

    cfg.seeds.n = cfg.n;
    if (j.contains("seeds")) {
        for (const auto& lvl : j.at("seeds")) {
            int k = lvl.at("level").get<int>();
            if (k < 1) throw std::invalid_argument("config: seed level must be >= 1");
            for (const auto& ent : lvl.at("entries")) {
                int i = ent.at("i").get<int>(), jj = ent.at("j").get<int>();
                if (i < 1 || i > jj || jj > cfg.n)
                    throw std::invalid_argument("config: seed indices must satisfy 1 <= i <= j <= n");
                Poly h = poly_from_json(ent.at("harmonic"), cfg.n);
                if (h.is_zero()) continue;
                if (!h.is_homogeneous() || h.degree() != k)
                    throw std::invalid_argument("config: seed at level " + std::to_string(k) +
                                                " is not homogeneous of degree " +
                                                std::to_string(k));
                if (!is_harmonic(h))
                    throw std::invalid_argument("config: seed at level " + std::to_string(k) +
                                                " is not harmonic");
                cfg.seeds.set(k, i - 1, jj - 1, h);
            }
        }
    }
    cfg.seeds.validate();

    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        SamplePlan plan = default_plan(cfg.n);
        if (v.contains("radii")) plan.radii = v.at("radii").get<std::vector<double>>();
        if (v.contains("directions")) {
            plan.directions.clear();
            for (const auto& d : v.at("directions"))
                plan.directions.push_back(d.get<std::vector<double>>());
        }
        if (v.contains("fd_ratio")) plan.fd_ratio = v.at("fd_ratio").get<double>();
        plan.validate(cfg.n);
        cfg.verify = plan;
    }
    return cfg;
}

}  // namespace ale
