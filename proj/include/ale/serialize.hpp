#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kelvin.hpp"
#include "metric.hpp"
#include "term.hpp"

namespace ale {

using json = nlohmann::ordered_json;

inline json poly_to_json(const Poly& p) {
    json arr = json::array();
    for (const auto& [e, c] : p.terms()) {
        json t;
        t["exponents"] = e;
        t["coeff"] = c.str();
        arr.push_back(std::move(t));
    }
    return arr;
}

inline Poly poly_from_json(const json& j, int n) {
    if (!j.is_array()) throw std::invalid_argument("poly: expected array");
    Poly p(n);
    for (const auto& t : j) {
        Exponents e = t.at("exponents").get<Exponents>();
        if ((int)e.size() != n) throw std::invalid_argument("poly: exponent arity mismatch");
        p.add_term(e, Rational::parse(t.at("coeff").get<std::string>()));
    }
    return p;
}

inline json expansion_to_json(const Expansion& a) {
    json arr = json::array();
    for (const auto& [k, h] : a.components()) {
        json t;
        t["sigma"] = k.sigma;
        t["logpow"] = k.logpow;
        t["harmonic"] = poly_to_json(h);
        arr.push_back(std::move(t));
    }
    return arr;
}

inline Expansion expansion_from_json(const json& j, int n) {
    if (!j.is_array()) throw std::invalid_argument("expansion: expected array");
    std::vector<Term> raw;
    for (const auto& t : j)
        raw.push_back(Term{t.at("sigma").get<int>(), t.at("logpow").get<int>(),
                           poly_from_json(t.at("harmonic"), n)});
    return canonicalize(raw, n);
}

/// Metric deviation file: upper-triangle entries with 1-based indices.
inline json metric_to_json(const ExpansionMatrix& U) {
    json out;
    out["n"] = U.dim();
    json entries = json::array();
    for (int i = 0; i < U.dim(); ++i)
        for (int j = i; j < U.dim(); ++j) {
            json e;
            e["i"] = i + 1;
            e["j"] = j + 1;
            e["terms"] = expansion_to_json(U.at(i, j));
            entries.push_back(std::move(e));
        }
    out["entries"] = std::move(entries);
    return out;
}

inline ExpansionMatrix metric_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    if (n < 4) throw std::invalid_argument("metric: n must be >= 4");
    ExpansionMatrix U(n);
    for (const auto& e : j.at("entries")) {
        int i = e.at("i").get<int>(), jj = e.at("j").get<int>();
        if (i < 1 || jj < i || jj > n) throw std::invalid_argument("metric: bad entry indices");
        U.at(i - 1, jj - 1) = expansion_from_json(e.at("terms"), n);
    }
    return U;
}

inline json leading_to_json(const std::optional<std::pair<int, int>>& lead) {
    if (!lead) return json("empty");
    json o;
    o["sigma"] = lead->first;
    o["logpow"] = lead->second;
    return o;
}

/// Report file. Wall-clock values are written as zero unless include_timings
/// is set, so identical configurations serialize byte-identically.
inline json report_to_json(const Report& rep, bool include_timings = false) {
    json out;
    out["n"] = rep.n;
    out["Q"] = rep.Q;
    json stages = json::array();
    for (const auto& s : rep.stages) {
        json st;
        st["N"] = s.N;
        st["q_N"] = s.q;
        st["term_count"] = s.term_count;
        st["wall_ms"] = include_timings ? s.wall_ms : 0;
        stages.push_back(std::move(st));
    }
    out["stages"] = std::move(stages);

    json res = json::array();
    int n = rep.n;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            json e;
            e["i"] = i + 1;
            e["j"] = j + 1;
            e["leading"] = leading_to_json(rep.residual_leading[idx++]);
            res.push_back(std::move(e));
        }
    out["residual_leading_order"] = std::move(res);

    json gauge = json::array();
    for (std::size_t k = 0; k < rep.gauge_leading.size(); ++k) {
        json e;
        e["k"] = (int)k + 1;
        e["leading"] = leading_to_json(rep.gauge_leading[k]);
        gauge.push_back(std::move(e));
    }
    out["gauge_leading_order"] = std::move(gauge);

    json logs = json::array();
    for (const auto& [sigma, logpow] : rep.log_inventory) {
        json e;
        e["sigma"] = sigma;
        e["logpow"] = logpow;
        logs.push_back(std::move(e));
    }
    out["log_inventory"] = std::move(logs);
    out["residual_ok"] = rep.residual_ok;
    return out;
}

inline json kelvin_to_json(const ExpansionMatrix& U) {
    const int n = U.dim();
    json out;
    out["n"] = n;
    bool all_poly = true;
    json entries = json::array();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            KelvinCheck chk = kelvin_polynomial_check(kelvin_expansion(U.at(i, j)), n);
            json e;
            e["i"] = i + 1;
            e["j"] = j + 1;
            if (chk.polynomial) {
                e["polynomial"] = poly_to_json(chk.extension);
            } else {
                all_poly = false;
                json off = json::array();
                for (const auto& k : chk.offending) {
                    json o;
                    o["sigma"] = k.sigma;
                    o["logpow"] = k.logpow;
                    o["m"] = k.m;
                    off.push_back(std::move(o));
                }
                e["offending"] = std::move(off);
            }
            entries.push_back(std::move(e));
        }
    out["entries"] = std::move(entries);
    out["all_polynomial"] = all_poly;
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline json load_json_file(const std::string& path) {
    return json::parse(read_text_file(path));
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ale
