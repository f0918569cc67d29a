#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

#include "ale/harmonic.hpp"
#include "ale/metric.hpp"
#include "ale/term.hpp"

namespace gen {

inline std::uint64_t& rng_seed_slot() {
    static std::uint64_t seed = [] {
        if (const char* s = std::getenv("ALE_SEED_RNG")) return std::strtoull(s, nullptr, 10);
        return 0x5eedULL;
    }();
    return seed;
}

inline void set_rng_seed(std::uint64_t s) { rng_seed_slot() = s; }

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    return std::mt19937_64(rng_seed_slot() ^ (salt * 0x9e3779b97f4a7c15ULL));
}

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline ale::Rational rand_rational(std::mt19937_64& rng) {
    int num = 0;
    while (num == 0) num = rand_int(rng, -9, 9);
    return ale::Rational(num, rand_int(rng, 1, 9));
}

/// Random nonzero homogeneous polynomial of degree k in n variables with a
/// handful of monomials.
inline ale::Poly rand_homogeneous(std::mt19937_64& rng, int n, int k) {
    for (;;) {
        ale::Poly p(n);
        int monomials = rand_int(rng, 1, 5);
        for (int t = 0; t < monomials; ++t) {
            ale::Exponents e(n, 0);
            for (int u = 0; u < k; ++u) e[rand_int(rng, 0, n - 1)] += 1;
            p.add_term(e, rand_rational(rng));
        }
        if (!p.is_zero()) return p;
    }
}

/// Random nonzero harmonic homogeneous polynomial: the radial-power-zero
/// piece of a random homogeneous polynomial's decomposition.
inline ale::Poly rand_harmonic(std::mt19937_64& rng, int n, int k) {
    if (k == 0) return ale::Poly::constant(n, rand_rational(rng));
    for (;;) {
        ale::Poly p = rand_homogeneous(rng, n, k);
        for (const auto& piece : ale::harmonic_decompose(p))
            if (piece.radial_power == 0 && !piece.harmonic.is_zero()) return piece.harmonic;
    }
}

/// Random member of the admissible set for n > 4: picks (j, l, k, m)
/// satisfying k >= l >= j+1, k >= m, k == m (mod 2) and builds
/// r^(2j-(n-2)l-k) G_m.
inline ale::Term rand_T_member(std::mt19937_64& rng, int n) {
    int l = rand_int(rng, 1, 3);
    int j = rand_int(rng, 0, l - 1);
    int m = rand_int(rng, 0, 4);
    int k = std::max(l, m);
    if ((k - m) % 2 != 0) ++k;
    k += 2 * rand_int(rng, 0, 2);
    int sigma = 2 * j - (n - 2) * l - k;
    return ale::Term{sigma, 0, rand_harmonic(rng, n, m)};
}

/// Random member of the n = 4 set: (l, k, i) with l >= 1, k >= l+i, k >= m,
/// k == m (mod 2), term r^(-2l-k) (log r)^i G_m.
inline ale::Term rand_Ttilde_member(std::mt19937_64& rng, bool force_exceptional = false) {
    const int n = 4;
    if (force_exceptional) {
        // sigma + n + m = 0 with sigma = -2l - k: take l = 2, k = m >= 2.
        int m = rand_int(rng, 2, 4);
        int i = rand_int(rng, 0, m - 2);
        int sigma = -4 - m;
        return ale::Term{sigma, i, rand_harmonic(rng, n, m)};
    }
    int l = rand_int(rng, 1, 3);
    int i = rand_int(rng, 0, 2);
    int m = rand_int(rng, 0, 3);
    int k = std::max(l + i, m);
    if ((k - m) % 2 != 0) ++k;
    k += 2 * rand_int(rng, 0, 2);
    int sigma = -2 * l - k;
    return ale::Term{sigma, i, rand_harmonic(rng, n, m)};
}

inline ale::Expansion as_expansion(const ale::Term& t, int n) {
    ale::Expansion e(n);
    e.insert(t.sigma, t.logpow, t.harm);
    return e;
}

/// Random symmetric decaying matrix state built from admissible terms.
inline ale::ExpansionMatrix rand_state(std::mt19937_64& rng, int n, int max_terms_per_entry = 2) {
    ale::ExpansionMatrix U(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            int cnt = rand_int(rng, 0, max_terms_per_entry);
            for (int t = 0; t < cnt; ++t) {
                ale::Term tm = n == 4 ? rand_Ttilde_member(rng) : rand_T_member(rng, n);
                U.at(i, j).insert(tm.sigma, tm.logpow, tm.harm);
            }
        }
    return U;
}

/// Random seed data with at least one nonzero entry at every level
/// 1..max_level. A nonnegative max_entries_per_level caps how many matrix
/// entries get a seed at each level (single-core runs at large Q need the
/// cap; the admissibility questions do not depend on seed density).
inline ale::SeedData rand_seeds(std::mt19937_64& rng, int n, int max_level,
                                int max_entries_per_level = -1) {
    ale::SeedData s;
    s.n = n;
    for (int k = 1; k <= max_level; ++k) {
        int used = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                if (max_entries_per_level >= 0 && used >= max_entries_per_level) break;
                if (rand_int(rng, 0, 2) == 0) {
                    s.set(k, i, j, rand_harmonic(rng, n, k));
                    ++used;
                }
            }
        if (used == 0) s.set(k, 0, rand_int(rng, 0, n - 1), rand_harmonic(rng, n, k));
    }
    return s;
}

}  // namespace gen
