#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "harmonic.hpp"
#include "poly.hpp"

namespace ale {

/// One summand c * r^sigma (log r)^logpow G_m, where G_m = h/r^m for a
/// harmonic homogeneous polynomial h of degree m. The coefficient c is folded
/// into the polynomial part.
struct Term {
    int sigma = 0;
    int logpow = 0;
    Poly harm;
};

struct TermKey {
    int sigma;
    int logpow;
    int m;

    bool operator==(const TermKey&) const = default;
};

/// Canonical term order: descending sigma, then ascending log power, then
/// ascending harmonic degree.
struct TermKeyLess {
    bool operator()(const TermKey& a, const TermKey& b) const {
        if (a.sigma != b.sigma) return a.sigma > b.sigma;
        if (a.logpow != b.logpow) return a.logpow < b.logpow;
        return a.m < b.m;
    }
};

/// Finite sum of Terms in canonical form: one harmonic polynomial per
/// (sigma, logpow, m), no zero components.
class Expansion {
  public:
    using ComponentMap = std::map<TermKey, Poly, TermKeyLess>;

    explicit Expansion(int dim = 0) : n_(dim) {
        if (dim < 0) throw std::invalid_argument("Expansion: negative dimension");
    }

    /// The multiplicative unit 1 = r^0 G_0.
    static Expansion one(int dim) {
        Expansion e(dim);
        e.insert(0, 0, Poly::constant(dim, Rational(1)));
        return e;
    }

    int dim() const { return n_; }
    bool is_zero() const { return comps_.empty(); }
    std::size_t component_count() const { return comps_.size(); }
    const ComponentMap& components() const { return comps_; }

    /// Merges a harmonic homogeneous polynomial into the component at
    /// (sigma, logpow, deg h). No harmonicity check; callers own that.
    void insert(int sigma, int logpow, const Poly& h) {
        if (h.is_zero()) return;
        if (h.nvars() != n_) throw std::invalid_argument("Expansion: dimension mismatch");
        if (logpow < 0) throw std::invalid_argument("Expansion: negative log power");
        if (!h.is_homogeneous())
            throw std::invalid_argument("Expansion: non-homogeneous component");
        TermKey key{sigma, logpow, h.degree()};
        auto it = comps_.find(key);
        if (it == comps_.end()) {
            comps_.emplace(key, h);
        } else {
            Poly sum = it->second + h;
            if (sum.is_zero())
                comps_.erase(it);
            else
                it->second = std::move(sum);
        }
    }

    /// Splits a not-necessarily-harmonic homogeneous polynomial p of degree d
    /// into harmonic pieces and merges each one. The monomial
    /// r^base_sigma (log r)^logpow p/r^d contributes components whose sigma
    /// all equal base_sigma.
    void insert_decomposed(int base_sigma, int logpow, const Poly& p) {
        for (const auto& piece : harmonic_decompose(p))
            insert(base_sigma, logpow, piece.harmonic);
    }

    bool operator==(const Expansion& o) const { return n_ == o.n_ && comps_ == o.comps_; }
    bool operator!=(const Expansion& o) const { return !(*this == o); }

    int max_logpow() const {
        int mx = 0;
        for (const auto& [k, h] : comps_)
            if (k.logpow > mx) mx = k.logpow;
        return mx;
    }

  private:
    int n_;
    ComponentMap comps_;
};

/// Validates raw terms (shared dimension, homogeneous harmonic polynomial
/// parts) and merges them into canonical form.
inline Expansion canonicalize(const std::vector<Term>& raw, int dim) {
    Expansion e(dim);
    for (const Term& t : raw) {
        if (t.harm.nvars() != dim) throw std::invalid_argument("canonicalize: dimension mismatch");
        if (t.harm.is_zero()) continue;
        if (!t.harm.is_homogeneous())
            throw std::invalid_argument("canonicalize: polynomial part not homogeneous");
        if (!is_harmonic(t.harm))
            throw std::invalid_argument("canonicalize: polynomial part not harmonic");
        e.insert(t.sigma, t.logpow, t.harm);
    }
    return e;
}

inline Expansion exp_add(const Expansion& a, const Expansion& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("exp_add: dimension mismatch");
    Expansion r = a;
    for (const auto& [k, h] : b.components()) r.insert(k.sigma, k.logpow, h);
    return r;
}

inline Expansion exp_scale(const Expansion& a, const Rational& s) {
    Expansion r(a.dim());
    if (s.is_zero()) return r;
    for (const auto& [k, h] : a.components()) r.insert(k.sigma, k.logpow, h * s);
    return r;
}

inline Expansion exp_neg(const Expansion& a) { return exp_scale(a, Rational(-1)); }

inline Expansion exp_sub(const Expansion& a, const Expansion& b) {
    return exp_add(a, exp_neg(b));
}

/// Product of expansions, dropping every result term with sigma < -Q before
/// any polynomial work happens. Product polynomials are re-decomposed into
/// harmonic pieces, all of which share sigma = sigma1 + sigma2.
inline Expansion exp_mul(const Expansion& a, const Expansion& b, int Q) {
    if (a.dim() != b.dim()) throw std::invalid_argument("exp_mul: dimension mismatch");
    const int n = a.dim();
    Expansion r(n);

    // Pairs sharing (sigma, logpow, degree parity) are summed at a common
    // homogeneity degree before decomposing: r^(sigma-d1)p1 + r^(sigma-d2)p2
    // equals r^(sigma-d2)(|x|^(d2-d1)p1 + p2) when d2-d1 is even, so one
    // decomposition per bucket replaces one per component pair.
    std::map<std::tuple<int, int, int>, std::pair<int, Poly>> buckets;
    const Poly r2 = Poly::radius_sq(n);
    for (const auto& [ka, ha] : a.components()) {
        for (const auto& [kb, hb] : b.components()) {
            int sigma = ka.sigma + kb.sigma;
            if (sigma < -Q) continue;
            Poly p = ha * hb;
            int d = ka.m + kb.m;
            auto key = std::make_tuple(sigma, ka.logpow + kb.logpow, d & 1);
            auto it = buckets.find(key);
            if (it == buckets.end()) {
                buckets.emplace(key, std::make_pair(d, std::move(p)));
                continue;
            }
            auto& [bd, bp] = it->second;
            while (bd < d) {
                bp = bp * r2;
                bd += 2;
            }
            while (d < bd) {
                p = p * r2;
                d += 2;
            }
            bp = bp + p;
        }
    }
    for (auto& [key, bucket] : buckets)
        if (!bucket.second.is_zero())
            r.insert_decomposed(std::get<0>(key), std::get<1>(key), bucket.second);
    return r;
}

/// Partial derivative along axis (1-based). For each component
/// r^(sigma-m)(log r)^i h: the radial factor contributes
/// (sigma-m) r^(sigma-m-2) x_axis (log r)^i h + i r^(sigma-m-2) x_axis (log r)^(i-1) h,
/// the polynomial factor contributes r^(sigma-m)(log r)^i dh/dx_axis.
/// Every output component has sigma decreased by exactly 1.
inline Expansion exp_diff(const Expansion& a, int axis) {
    if (axis < 1 || axis > a.dim()) throw std::invalid_argument("exp_diff: axis out of range");
    const int ax = axis - 1;
    Expansion r(a.dim());
    for (const auto& [k, h] : a.components()) {
        Poly xh = Poly::variable(a.dim(), ax) * h;
        auto pieces = harmonic_decompose(xh);
        int radial = k.sigma - k.m;
        if (radial != 0)
            for (const auto& piece : pieces)
                r.insert(k.sigma - 1, k.logpow, piece.harmonic * Rational(radial));
        if (k.logpow > 0)
            for (const auto& piece : pieces)
                r.insert(k.sigma - 1, k.logpow - 1, piece.harmonic * Rational(k.logpow));
        Poly dh = h.partial(ax);
        if (!dh.is_zero()) r.insert(k.sigma - 1, k.logpow, dh);
    }
    return r;
}

inline long eigen_lambda(long k, int n) { return k * (k + n - 2); }

/// Laplacian, computed per component from the closed form
///   Lap(r^rho (log r)^j G_m) = (lambda_rho - lambda_m) r^(rho-2)(log r)^j G_m
///     + j (2 rho + n - 2) r^(rho-2)(log r)^(j-1) G_m
///     + j (j-1) r^(rho-2)(log r)^(j-2) G_m,
/// lambda_k = k(k+n-2).
inline Expansion exp_laplacian(const Expansion& a) {
    const int n = a.dim();
    Expansion r(n);
    for (const auto& [k, h] : a.components()) {
        long rho = k.sigma;
        long lam = eigen_lambda(rho, n) - eigen_lambda(k.m, n);
        int j = k.logpow;
        if (lam != 0) r.insert(k.sigma - 2, j, h * Rational(lam));
        if (j >= 1) {
            long c1 = j * (2 * rho + n - 2);
            if (c1 != 0) r.insert(k.sigma - 2, j - 1, h * Rational(c1));
        }
        if (j >= 2) r.insert(k.sigma - 2, j - 2, h * Rational(long(j) * (j - 1)));
    }
    return r;
}

/// Keeps exactly the components with sigma >= -Q; log powers are ignored by
/// the grading.
inline Expansion truncate(const Expansion& a, int Q) {
    Expansion r(a.dim());
    for (const auto& [k, h] : a.components()) {
        if (k.sigma < -Q) continue;
        r.insert(k.sigma, k.logpow, h);
    }
    return r;
}

/// The largest sigma present together with the largest log power at that
/// sigma; empty for the zero expansion.
inline std::optional<std::pair<int, int>> leading_order(const Expansion& a) {
    if (a.is_zero()) return std::nullopt;
    int sigma = a.components().begin()->first.sigma;
    int logpow = 0;
    for (const auto& [k, h] : a.components()) {
        if (k.sigma != sigma) break;
        if (k.logpow > logpow) logpow = k.logpow;
    }
    return std::make_pair(sigma, logpow);
}

/// Membership in the set of admissible terms for n > 4: a log-free term
/// r^sigma G_m belongs iff integers (j, l, k) exist with
///   sigma = 2j - (n-2)l - k,  k >= l >= j+1,  k >= m,  k == m (mod 2).
/// Returns the witness with lexicographically smallest (l, j, k).
inline std::optional<std::tuple<int, int, int>> membership_T(const Term& t, int n) {
    if (n <= 4) throw std::invalid_argument("membership_T: requires n > 4");
    if (t.logpow != 0) return std::nullopt;
    const int m = t.harm.degree();
    const long neg = -static_cast<long>(t.sigma);
    if (neg < 2) return std::nullopt;
    const long lmax = (neg - 2) / (n - 4);
    for (long l = 1; l <= lmax; ++l) {
        for (long j = 0; j <= l - 1; ++j) {
            long k = 2 * j + neg - static_cast<long>(n - 2) * l;
            if (k < l || k < m) continue;
            if ((k - m) % 2 != 0) continue;
            return std::make_tuple(int(j), int(l), int(k));
        }
    }
    return std::nullopt;
}

/// Membership for n = 4: r^sigma (log r)^i G_m belongs iff integers (l, k)
/// exist with sigma = -2l - k, l >= 1, k >= l + i, k >= m, k == m (mod 2).
/// Returns (l, k, i) with smallest l.
inline std::optional<std::tuple<int, int, int>> membership_Ttilde(const Term& t) {
    const int m = t.harm.degree();
    const int i = t.logpow;
    const long neg = -static_cast<long>(t.sigma);
    for (long l = 1;; ++l) {
        long k = neg - 2 * l;
        if (k < l + i || k < m) break;
        if ((k - m) % 2 == 0) return std::make_tuple(int(l), int(k), i);
    }
    return std::nullopt;
}

}  // namespace ale
