#pragma once

#include <stdexcept>
#include <vector>

#include "term.hpp"

namespace ale {

/// A right-hand side r^sigma (log r)^i G_m is exceptional when
/// sigma + n + m = 0: the natural preimage exponent sigma + 2 = 2 - n - m is
/// the decaying harmonic rate, so inversion must raise the log power.
inline bool is_exceptional(const Term& t) {
    return t.sigma + t.harm.nvars() + t.harm.degree() == 0;
}

/// Upper-triangular system matching Lap(r^(sigma+2) sum_j c_j (log r)^j G_m)
/// against b (log r)^i: diagonal lambda_{sigma+2} - lambda_m, first
/// superdiagonal (j+1)(n + 2 sigma + 2), second superdiagonal (j+2)(j+1).
struct TriangularSystem {
    long diag;
    long nstar;

    static TriangularSystem for_rhs(int sigma, int m, int n) {
        return {eigen_lambda(sigma + 2, n) - eigen_lambda(m, n),
                static_cast<long>(n) + 2L * sigma + 2L};
    }
};

/// Exact preimage of a single term under the Laplacian: returns u with
/// exp_laplacian(u) = t. Inputs must decay (sigma <= -2).
///
/// Non-exceptional (nonzero diagonal): u = r^(sigma+2) sum_{p<=i} c_p (log r)^p G_m
/// by back-substitution from p = i downward.
///
/// Zero diagonal (sigma + 2 = 2-n-m, or the bounded mode m = 0, sigma = -2):
/// log powers shift up by one, u = r^(sigma+2) sum_{1<=p<=i+1} c_p (log r)^p G_m,
/// and the free harmonic coefficient c_0 is normalized to zero.
inline Expansion solve_term(const Term& t) {
    const int n = t.harm.nvars();
    if (t.sigma > -2) throw std::invalid_argument("solve_term: requires sigma <= -2");
    if (t.harm.is_zero()) return Expansion(n);
    if (!t.harm.is_homogeneous() || !is_harmonic(t.harm))
        throw std::invalid_argument("solve_term: polynomial part must be harmonic homogeneous");

    const int m = t.harm.degree();
    const int i = t.logpow;
    const auto sys = TriangularSystem::for_rhs(t.sigma, m, n);

    Expansion u(n);
    if (sys.diag != 0) {
        // lam c_p + (p+1) nstar c_{p+1} + (p+2)(p+1) c_{p+2} = [p == i]
        std::vector<Rational> c(i + 1);
        Rational lam(sys.diag);
        for (int p = i; p >= 0; --p) {
            Rational b = p == i ? Rational(1) : Rational(0);
            if (p + 1 <= i) b -= Rational((p + 1L) * sys.nstar) * c[p + 1];
            if (p + 2 <= i) b -= Rational((p + 2L) * (p + 1L)) * c[p + 2];
            c[p] = b / lam;
        }
        for (int p = 0; p <= i; ++p)
            if (!c[p].is_zero()) u.insert(t.sigma + 2, p, t.harm * c[p]);
    } else {
        // (p+1) nstar c_{p+1} + (p+2)(p+1) c_{p+2} = [p == i], c_0 := 0
        if (sys.nstar == 0) throw std::logic_error("solve_term: degenerate system");
        std::vector<Rational> c(i + 2);
        for (int p = i; p >= 0; --p) {
            Rational b = p == i ? Rational(1) : Rational(0);
            if (p + 2 <= i + 1) b -= Rational((p + 2L) * (p + 1L)) * c[p + 2];
            c[p + 1] = b / Rational((p + 1L) * sys.nstar);
        }
        for (int p = 1; p <= i + 1; ++p)
            if (!c[p].is_zero()) u.insert(t.sigma + 2, p, t.harm * c[p]);
    }
    return u;
}

/// Term-wise Laplacian inversion of a whole expansion.
inline Expansion solve_expansion(const Expansion& rhs) {
    Expansion u(rhs.dim());
    for (const auto& [k, h] : rhs.components()) {
        Expansion part = solve_term(Term{k.sigma, k.logpow, h});
        u = exp_add(u, part);
    }
    return u;
}

}  // namespace ale
