#pragma once

#include <stdexcept>
#include <vector>

#include "term.hpp"

namespace ale {

/// Kelvin transform K[u](x) = |x|^(2-n) u(x/|x|^2), acting term-wise as
/// r^sigma G_m -> r^(2-n-sigma) G_m. Log-bearing expansions are out of scope.
inline Expansion kelvin_expansion(const Expansion& a) {
    const int n = a.dim();
    Expansion img(n);
    for (const auto& [k, h] : a.components()) {
        if (k.logpow != 0)
            throw std::invalid_argument("kelvin_expansion: log term present");
        img.insert(2 - n - k.sigma, 0, h);
    }
    return img;
}

/// Result of testing a Kelvin image for a polynomial extension across the
/// origin: each image term r^sigma G_m = r^(sigma-m) h_m is polynomial iff
/// sigma - m is even and nonnegative.
struct KelvinCheck {
    bool polynomial = false;
    Poly extension;             // valid when polynomial
    std::vector<TermKey> offending;
};

inline KelvinCheck kelvin_polynomial_check(const Expansion& img, int n) {
    if (n % 2 != 0) throw std::invalid_argument("kelvin_polynomial_check: odd dimension");
    if (n <= 4) throw std::invalid_argument("kelvin_polynomial_check: requires n > 4");
    if (img.dim() != n) throw std::invalid_argument("kelvin_polynomial_check: dimension mismatch");

    KelvinCheck out;
    out.extension = Poly(n);
    const Poly r2 = Poly::radius_sq(n);
    for (const auto& [k, h] : img.components()) {
        int s = k.sigma - k.m;
        if (k.logpow != 0 || s < 0 || s % 2 != 0) {
            out.offending.push_back(k);
            continue;
        }
        Poly radial = Poly::constant(n, Rational(1));
        for (int t = 0; t < s / 2; ++t) radial = radial * r2;
        out.extension = out.extension + radial * h;
    }
    out.polynomial = out.offending.empty();
    if (!out.polynomial) out.extension = Poly(n);
    return out;
}

}  // namespace ale
