#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "poly.hpp"

namespace ale {

inline bool is_harmonic(const Poly& p) { return p.laplacian().is_zero(); }

/// One piece of a spherical-harmonic decomposition: p contains the summand
/// |x|^(2*radial_power) * harmonic.
struct HarmonicPiece {
    int radial_power;
    Poly harmonic;
};

/// Decomposes a homogeneous polynomial of degree k as
///     p = sum_a |x|^(2a) h_{k-2a},   h_m harmonic homogeneous of degree m,
/// by back-substitution on iterated Laplacians: since
///     Delta(|x|^(2a) h_m) = 2a (2a + 2m + n - 2) |x|^(2a-2) h_m,
/// applying Delta^j kills every summand with a < j and scales the rest by a
/// known nonzero constant, so the pieces can be solved from a = floor(k/2)
/// downward. Pieces that come out zero are omitted.
inline std::vector<HarmonicPiece> harmonic_decompose(const Poly& p) {
    if (!p.is_homogeneous())
        throw std::invalid_argument("harmonic_decompose: input must be homogeneous");
    std::vector<HarmonicPiece> out;
    if (p.is_zero()) return out;

    const int n = p.nvars();
    const int k = p.degree();
    const int J = k / 2;

    // laplacian_scale(a, j) = product over t in [0, j) of
    //   2(a-t) * (2(a-t) + 2(k-2a) + n - 2)
    auto laplacian_scale = [&](int a, int j) {
        Rational c(1);
        int m = k - 2 * a;
        for (int t = 0; t < j; ++t) {
            long u = 2L * (a - t);
            c *= Rational(u * (u + 2L * m + n - 2));
        }
        return c;
    };

    std::vector<Poly> delta(J + 1, Poly(n));
    delta[0] = p;
    for (int j = 1; j <= J; ++j) delta[j] = delta[j - 1].laplacian();

    const Poly r2 = Poly::radius_sq(n);
    std::vector<Poly> h(J + 1, Poly(n));
    for (int j = J; j >= 0; --j) {
        Poly rhs = delta[j];
        for (int a = j + 1; a <= J; ++a) {
            if (h[a].is_zero()) continue;
            Poly radial = Poly::constant(n, Rational(1));
            for (int t = 0; t < a - j; ++t) radial = radial * r2;
            rhs = rhs - radial * h[a] * laplacian_scale(a, j);
        }
        h[j] = rhs * laplacian_scale(j, j).inverse();
    }

    for (int a = 0; a <= J; ++a)
        if (!h[a].is_zero()) out.push_back({a, h[a]});
    return out;
}

}  // namespace ale
