#include <catch2/catch_amalgamated.hpp>

#include "ale/poisson.hpp"
#include "support/generators.hpp"

using ale::Expansion;
using ale::Poly;
using ale::Rational;
using ale::Term;

namespace {

Expansion single(int n, int sigma, int logpow, const Poly& h) {
    Expansion e(n);
    e.insert(sigma, logpow, h);
    return e;
}

}  // namespace

TEST_CASE("exceptional exponents satisfy sigma + n + m = 0") {
    REQUIRE(ale::is_exceptional(Term{-5, 0, Poly::variable(4, 0)}));       // n=4, m=1
    REQUIRE(ale::is_exceptional(Term{-6, 2, Poly::variable(5, 0)}));       // n=5, m=1
    REQUIRE_FALSE(ale::is_exceptional(Term{-6, 0, Poly::constant(4, Rational(1))}));
    REQUIRE_FALSE(ale::is_exceptional(Term{-8, 0, Poly::variable(5, 0)}));
}

TEST_CASE("inverting a plain power divides by the eigenvalue gap") {
    // Lap(c r^-6 G_1) = r^-8 G_1 in n = 5: c = 1/14.
    const int n = 5;
    Poly x1 = Poly::variable(n, 0);
    Expansion u = ale::solve_term(Term{-8, 0, x1});
    REQUIRE(u == single(n, -6, 0, x1 * Rational(1, 14)));
}

TEST_CASE("exceptional inversion raises the log power") {
    // Lap(c r^-3 log r G_1) = r^-5 G_1 in n = 4: c = -1/4.
    const int n = 4;
    Poly x1 = Poly::variable(n, 0);
    Expansion u = ale::solve_term(Term{-5, 0, x1});
    REQUIRE(u == single(n, -3, 1, x1 * Rational(-1, 4)));
}

TEST_CASE("back-substitution through an existing log power") {
    // Lap(r^-4 (a1 log r + a0) G_0) = r^-6 log r G_0 in n = 4:
    // a1 = 1/8, a0 = 3/32.
    const int n = 4;
    Poly c1 = Poly::constant(n, Rational(1));
    Expansion u = ale::solve_term(Term{-6, 1, c1});

    Expansion expected(n);
    expected.insert(-4, 1, c1 * Rational(1, 8));
    expected.insert(-4, 0, c1 * Rational(3, 32));
    REQUIRE(u == expected);
}

TEST_CASE("the bounded mode at sigma = -2 also shifts the log power") {
    // lambda vanishes for m = 0, sigma + 2 = 0 even though the exponent is
    // not the decaying harmonic rate.
    const int n = 5;
    Poly c1 = Poly::constant(n, Rational(1));
    Expansion u = ale::solve_term(Term{-2, 0, c1});
    REQUIRE(u.component_count() == 1);
    auto key = u.components().begin()->first;
    REQUIRE(key.sigma == 0);
    REQUIRE(key.logpow == 1);
    REQUIRE(ale::exp_laplacian(u) == single(n, -2, 0, c1));
}

TEST_CASE("growing right-hand sides are rejected") {
    REQUIRE_THROWS_AS(ale::solve_term(Term{-1, 0, Poly::constant(5, Rational(1))}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(ale::solve_term(Term{0, 0, Poly::constant(5, Rational(1))}),
                      std::invalid_argument);
}

TEST_CASE("non-harmonic polynomial parts are rejected") {
    const int n = 4;
    Poly bad = Poly::monomial(n, {2, 0, 0, 0}, Rational(1));
    REQUIRE_THROWS_AS(ale::solve_term(Term{-6, 0, bad}), std::invalid_argument);
}

TEST_CASE("exceptional solutions have no free harmonic part") {
    auto rng = gen::make_rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Term t = gen::rand_Ttilde_member(rng, true);
        REQUIRE(ale::is_exceptional(t));
        Expansion u = ale::solve_term(t);
        for (const auto& [k, h] : u.components()) REQUIRE(k.logpow >= 1);
        REQUIRE(u.max_logpow() == t.logpow + 1);
    }
}

TEST_CASE("non-exceptional solutions preserve the log depth") {
    auto rng = gen::make_rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        Term t = gen::rand_Ttilde_member(rng);
        if (ale::is_exceptional(t)) continue;
        Expansion u = ale::solve_term(t);
        REQUIRE(u.max_logpow() == t.logpow);
    }
}

TEST_CASE("laplacian of the solution reproduces the right-hand side exactly") {
    auto rng = gen::make_rng(33);
    int tested = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int pick = trial % 4;
        int n;
        Term t;
        if (pick == 0) {
            n = 4;
            t = gen::rand_Ttilde_member(rng);
        } else if (pick == 1) {
            n = 4;
            t = gen::rand_Ttilde_member(rng, true);
        } else {
            n = pick == 2 ? 5 : 6;
            t = gen::rand_T_member(rng, n);
        }
        if (t.sigma > -2) continue;
        Expansion u = ale::solve_term(t);
        REQUIRE(ale::exp_laplacian(u) == gen::as_expansion(t, n));
        ++tested;
    }
    REQUIRE(tested >= 150);
}

TEST_CASE("whole expansions invert termwise") {
    const int n = 5;
    Expansion rhs(n);
    rhs.insert(-8, 0, Poly::variable(n, 0));
    rhs.insert(-10, 0, Poly::constant(n, Rational(3)));
    Expansion u = ale::solve_expansion(rhs);
    REQUIRE(ale::exp_laplacian(u) == rhs);
}

TEST_CASE("products of admissible terms in five or more dimensions are never exceptional") {
    auto rng = gen::make_rng(34);
    for (int trial = 0; trial < 40; ++trial) {
        int n = gen::rand_int(rng, 5, 6);
        Expansion prod = ale::exp_mul(gen::as_expansion(gen::rand_T_member(rng, n), n),
                                      gen::as_expansion(gen::rand_T_member(rng, n), n), 1000);
        for (const auto& [k, h] : prod.components())
            REQUIRE_FALSE(ale::is_exceptional(Term{k.sigma, k.logpow, h}));
    }
}

TEST_CASE("four-dimensional solutions re-enter the admissible set") {
    auto rng = gen::make_rng(35);
    for (int trial = 0; trial < 40; ++trial) {
        Term t = gen::rand_Ttilde_member(rng);
        auto w = ale::membership_Ttilde(t);
        REQUIRE(w.has_value());
        if (std::get<0>(*w) < 2) continue;  // solution would decay too slowly to re-enter
        Expansion u = ale::solve_term(t);
        for (const auto& [k, h] : u.components())
            REQUIRE(ale::membership_Ttilde(Term{k.sigma, k.logpow, h}).has_value());
    }
}
