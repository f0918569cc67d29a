#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ale/harmonic.hpp"
#include "ale/poly.hpp"
#include "ale/rational.hpp"
#include "support/generators.hpp"

using ale::Exponents;
using ale::Poly;
using ale::Rational;

TEST_CASE("rational arithmetic stays canonical") {
    Rational a(2, 4);
    REQUIRE(a.str() == "1/2");
    REQUIRE((a + Rational(1, 2)).str() == "1");
    REQUIRE((a * Rational(-4, 3)).str() == "-2/3");
    REQUIRE((Rational(3, 7) / Rational(6, 7)).str() == "1/2");
    REQUIRE(Rational(5, 8).inverse().str() == "8/5");
    REQUIRE(Rational(-3, -6).str() == "1/2");
    REQUIRE(Rational(0, 5).is_zero());
}

TEST_CASE("rational parse accepts p and p/q only") {
    REQUIRE(Rational::parse("-7/3").str() == "-7/3");
    REQUIRE(Rational::parse("+4/8").str() == "1/2");
    REQUIRE(Rational::parse("12").str() == "12");
    REQUIRE_THROWS_AS(Rational::parse(""), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("1.5"), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("a/2"), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("1/-2"), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("1 / 2"), std::invalid_argument);
}

TEST_CASE("rational division by zero throws") {
    REQUIRE_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational(0).inverse(), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("polynomial construction and arithmetic") {
    const int n = 3;
    Poly x = Poly::variable(n, 0);
    Poly y = Poly::variable(n, 1);

    Poly p = (x + y) * (x - y);
    Poly expected(n);
    expected.add_term({2, 0, 0}, Rational(1));
    expected.add_term({0, 2, 0}, Rational(-1));
    REQUIRE(p == expected);

    REQUIRE((x - x).is_zero());
    REQUIRE((x - x).degree() == -1);
    REQUIRE((p * Rational(0)).is_zero());
}

TEST_CASE("add_term validates exponents and folds zeros") {
    Poly p(2);
    REQUIRE_THROWS_AS(p.add_term({1}, Rational(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(p.add_term({-1, 0}, Rational(1)), std::invalid_argument);
    p.add_term({1, 1}, Rational(2, 3));
    p.add_term({1, 1}, Rational(-2, 3));
    REQUIRE(p.is_zero());
}

TEST_CASE("partial derivatives and laplacian") {
    const int n = 4;
    Poly p = Poly::monomial(n, {2, 3, 0, 0}, Rational(1));
    REQUIRE(p.partial(1) == Poly::monomial(n, {2, 2, 0, 0}, Rational(3)));
    REQUIRE(p.partial(3).is_zero());
    REQUIRE(Poly::radius_sq(n).laplacian() == Poly::constant(n, Rational(2 * n)));
    REQUIRE(Poly::variable(n, 2).laplacian().is_zero());
}

TEST_CASE("degree bookkeeping and homogeneous components") {
    Poly p(2);
    p.add_term({1, 0}, Rational(1));
    p.add_term({0, 3}, Rational(2));
    REQUIRE(p.degree() == 3);
    REQUIRE(p.min_degree() == 1);
    REQUIRE_FALSE(p.is_homogeneous());
    REQUIRE(p.homogeneous_component(3) == Poly::monomial(2, {0, 3}, Rational(2)));
    REQUIRE(p.homogeneous_component(2).is_zero());
}

TEST_CASE("evaluation in doubles and exact rationals") {
    const int n = 2;
    Poly p = Poly::monomial(n, {2, 1}, Rational(1));  // x^2 y
    REQUIRE(p.eval({2.0, 3.0}) == 12.0);
    REQUIRE(p.eval_exact({Rational(1, 2), Rational(4)}) == Rational(1));
}

TEST_CASE("x1^2 splits into a harmonic part plus a radial multiple") {
    const int n = 4;
    Poly p = Poly::monomial(n, {2, 0, 0, 0}, Rational(1));
    auto pieces = ale::harmonic_decompose(p);
    REQUIRE(pieces.size() == 2);

    Poly h2 = p - Poly::radius_sq(n) * Rational(1, 4);
    REQUIRE(pieces[0].radial_power == 0);
    REQUIRE(pieces[0].harmonic == h2);
    REQUIRE(pieces[1].radial_power == 1);
    REQUIRE(pieces[1].harmonic == Poly::constant(n, Rational(1, 4)));
}

TEST_CASE("decomposition of an already harmonic polynomial is itself") {
    auto rng = gen::make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int n = gen::rand_int(rng, 4, 6);
        int k = gen::rand_int(rng, 0, 4);
        Poly h = gen::rand_harmonic(rng, n, k);
        auto pieces = ale::harmonic_decompose(h);
        REQUIRE(pieces.size() == 1);
        REQUIRE(pieces[0].radial_power == 0);
        REQUIRE(pieces[0].harmonic == h);
    }
}

TEST_CASE("decomposition reassembles exactly and every piece is harmonic") {
    auto rng = gen::make_rng(12);
    for (int trial = 0; trial < 60; ++trial) {
        int n = gen::rand_int(rng, 4, 6);
        int k = gen::rand_int(rng, 0, 8);
        Poly p = gen::rand_homogeneous(rng, n, k);

        Poly back(n);
        const Poly r2 = Poly::radius_sq(n);
        for (const auto& piece : ale::harmonic_decompose(p)) {
            REQUIRE(ale::is_harmonic(piece.harmonic));
            REQUIRE(piece.harmonic.is_homogeneous());
            REQUIRE(piece.harmonic.degree() == k - 2 * piece.radial_power);
            Poly radial = Poly::constant(n, Rational(1));
            for (int t = 0; t < piece.radial_power; ++t) radial = radial * r2;
            back = back + radial * piece.harmonic;
        }
        REQUIRE(back == p);
    }
}

TEST_CASE("radial shifts of harmonics obey the eigenvalue identity") {
    // Lap(|x|^{2a} h_m) = 2a (2a + 2m + n - 2) |x|^{2a-2} h_m
    auto rng = gen::make_rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        int n = gen::rand_int(rng, 4, 6);
        int m = gen::rand_int(rng, 0, 3);
        int a = gen::rand_int(rng, 1, 3);
        Poly h = gen::rand_harmonic(rng, n, m);
        const Poly r2 = Poly::radius_sq(n);

        Poly lhs = h;
        for (int t = 0; t < a; ++t) lhs = lhs * r2;
        lhs = lhs.laplacian();

        Poly rhs = h * Rational(2L * a * (2L * a + 2L * m + n - 2));
        for (int t = 0; t < a - 1; ++t) rhs = rhs * r2;
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("decomposition rejects non-homogeneous input") {
    Poly p(4);
    p.add_term({1, 0, 0, 0}, Rational(1));
    p.add_term({0, 0, 0, 2}, Rational(1));
    REQUIRE_THROWS_AS(ale::harmonic_decompose(p), std::invalid_argument);
}
