#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ale {

/// Exact rational number backed by GMP. Always canonical: denominator > 0,
/// gcd(numerator, denominator) = 1.
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) : v_(n, d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        v_.canonicalize();
    }

    /// Parses "p" or "p/q" (no decimals, no whitespace).
    static Rational parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("Rational: empty string");
        std::size_t slash = s.find('/');
        std::string num = slash == std::string::npos ? s : s.substr(0, slash);
        std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
        auto digits = [](const std::string& t, bool sign_ok) {
            if (t.empty()) return false;
            std::size_t i = sign_ok && (t[0] == '-' || t[0] == '+') ? 1 : 0;
            if (i == t.size()) return false;
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9') return false;
            return true;
        };
        if (!digits(num, true) || !digits(den, false))
            throw std::invalid_argument("Rational: malformed '" + s + "'");
        if (num[0] == '+') num.erase(0, 1);  // mpz_set_str takes '-' but not '+'
        Rational r;
        r.v_ = mpq_class(mpz_class(num), mpz_class(den));
        if (r.v_.get_den() == 0) throw std::invalid_argument("Rational: zero denominator");
        r.v_.canonicalize();
        return r;
    }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
        return Rational(mpq_class(v_ / o.v_));
    }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }

    Rational inverse() const {
        if (is_zero()) throw std::invalid_argument("Rational: inverse of zero");
        return Rational(mpq_class(1 / v_));
    }

    double to_double() const { return mpq_get_d(v_.get_mpq_t()); }

    /// Canonical form: "p" when the denominator is 1, else "p/q".
    std::string str() const { return v_.get_str(); }

    std::string numerator_str() const { return v_.get_num().get_str(); }
    std::string denominator_str() const { return v_.get_den().get_str(); }

  private:
    explicit Rational(mpq_class q) : v_(std::move(q)) {}
    mpq_class v_;
};

inline Rational operator*(long a, const Rational& b) { return Rational(a) * b; }

}  // namespace ale
