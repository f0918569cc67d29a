#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace ale {

using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order: lower total degree first, ties broken
/// lexicographically. Gives every polynomial one canonical term order.
struct GradedLex {
    bool operator()(const Exponents& a, const Exponents& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

/// Sparse polynomial in n variables over Rational. Terms are held in a
/// vector sorted by GradedLex; zero coefficients are never stored. Sums
/// and products work by merging sorted runs, which keeps the term volume
/// of deep expansion arithmetic from drowning in per-node bookkeeping.
class Poly {
  public:
    using TermList = std::vector<std::pair<Exponents, Rational>>;

    explicit Poly(int nvars = 0) : n_(nvars) {
        if (nvars < 0) throw std::invalid_argument("Poly: negative variable count");
    }

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term(Exponents(nvars, 0), c);
        return p;
    }

    static Poly variable(int nvars, int i) {
        if (i < 0 || i >= nvars) throw std::invalid_argument("Poly: variable index out of range");
        Poly p(nvars);
        Exponents e(nvars, 0);
        e[i] = 1;
        p.add_term(e, Rational(1));
        return p;
    }

    static Poly monomial(int nvars, const Exponents& e, const Rational& c) {
        Poly p(nvars);
        p.add_term(e, c);
        return p;
    }

    /// |x|^2 = sum of squares of all variables.
    static Poly radius_sq(int nvars) {
        Poly p(nvars);
        for (int i = 0; i < nvars; ++i) {
            Exponents e(nvars, 0);
            e[i] = 2;
            p.add_term(e, Rational(1));
        }
        return p;
    }

    int nvars() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermList& terms() const { return terms_; }

    void add_term(const Exponents& e, const Rational& c) {
        if ((int)e.size() != n_) throw std::invalid_argument("Poly: exponent arity mismatch");
        for (int x : e)
            if (x < 0) throw std::invalid_argument("Poly: negative exponent");
        if (c.is_zero()) return;
        auto it = std::lower_bound(
            terms_.begin(), terms_.end(), e,
            [](const auto& t, const Exponents& key) { return GradedLex{}(t.first, key); });
        if (it != terms_.end() && it->first == e) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        } else {
            terms_.emplace(it, e, c);
        }
    }

    Poly operator+(const Poly& o) const { return merged(o, false); }
    Poly operator-(const Poly& o) const { return merged(o, true); }

    Poly operator-() const {
        Poly r(n_);
        r.terms_.reserve(terms_.size());
        for (const auto& [e, c] : terms_) r.terms_.emplace_back(e, -c);
        return r;
    }

    Poly operator*(const Rational& s) const {
        Poly r(n_);
        if (s.is_zero()) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& [e, c] : terms_) r.terms_.emplace_back(e, c * s);
        return r;
    }

    Poly operator*(const Poly& o) const {
        check_arity(o);
        Poly r(n_);
        if (terms_.empty() || o.terms_.empty()) return r;
        if (n_ <= 7 && degree() <= 127 && o.degree() <= 127) {
            mul_packed(o, r);
            return r;
        }

        struct Row {
            int deg;
            Exponents e;
            Rational c;
        };
        std::vector<Row> rows;
        rows.reserve(terms_.size() * o.terms_.size());
        for (const auto& [ea, ca] : terms_) {
            const int da = total_degree(ea);
            for (const auto& [eb, cb] : o.terms_) {
                Exponents e(n_);
                for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
                rows.push_back(Row{da + total_degree(eb), std::move(e), ca * cb});
            }
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.deg != b.deg) return a.deg < b.deg;
            return std::lexicographical_compare(a.e.begin(), a.e.end(), b.e.begin(), b.e.end());
        });

        std::size_t i = 0;
        while (i < rows.size()) {
            Rational acc = std::move(rows[i].c);
            std::size_t j = i + 1;
            while (j < rows.size() && rows[j].e == rows[i].e) acc += rows[j++].c;
            if (!acc.is_zero()) r.terms_.emplace_back(std::move(rows[i].e), std::move(acc));
            i = j;
        }
        return r;
    }

    bool operator==(const Poly& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly partial(int i) const {
        if (i < 0 || i >= n_) throw std::invalid_argument("Poly: variable index out of range");
        // Decrementing one fixed exponent preserves the graded-lex order of
        // the surviving terms, so the result can be built in a single pass.
        Poly r(n_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents d = e;
            d[i] -= 1;
            r.terms_.emplace_back(std::move(d), c * Rational(e[i]));
        }
        return r;
    }

    Poly laplacian() const {
        Poly r(n_);
        for (int i = 0; i < n_; ++i) r = r + partial(i).partial(i);
        return r;
    }

    /// Largest total degree among stored terms; -1 for the zero polynomial.
    int degree() const {
        if (terms_.empty()) return -1;
        return total_degree(terms_.back().first);
    }

    int min_degree() const {
        if (terms_.empty()) return -1;
        return total_degree(terms_.front().first);
    }

    bool is_homogeneous() const { return terms_.empty() || degree() == min_degree(); }

    Poly homogeneous_component(int d) const {
        Poly r(n_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == d) r.terms_.emplace_back(e, c);
        return r;
    }

    double eval(const std::vector<double>& x) const {
        if ((int)x.size() != n_) throw std::invalid_argument("Poly: point arity mismatch");
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = c.to_double();
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < e[i]; ++k) m *= x[i];
            acc += m;
        }
        return acc;
    }

    Rational eval_exact(const std::vector<Rational>& x) const {
        if ((int)x.size() != n_) throw std::invalid_argument("Poly: point arity mismatch");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational m = c;
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < e[i]; ++k) m *= x[i];
            acc += m;
        }
        return acc;
    }

  private:
    void check_arity(const Poly& o) const {
        if (n_ != o.n_) throw std::invalid_argument("Poly: arity mismatch");
    }

    /// Product fast path for <= 7 variables and factor degrees <= 127: an
    /// exponent vector packs into one uint64 (total degree in the top byte,
    /// then one byte per variable), whose numeric order IS the graded-lex
    /// order and whose sum IS the exponent sum (no byte overflows at these
    /// bounds). Monomial products then sort as plain integers.
    void mul_packed(const Poly& o, Poly& r) const {
        auto pack = [this](const Exponents& e) {
            std::uint64_t key = static_cast<std::uint64_t>(total_degree(e)) << 56;
            for (int i = 0; i < n_; ++i)
                key |= static_cast<std::uint64_t>(e[i]) << (8 * (6 - i));
            return key;
        };
        std::vector<std::uint64_t> ka(terms_.size()), kb(o.terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) ka[i] = pack(terms_[i].first);
        for (std::size_t i = 0; i < o.terms_.size(); ++i) kb[i] = pack(o.terms_[i].first);

        std::vector<std::pair<std::uint64_t, Rational>> rows;
        rows.reserve(terms_.size() * o.terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i)
            for (std::size_t j = 0; j < o.terms_.size(); ++j)
                rows.emplace_back(ka[i] + kb[j], terms_[i].second * o.terms_[j].second);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t i = 0;
        while (i < rows.size()) {
            Rational acc = std::move(rows[i].second);
            std::size_t j = i + 1;
            while (j < rows.size() && rows[j].first == rows[i].first) acc += rows[j++].second;
            if (!acc.is_zero()) {
                Exponents e(n_);
                for (int v = 0; v < n_; ++v)
                    e[v] = static_cast<int>((rows[i].first >> (8 * (6 - v))) & 0xff);
                r.terms_.emplace_back(std::move(e), std::move(acc));
            }
            i = j;
        }
    }

    /// Linear merge of two sorted term lists; `subtract` negates the right side.
    Poly merged(const Poly& o, bool subtract) const {
        check_arity(o);
        Poly r(n_);
        r.terms_.reserve(terms_.size() + o.terms_.size());
        GradedLex less;
        auto a = terms_.begin();
        auto b = o.terms_.begin();
        while (a != terms_.end() && b != o.terms_.end()) {
            if (less(a->first, b->first)) {
                r.terms_.push_back(*a++);
            } else if (less(b->first, a->first)) {
                r.terms_.emplace_back(b->first, subtract ? -b->second : b->second);
                ++b;
            } else {
                Rational s = subtract ? a->second - b->second : a->second + b->second;
                if (!s.is_zero()) r.terms_.emplace_back(a->first, std::move(s));
                ++a;
                ++b;
            }
        }
        for (; a != terms_.end(); ++a) r.terms_.push_back(*a);
        for (; b != o.terms_.end(); ++b)
            r.terms_.emplace_back(b->first, subtract ? -b->second : b->second);
        return r;
    }

    int n_;
    TermList terms_;
};

inline Poly operator*(const Rational& s, const Poly& p) { return p * s; }

}  // namespace ale
