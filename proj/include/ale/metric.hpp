#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "poisson.hpp"
#include "term.hpp"

namespace ale {

inline int tri_size(int n) { return n * (n + 1) / 2; }

/// Index of (i, j), i <= j, into row-major upper-triangle storage.
inline int tri_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n) throw std::out_of_range("tri_index");
    return i * n - i * (i - 1) / 2 + (j - i);
}

/// Symmetric n x n matrix of Expansions; entry (i, j) and (j, i) share
/// storage, so symmetry is structural.
class ExpansionMatrix {
  public:
    explicit ExpansionMatrix(int n = 0) : n_(n), up_(tri_size(n), Expansion(n)) {}

    int dim() const { return n_; }
    Expansion& at(int i, int j) { return up_[tri_index(n_, i, j)]; }
    const Expansion& at(int i, int j) const { return up_[tri_index(n_, i, j)]; }

    bool is_zero() const {
        for (const auto& e : up_)
            if (!e.is_zero()) return false;
        return true;
    }

    /// Total component count over the upper triangle (i <= j).
    std::size_t total_components() const {
        std::size_t c = 0;
        for (const auto& e : up_) c += e.component_count();
        return c;
    }

    int max_logpow() const {
        int mx = 0;
        for (const auto& e : up_)
            if (e.max_logpow() > mx) mx = e.max_logpow();
        return mx;
    }

    bool operator==(const ExpansionMatrix& o) const { return n_ == o.n_ && up_ == o.up_; }

  private:
    int n_;
    std::vector<Expansion> up_;
};

/// Free harmonic data: at each level k >= 1 a symmetric matrix of harmonic
/// homogeneous degree-k polynomials, injected as r^{-(n-2)-k} G_k terms.
struct SeedData {
    int n = 0;
    std::map<int, std::vector<Poly>> levels;  // level -> upper-triangle polys

    void set(int level, int i, int j, const Poly& h) {
        if (level < 1) throw std::invalid_argument("SeedData: level must be >= 1");
        auto it = levels.find(level);
        if (it == levels.end())
            it = levels.emplace(level, std::vector<Poly>(tri_size(n), Poly(n))).first;
        it->second[tri_index(n, i, j)] = h;
    }

    const Poly* get(int level, int i, int j) const {
        auto it = levels.find(level);
        if (it == levels.end()) return nullptr;
        return &it->second[tri_index(n, i, j)];
    }

    void validate() const {
        if (n < 4) throw std::invalid_argument("SeedData: dimension must be >= 4");
        for (const auto& [k, mat] : levels) {
            for (const Poly& h : mat) {
                if (h.is_zero()) continue;
                if (h.nvars() != n) throw std::invalid_argument("SeedData: arity mismatch");
                if (!h.is_homogeneous() || h.degree() != k)
                    throw std::invalid_argument("SeedData: level " + std::to_string(k) +
                                                " polynomial degree mismatch");
                if (!is_harmonic(h))
                    throw std::invalid_argument("SeedData: level " + std::to_string(k) +
                                                " polynomial not harmonic");
            }
        }
    }
};

using ExpMat = std::vector<std::vector<Expansion>>;
using ExpMat3 = std::vector<ExpMat>;

inline ExpMat make_exp_mat(int n) {
    return ExpMat(n, std::vector<Expansion>(n, Expansion(n)));
}

/// Multiplicative inverse minus one: returns w with (1 + v)(1 + w) = 1 up to
/// terms of sigma < -Q, via the geometric series w = sum_{k>=1} (-v)^k.
inline Expansion reciprocal(const Expansion& v, int Q) {
    if (auto lead = leading_order(v); lead && lead->first >= 0)
        throw std::invalid_argument("reciprocal: constant term present");
    Expansion w(v.dim());
    Expansion pw = truncate(exp_neg(v), Q);
    Expansion neg_v = exp_neg(v);
    while (!pw.is_zero()) {
        w = exp_add(w, pw);
        pw = exp_mul(pw, neg_v, Q);
    }
    return w;
}

/// Neumann-series matrix inverse: V with (delta + U)(delta + V) = delta up to
/// sigma < -Q, V = sum_{k>=1} (-U)^k.
inline ExpansionMatrix metric_inverse(const ExpansionMatrix& U, int Q) {
    const int n = U.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (auto lead = leading_order(U.at(i, j)); lead && lead->first >= 0)
                throw std::invalid_argument("metric_inverse: non-decaying entry");

    ExpMat acc = make_exp_mat(n);
    ExpMat pw = make_exp_mat(n);
    bool nonzero = false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            pw[i][j] = truncate(exp_neg(U.at(i, j)), Q);
            nonzero = nonzero || !pw[i][j].is_zero();
        }
    while (nonzero) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc[i][j] = exp_add(acc[i][j], pw[i][j]);
        ExpMat nx = make_exp_mat(n);
        nonzero = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expansion s(n);
                for (int k = 0; k < n; ++k)
                    s = exp_add(s, exp_mul(pw[i][k], exp_neg(U.at(k, j)), Q));
                nonzero = nonzero || !s.is_zero();
                nx[i][j] = std::move(s);
            }
        pw = std::move(nx);
    }
    ExpansionMatrix V(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) V.at(i, j) = acc[i][j];
    return V;
}

/// First derivatives dU[a][i][j] = d(U_ij)/dx_{a+1}.
inline ExpMat3 differentiate(const ExpansionMatrix& U) {
    const int n = U.dim();
    ExpMat3 dU(n, make_exp_mat(n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                dU[a][i][j] = exp_diff(U.at(i, j), a + 1);
                if (i != j) dU[a][j][i] = dU[a][i][j];
            }
    return dU;
}

/// Gamma^k_pr = (1/2) g^{km} (d_r g_pm + d_p g_mr - d_m g_pr) with
/// g^{km} = delta + V. Symmetric in (p, r).
inline ExpMat3 christoffel(const ExpansionMatrix& V, const ExpMat3& dU, int Q) {
    const int n = V.dim();
    ExpMat3 M(n, make_exp_mat(n));
    for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p)
            for (int r = p; r < n; ++r) {
                M[m][p][r] = exp_sub(exp_add(dU[r][p][m], dU[p][m][r]), dU[m][p][r]);
                if (p != r) M[m][r][p] = M[m][p][r];
            }
    const Rational half(1, 2);
    ExpMat3 G(n, make_exp_mat(n));
    for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p)
            for (int r = p; r < n; ++r) {
                Expansion s = M[k][p][r];
                for (int m = 0; m < n; ++m)
                    s = exp_add(s, exp_mul(V.at(k, m), M[m][p][r], Q));
                G[k][p][r] = exp_scale(s, half);
                if (p != r) G[k][r][p] = G[k][p][r];
            }
    return G;
}

/// Quadratic gradient terms of the harmonic-coordinate Ricci-flat system:
///   Q_ij = - g^{pq} g_{lj} d_p g_ik d_q g^{kl}
///          - 2 g_ik g_lj g^{pq} g^{rs} Gamma^k_pr Gamma^l_qs,
/// assembled through staged single-index contractions.
inline ExpMat q_term(const ExpansionMatrix& U, const ExpansionMatrix& V, const ExpMat3& dU,
                     const ExpMat3& dV, const ExpMat3& Gamma, int Q) {
    const int n = U.dim();
    const Expansion unit = Expansion::one(n);

    auto glow = [&](int i, int j) {
        return i == j ? exp_add(unit, U.at(i, j)) : U.at(i, j);
    };
    auto gup = [&](int i, int j) {
        return i == j ? exp_add(unit, V.at(i, j)) : V.at(i, j);
    };

    ExpMat gl = make_exp_mat(n), gu = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            gl[i][j] = glow(i, j);
            gu[i][j] = gup(i, j);
        }

    // Q1 staging: S1[i][k][q] = sum_p g^{pq} d_p g_ik  (symmetric in i, k);
    //             S2[i][l]    = sum_{k,q} S1[i][k][q] d_q g^{kl}.
    ExpMat3 S1(n, make_exp_mat(n));
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k)
            for (int q = 0; q < n; ++q) {
                Expansion s(n);
                for (int p = 0; p < n; ++p) s = exp_add(s, exp_mul(gu[p][q], dU[p][i][k], Q));
                S1[i][k][q] = std::move(s);
                if (i != k) S1[k][i][q] = S1[i][k][q];
            }
    ExpMat S2 = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            Expansion s(n);
            for (int k = 0; k < n; ++k)
                for (int q = 0; q < n; ++q) s = exp_add(s, exp_mul(S1[i][k][q], dV[q][k][l], Q));
            S2[i][l] = std::move(s);
        }

    // Q2 staging: raise both lower indices of Gamma, contract the pair, then
    // lower the free indices with g.
    ExpMat3 G1(n, make_exp_mat(n)), G2(n, make_exp_mat(n));
    for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
                Expansion s(n);
                for (int p = 0; p < n; ++p) s = exp_add(s, exp_mul(gu[p][q], Gamma[k][p][r], Q));
                G1[k][q][r] = std::move(s);
            }
    // G2[k][q][s] = sum g^{pq} g^{rs} Gamma^k_pr is symmetric in (q, s):
    // relabel the contracted pair (p, r) and use Gamma's lower symmetry.
    for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
            for (int s2 = q; s2 < n; ++s2) {
                Expansion s(n);
                for (int r = 0; r < n; ++r) s = exp_add(s, exp_mul(gu[r][s2], G1[k][q][r], Q));
                G2[k][q][s2] = std::move(s);
                if (q != s2) G2[k][s2][q] = G2[k][q][s2];
            }
    // S[k][l] = sum g^{pq} g^{rs} Gamma^k_pr Gamma^l_qs is symmetric in
    // (k, l): swap the contracted pairs (p,r) <-> (q,s).
    ExpMat S = make_exp_mat(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            Expansion s(n);
            for (int q = 0; q < n; ++q)
                for (int s2 = 0; s2 < n; ++s2)
                    s = exp_add(s, exp_mul(G2[k][q][s2], Gamma[l][q][s2], Q));
            S[k][l] = std::move(s);
            if (k != l) S[l][k] = S[k][l];
        }
    ExpMat P = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            Expansion s(n);
            for (int k = 0; k < n; ++k) s = exp_add(s, exp_mul(gl[i][k], S[k][l], Q));
            P[i][l] = std::move(s);
        }

    // The assembled total is symmetric in (i, j); compute the upper triangle
    // and mirror (asserted exactly by the unit suite).
    ExpMat out = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Expansion q1(n), q2(n);
            for (int l = 0; l < n; ++l) {
                q1 = exp_add(q1, exp_mul(S2[i][l], gl[l][j], Q));
                q2 = exp_add(q2, exp_mul(P[i][l], gl[l][j], Q));
            }
            out[i][j] = exp_sub(exp_neg(q1), exp_scale(q2, Rational(2)));
            if (i != j) out[j][i] = out[i][j];
        }
    return out;
}

/// The four intermediates every audit of a state needs. Building them once
/// and passing them around halves the cost of the deep final checks.
struct RhsParts {
    ExpansionMatrix V;
    ExpMat3 dU;
    ExpMat3 dV;
    ExpMat3 Gamma;
};

inline RhsParts rhs_parts(const ExpansionMatrix& U, int Q) {
    RhsParts p{metric_inverse(U, Q), differentiate(U), {}, {}};
    p.dV = differentiate(p.V);
    p.Gamma = christoffel(p.V, p.dU, Q);
    return p;
}

/// Right-hand side of Delta U_ij = RHS_ij:
///   RHS_ij = - (g^{kl} - delta^{kl}) d_k d_l g_ij + Q_ij(g, dg),
/// with every matrix operation truncated at Q. The parts must have been
/// built from the same U at the same Q.
inline ExpMat rhs(const ExpansionMatrix& U, int Q, const RhsParts& parts) {
    const int n = U.dim();
    // Both the main term (d2 of a symmetric entry against symmetric V) and
    // the quadratic term are symmetric in (i, j): fill the upper triangle.
    ExpMat out = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Expansion main(n);
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) {
                    // d_a d_b = d_b d_a and V is symmetric: off-diagonal
                    // pairs contribute twice.
                    Expansion d2 = exp_diff(parts.dU[a][i][j], b + 1);
                    Expansion prod = exp_mul(parts.V.at(a, b), d2, Q);
                    if (a != b) prod = exp_scale(prod, Rational(2));
                    main = exp_add(main, prod);
                }
            out[i][j] = exp_neg(main);
        }

    ExpMat Qmat = q_term(U, parts.V, parts.dU, parts.dV, parts.Gamma, Q);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            out[i][j] = exp_add(out[i][j], Qmat[i][j]);
            if (i != j) out[j][i] = out[i][j];
        }
    return out;
}

inline ExpMat rhs(const ExpansionMatrix& U, int Q) { return rhs(U, Q, rhs_parts(U, Q)); }

/// R_ij = Lap(U_ij) - RHS_ij, truncated at Q+2. Identically zero on a state
/// certified at order Q.
inline ExpMat symbolic_residual(const ExpansionMatrix& U, int Q) {
    const int n = U.dim();
    ExpMat R = rhs(U, Q + 2);
    ExpMat out = make_exp_mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[i][j] = truncate(exp_sub(exp_laplacian(U.at(i, j)), R[i][j]), Q + 2);
    return out;
}

/// Harmonic-gauge diagnostic: the expansion of sum_{i,j} g^{ij} Gamma^k_ij
/// per k. Reported, never asserted zero.
inline std::vector<Expansion> gauge_residual(const ExpansionMatrix& U, int Q) {
    const int n = U.dim();
    ExpansionMatrix V = metric_inverse(U, Q);
    ExpMat3 dU = differentiate(U);
    ExpMat3 Gamma = christoffel(V, dU, Q);
    std::vector<Expansion> out(n, Expansion(n));
    for (int k = 0; k < n; ++k) {
        Expansion s(n);
        for (int i = 0; i < n; ++i) s = exp_add(s, Gamma[k][i][i]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s = exp_add(s, exp_mul(V.at(i, j), Gamma[k][i][j], Q));
        out[k] = std::move(s);
    }
    return out;
}

/// Same diagnostic from parts built at depth >= Q, truncated at Q. Every
/// factor decays, so deeper parts cannot change any order above -Q and the
/// certified content matches the self-contained overload exactly.
inline std::vector<Expansion> gauge_residual(const ExpansionMatrix& U, int Q,
                                             const RhsParts& parts) {
    const int n = U.dim();
    std::vector<Expansion> out(n, Expansion(n));
    for (int k = 0; k < n; ++k) {
        Expansion s(n);
        for (int i = 0; i < n; ++i) s = exp_add(s, parts.Gamma[k][i][i]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s = exp_add(s, exp_mul(parts.V.at(i, j), parts.Gamma[k][i][j], Q));
        out[k] = truncate(s, Q);
    }
    return out;
}

struct StageInfo {
    int N;
    int q;
    std::size_t term_count;
    long wall_ms;
};

struct BootstrapState {
    int n = 0;
    int Q = 0;
    int q = 0;  // certified order, q_N = N(n-1)
    ExpansionMatrix U;
    std::vector<StageInfo> stages;
};

inline void inject_seeds(ExpansionMatrix& U, const SeedData& seeds, int max_level_order) {
    const int n = U.dim();
    for (const auto& [k, mat] : seeds.levels) {
        if (n - 2 + k > max_level_order) continue;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const Poly& h = mat[tri_index(n, i, j)];
                if (!h.is_zero()) U.at(i, j).insert(2 - n - k, 0, h);
            }
    }
}

/// One induction stage: recompute RHS from the current state truncated at
/// q_hat + 2 = min(Q, q_{N+1}) + 2, invert the Laplacian term-wise, and add
/// every seed level k with n-2+k <= q_hat. Output is certified at
/// q_{N+1} = q_N + (n-1).
inline BootstrapState bootstrap_step(const BootstrapState& state, const SeedData& seeds,
                                     int log_guard = 4) {
    const int n = state.n;
    const auto t0 = std::chrono::steady_clock::now();
    const int q_next = state.q + (n - 1);
    const int q_hat = std::min(state.Q, q_next);
    const int Q_work = q_hat + 2;

    ExpMat R = rhs(state.U, Q_work);
    ExpansionMatrix Unew(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) Unew.at(i, j) = solve_expansion(truncate(R[i][j], Q_work));
    inject_seeds(Unew, seeds, q_hat);

    if (n > 4 && Unew.max_logpow() != 0)
        throw std::logic_error("bootstrap_step: log term produced with n > 4");
    if (n == 4 && Unew.max_logpow() > log_guard)
        throw std::runtime_error("bootstrap_step: log depth guard exceeded");
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (auto lead = leading_order(Unew.at(i, j)); lead && lead->first > 1 - n)
                throw std::logic_error("bootstrap_step: term above metric decay rate");

    BootstrapState out;
    out.n = n;
    out.Q = state.Q;
    out.q = q_next;
    out.U = std::move(Unew);
    out.stages = state.stages;
    const auto t1 = std::chrono::steady_clock::now();
    out.stages.push_back(
        {q_next / (n - 1), q_next, out.U.total_components(),
         std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()});
    return out;
}

struct Report {
    int n = 0;
    int Q = 0;
    std::vector<StageInfo> stages;
    // Leading order of the symbolic residual per upper-triangle entry; empty
    // optional means the entry cancels exactly.
    std::vector<std::optional<std::pair<int, int>>> residual_leading;
    std::vector<std::optional<std::pair<int, int>>> gauge_leading;
    std::vector<std::pair<int, int>> log_inventory;  // (sigma, logpow>=1), deduplicated
    bool residual_ok = false;
    // Source terms with sigma + n + m = 0 in the audited right-hand side
    // (upper triangle, depth Q+2). Nonzero would mean the solver was handed
    // an exceptional exponent; for n > 4 this must stay zero.
    std::size_t exceptional_source_terms = 0;
};

inline std::vector<std::pair<int, int>> collect_log_inventory(const ExpansionMatrix& U) {
    std::map<std::pair<int, int>, bool> seen;
    const int n = U.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (const auto& [k, h] : U.at(i, j).components())
                if (k.logpow >= 1) seen[{k.sigma, k.logpow}] = true;
    std::vector<std::pair<int, int>> out;
    for (const auto& [p, b] : seen) out.push_back(p);
    return out;
}

/// Runs the induction from the level-1 seed state until the certified order
/// reaches Q, then audits the result (residual per entry, gauge diagnostic,
/// log inventory).
inline std::pair<ExpansionMatrix, Report> run_bootstrap(int n, int Q, const SeedData& seeds,
                                                        int log_guard = 4) {
    if (n < 4) throw std::invalid_argument("run_bootstrap: n must be >= 4");
    if (Q < n - 1) throw std::invalid_argument("run_bootstrap: Q must be >= n-1");
    if (seeds.n != n) throw std::invalid_argument("run_bootstrap: seed dimension mismatch");
    seeds.validate();

    BootstrapState state;
    state.n = n;
    state.Q = Q;
    state.q = n - 1;
    state.U = ExpansionMatrix(n);
    inject_seeds(state.U, seeds, n - 1);
    state.stages.push_back({1, n - 1, state.U.total_components(), 0});

    while (state.q < Q) state = bootstrap_step(state, seeds, log_guard);

    Report rep;
    rep.n = n;
    rep.Q = Q;
    rep.stages = state.stages;
    const int q_cert = std::min(Q, state.q);
    // One set of intermediates serves the residual, the exceptional-exponent
    // scan, and the gauge diagnostic.
    RhsParts parts = rhs_parts(state.U, q_cert + 2);
    ExpMat Rsrc = rhs(state.U, q_cert + 2, parts);
    rep.residual_ok = true;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Expansion res =
                truncate(exp_sub(exp_laplacian(state.U.at(i, j)), Rsrc[i][j]), q_cert + 2);
            auto lead = leading_order(res);
            rep.residual_leading.push_back(lead);
            if (lead) rep.residual_ok = false;
            for (const auto& [k, h] : Rsrc[i][j].components())
                if (k.sigma + n + k.m == 0) ++rep.exceptional_source_terms;
        }
    for (const Expansion& g : gauge_residual(state.U, Q, parts))
        rep.gauge_leading.push_back(leading_order(g));
    rep.log_inventory = collect_log_inventory(state.U);
    return {state.U, rep};
}

}  // namespace ale
