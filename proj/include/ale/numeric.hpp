#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "metric.hpp"
#include "term.hpp"

namespace ale {

inline constexpr double kNoiseFloor = 1e-300;

/// Radii and directions for numeric sampling, plus the finite-difference
/// step rule h = fd_ratio * r.
struct SamplePlan {
    std::vector<double> radii;
    std::vector<std::vector<double>> directions;
    double fd_ratio = 1e-3;

    void validate(int n) const {
        if (radii.size() < 3) throw std::invalid_argument("SamplePlan: need at least 3 radii");
        for (std::size_t i = 1; i < radii.size(); ++i)
            if (radii[i] <= radii[i - 1])
                throw std::invalid_argument("SamplePlan: radii must be strictly increasing");
        if (radii.front() <= 0) throw std::invalid_argument("SamplePlan: radii must be positive");
        if (directions.empty()) throw std::invalid_argument("SamplePlan: no directions");
        for (const auto& d : directions) {
            if ((int)d.size() != n) throw std::invalid_argument("SamplePlan: direction arity");
            double s = 0;
            for (double v : d) s += v * v;
            if (s == 0) throw std::invalid_argument("SamplePlan: zero direction");
        }
        if (fd_ratio <= 0 || fd_ratio >= 1)
            throw std::invalid_argument("SamplePlan: fd_ratio out of range");
    }
};

/// Coordinate axes plus the all-ones diagonal, radii 10..80.
inline SamplePlan default_plan(int n) {
    SamplePlan p;
    p.radii = {10.0, 20.0, 40.0, 80.0};
    for (int a = 0; a < n; ++a) {
        std::vector<double> d(n, 0.0);
        d[a] = 1.0;
        p.directions.push_back(d);
    }
    p.directions.push_back(std::vector<double>(n, 1.0));
    return p;
}

/// Floating-point value of an expansion at x: per component
/// |x|^(sigma-m) (log|x|)^i h(x), rational coefficients converted at
/// evaluation time.
inline double numeric_eval(const Expansion& a, const std::vector<double>& x) {
    if ((int)x.size() != a.dim()) throw std::invalid_argument("numeric_eval: arity mismatch");
    double r2 = 0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    const double lr = std::log(r);
    double acc = 0;
    for (const auto& [k, h] : a.components()) {
        double term = std::pow(r, double(k.sigma - k.m)) * h.eval(x);
        for (int t = 0; t < k.logpow; ++t) term *= lr;
        acc += term;
    }
    return acc;
}

struct SlopeResult {
    bool below_noise = false;  // every sample under the noise floor
    double slope = 0.0;        // max over directions of the per-direction fit
};

/// Least-squares slope of log|f| against log r per direction, maximized over
/// the plan's directions. Directions whose samples all sit under the noise
/// floor are skipped; if every direction is skipped the proxy is reported as
/// identically zero.
inline SlopeResult decay_slope(const std::function<double(const std::vector<double>&)>& f,
                               const SamplePlan& plan, int n) {
    plan.validate(n);
    SlopeResult out;
    bool any = false;
    for (const auto& dir : plan.directions) {
        double norm = 0;
        for (double v : dir) norm += v * v;
        norm = std::sqrt(norm);
        std::vector<double> ls, lf;
        for (double r : plan.radii) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = r * dir[i] / norm;
            double v = std::fabs(f(x));
            if (v < kNoiseFloor) continue;
            ls.push_back(std::log(r));
            lf.push_back(std::log(v));
        }
        if (ls.size() < 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double N = double(ls.size());
        for (std::size_t i = 0; i < ls.size(); ++i) {
            sx += ls[i];
            sy += lf[i];
            sxx += ls[i] * ls[i];
            sxy += ls[i] * lf[i];
        }
        double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
        if (!any || slope > out.slope) out.slope = slope;
        any = true;
    }
    out.below_noise = !any;
    return out;
}

/// Numeric state for Ricci-proxy evaluation: the metric deviation plus its
/// exact first and second derivative expansions, differentiated once up
/// front.
class NumericMetric {
  public:
    explicit NumericMetric(const ExpansionMatrix& U)
        : n_(U.dim()), U_(U), dU_(differentiate(U)), d2U_(n_) {
        for (int a = 0; a < n_; ++a) {
            d2U_[a].resize(n_);
            for (int b = 0; b < n_; ++b) {
                d2U_[a][b] = make_exp_mat(n_);
                for (int i = 0; i < n_; ++i)
                    for (int j = i; j < n_; ++j) {
                        d2U_[a][b][i][j] = exp_diff(dU_[a][i][j], b + 1);
                        if (i != j) d2U_[a][b][j][i] = d2U_[a][b][i][j];
                    }
            }
        }
    }

    int dim() const { return n_; }
    const ExpansionMatrix& deviation() const { return U_; }

    Eigen::MatrixXd metric_at(const std::vector<double>& x) const {
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                double v = numeric_eval(U_.at(i, j), x);
                g(i, j) += v;
                if (i != j) g(j, i) += v;
            }
        return g;
    }

    double d2_entry(int a, int b, int i, int j, const std::vector<double>& x) const {
        return numeric_eval(d2U_[a][b][i][j], x);
    }

    /// Matrix of sum_kl g^{kl} d_k d_l g_ij - Q_ij at x, with the matrix
    /// inverse taken numerically (Cholesky; positive definiteness checked)
    /// and Q assembled from point values.
    Eigen::MatrixXd proxy_matrix(const std::vector<double>& x) const {
        const int n = n_;
        Eigen::MatrixXd g = metric_at(x);
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("ricci_proxy: metric not positive definite at sample point");
        Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));

        std::vector<Eigen::MatrixXd> dg(n), dginv(n);
        for (int a = 0; a < n; ++a) {
            dg[a] = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double v = numeric_eval(dU_[a][i][j], x);
                    dg[a](i, j) = v;
                    if (i != j) dg[a](j, i) = v;
                }
            dginv[a] = -ginv * dg[a] * ginv;
        }

        std::vector<Eigen::MatrixXd> Gamma(n, Eigen::MatrixXd::Zero(n, n));
        for (int k = 0; k < n; ++k)
            for (int p = 0; p < n; ++p)
                for (int r = 0; r < n; ++r) {
                    double s = 0;
                    for (int m = 0; m < n; ++m)
                        s += ginv(k, m) * (dg[r](p, m) + dg[p](m, r) - dg[m](p, r));
                    Gamma[k](p, r) = 0.5 * s;
                }

        Eigen::MatrixXd out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double main = 0;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        main += ginv(k, l) * d2_entry(k, l, i, j, x);
                double q1 = 0;
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        for (int k = 0; k < n; ++k)
                            for (int l = 0; l < n; ++l)
                                q1 += ginv(p, q) * g(l, j) * dg[p](i, k) * dginv[q](k, l);
                double q2 = 0;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double inner = 0;
                        for (int p = 0; p < n; ++p)
                            for (int q = 0; q < n; ++q)
                                for (int r = 0; r < n; ++r)
                                    for (int s = 0; s < n; ++s)
                                        inner += ginv(p, q) * ginv(r, s) * Gamma[k](p, r) *
                                                 Gamma[l](q, s);
                        q2 += g(i, k) * g(l, j) * inner;
                    }
                double qij = -q1 - 2 * q2;
                out(i, j) = main - qij;
            }
        return out;
    }

    /// max over (i,j) of the absolute proxy entries at x.
    double ricci_proxy(const std::vector<double>& x) const {
        return proxy_matrix(x).cwiseAbs().maxCoeff();
    }

    /// Agreement between symbolic second derivatives and central finite
    /// differences with step h = fd_ratio * |x|. Each pair must satisfy
    ///   |fd - sym| <= 10 h^2 |sym| + roundoff,
    /// where roundoff = 8 eps gscale / h^2 is the cancellation floor of a
    /// second difference of values of size gscale. Returns the worst ratio
    /// of left to right side; <= 1 means every pair agrees.
    double fd_check_ratio(const std::vector<double>& x, double fd_ratio) const {
        const int n = n_;
        double r = 0;
        for (double v : x) r += v * v;
        r = std::sqrt(r);
        const double h = fd_ratio * r;

        auto entry = [&](const std::vector<double>& p, int i, int j) {
            return numeric_eval(U_.at(i, j), p);
        };
        double gscale = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                gscale = std::max(gscale, 1.0 + std::fabs(entry(x, i, j)));
        const double eps = std::numeric_limits<double>::epsilon();
        const double roundoff = 8.0 * eps * gscale / (h * h);
        const double rel_bound = 10.0 * h * h;

        double worst = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        double sym = d2_entry(a, b, i, j, x);
                        double fd;
                        std::vector<double> p = x;
                        if (a == b) {
                            p[a] = x[a] + h;
                            double fp = entry(p, i, j);
                            p[a] = x[a] - h;
                            double fm = entry(p, i, j);
                            fd = (fp - 2 * entry(x, i, j) + fm) / (h * h);
                        } else {
                            auto at = [&](double da, double db) {
                                p = x;
                                p[a] += da;
                                p[b] += db;
                                return entry(p, i, j);
                            };
                            fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
                        }
                        double ratio = std::fabs(fd - sym) /
                                       (rel_bound * std::fabs(sym) + roundoff);
                        if (ratio > worst) worst = ratio;
                    }
        return worst;
    }

  private:
    int n_;
    ExpansionMatrix U_;
    ExpMat3 dU_;
    std::vector<std::vector<ExpMat>> d2U_;
};

inline double numeric_ricci_proxy(const NumericMetric& m, const std::vector<double>& x) {
    return m.ricci_proxy(x);
}

}  // namespace ale
