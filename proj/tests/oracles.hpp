#pragma once

// Independent oracles used to pin expected values in the test suites. These
// deliberately avoid the library's own code paths: root finding by bisection,
// likelihood maximization by numeric-derivative Newton, least squares by
// explicit normal equations, and tail probabilities by quadrature.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// x with sigmoid(beta0 + beta1 * x) == p, found by bisection.
inline double logistic_point(double p, double beta0, double beta1) {
    double lo = -1e6, hi = 1e6;
    if (beta1 < 0) std::swap(lo, hi);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (sigmoid(beta0 + beta1 * mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Bernoulli log-likelihood for a dense design matrix (row-major).
inline double logistic_loglik(const std::vector<std::vector<double>>& x,
                              const std::vector<double>& y, const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) eta += x[i][j] * beta[j];
        // log(p) and log(1-p) written through log1p(exp(.)) for stability
        double log_p = -std::log1p(std::exp(-eta));
        double log_q = -std::log1p(std::exp(eta));
        ll += y[i] * log_p + (1.0 - y[i]) * log_q;
    }
    return ll;
}

// Gauss-Jordan inverse; small matrices only.
inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14) throw std::runtime_error("oracle: singular matrix");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        double d = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

// Maximum-likelihood logistic coefficients by Newton ascent with numeric
// central-difference gradient and Hessian.
inline std::vector<double> logistic_mle(const std::vector<std::vector<double>>& x,
                                        const std::vector<double>& y, std::size_t k) {
    std::vector<double> beta(k, 0.0);
    const double h = 1e-5;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> grad(k);
        std::vector<std::vector<double>> hess(k, std::vector<double>(k));
        for (std::size_t i = 0; i < k; ++i) {
            auto bp = beta, bm = beta;
            bp[i] += h;
            bm[i] -= h;
            grad[i] = (logistic_loglik(x, y, bp) - logistic_loglik(x, y, bm)) / (2 * h);
        }
        double f0 = logistic_loglik(x, y, beta);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                auto bpp = beta, bpm = beta, bmp = beta, bmm = beta;
                bpp[i] += h;
                bpp[j] += h;
                bpm[i] += h;
                bpm[j] -= h;
                bmp[i] -= h;
                bmp[j] += h;
                bmm[i] -= h;
                bmm[j] -= h;
                double d = (logistic_loglik(x, y, bpp) - logistic_loglik(x, y, bpm) -
                            logistic_loglik(x, y, bmp) + logistic_loglik(x, y, bmm)) /
                           (4 * h * h);
                hess[i][j] = hess[j][i] = d;
            }
        }
        // Newton step on the negative Hessian.
        for (auto& row : hess)
            for (auto& v : row) v = -v;
        auto hinv = invert(hess);
        std::vector<double> step(k, 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) step[i] += hinv[i][j] * grad[j];
            norm = std::max(norm, std::abs(step[i]));
        }
        // Backtrack if the step does not improve the likelihood.
        double scale = 1.0;
        std::vector<double> next(k);
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t i = 0; i < k; ++i) next[i] = beta[i] + scale * step[i];
            if (logistic_loglik(x, y, next) >= f0 - 1e-12) break;
            scale *= 0.5;
        }
        beta = next;
        if (norm * scale < 1e-10) break;
    }
    return beta;
}

// Ordinary least squares through explicit normal equations.
inline std::vector<double> ols(const std::vector<std::vector<double>>& x,
                               const std::vector<double>& y) {
    std::size_t n = x.size(), k = x[0].size();
    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += x[i][a] * y[i];
            for (std::size_t b = 0; b < k; ++b) xtx[a][b] += x[i][a] * x[i][b];
        }
    }
    auto inv = invert(xtx);
    std::vector<double> beta(k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) beta[a] += inv[a][b] * xty[b];
    return beta;
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals = 20000) {
    if (intervals % 2) ++intervals;
    double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Chi-square upper tail by quadrature. Substituting x = t*t makes the density
// integrable at the origin for df = 1.
inline double chi2_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    double log_norm = -0.5 * df * std::log(2.0) - std::lgamma(0.5 * df);
    auto g = [&](double t) {
        if (t < 0.0) return 0.0;
        // t^(df-1) tends to a positive constant at 0 only for df = 1.
        if (t == 0.0) return df == 1 ? 2.0 * std::exp(log_norm) : 0.0;
        return 2.0 * std::exp((df - 1) * std::log(t) - 0.5 * t * t + log_norm);
    };
    double cdf = simpson(g, 0.0, std::sqrt(x));
    return 1.0 - cdf;
}

// Standard normal CDF by quadrature from the mean.
inline double normal_cdf(double x) {
    auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    if (x >= 0.0) return 0.5 + simpson(pdf, 0.0, x);
    return 0.5 - simpson(pdf, x, 0.0);
}

// Two-sided Kolmogorov-Smirnov statistic against U(0, 1).
inline double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, (i + 1) / n - p[i]);
        d = std::max(d, p[i] - i / n);
    }
    return d;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace oracle
