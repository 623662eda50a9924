#pragma once

#include <cmath>

namespace dcomp {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Logistic function, stable for large |eta|.
inline double inv_logit(double eta) {
    if (eta >= 0.0) {
        double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

// Clamp into the open unit interval; inverse-logit saturates to exactly 0 or 1
// in double precision beyond |eta| ~ 37.
inline double clamp_open_unit(double p) {
    constexpr double lo = 1e-300;
    constexpr double hi = 1.0 - 1e-16;
    if (p < lo) return lo;
    if (p > hi) return hi;
    return p;
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Upper-tail two-sided normal p-value for a z statistic.
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) * M_SQRT1_2); }

double norm_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, int df);

}  // namespace dcomp
