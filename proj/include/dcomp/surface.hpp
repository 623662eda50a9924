#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dcomp/glm.hpp"

namespace dcomp {

struct SurfacePoint {
    FactorValues at;
    double eta = 0.0;      // linear predictor
    double se_eta = 0.0;   // standard error of eta
    double estimate = 0.0; // mean response (probability for binomial fits)
    double lower = 0.0;
    double upper = 0.0;
};

struct Surface {
    std::vector<SurfacePoint> points;
    double level = 0.95;
};

// Pointwise fitted means with confidence bands over a grid. Every factor of
// the fit must be supplied at each point (off-axis factors held fixed).
// Binomial bands are computed on the logit scale and transformed, so they stay
// inside (0, 1).
Surface predict_surface(const GlmFit& fit, std::span<const FactorValues> grid,
                        double level = 0.95);

enum class SignificanceBucket { Below01, From01To05, From05To10, None };

std::string_view to_string(SignificanceBucket bucket);

struct DifferencePoint {
    FactorValues at;
    double delta = 0.0;  // estimate_a - estimate_b on the probability scale
    double se = 0.0;
    bool has_p = false;  // false when both fits are deterministic at the point
    double z = 0.0;
    double raw_p = 1.0;
    double adjusted_p = 1.0;
    SignificanceBucket bucket = SignificanceBucket::None;
};

struct DifferenceSurface {
    std::vector<DifferencePoint> points;
    std::size_t comparisons = 0;  // Bonferroni multiplier m
};

// Pointwise comparison of two binomial fits over a grid, Bonferroni-adjusted
// across the grid. test_on_logit_scale switches the z statistic to the linear
// predictor scale as a sensitivity check; delta stays on the probability
// scale either way.
DifferenceSurface difference_surface(const GlmFit& fit_a, const GlmFit& fit_b,
                                     std::span<const FactorValues> grid,
                                     bool test_on_logit_scale = false);

// Normal-approximation probability that the true difference of the two
// surfaces lies within +/- delta at each grid point.
std::vector<double> probability_of_agreement(const GlmFit& fit_a, const GlmFit& fit_b,
                                             std::span<const FactorValues> grid, double delta);

// Evenly spaced grid over two continuous factors with the remaining factors
// pinned at fixed values.
std::vector<FactorValues> make_grid(const FactorSpace& space, const std::string& x_factor,
                                    Interval x_range, std::size_t x_count,
                                    const std::string& y_factor, Interval y_range,
                                    std::size_t y_count, const FactorValues& fixed);

}  // namespace dcomp
