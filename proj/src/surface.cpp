#include "dcomp/surface.hpp"

#include <algorithm>
#include <cmath>

#include "dcomp/stats.hpp"

namespace dcomp {

std::string_view to_string(SignificanceBucket bucket) {
    switch (bucket) {
        case SignificanceBucket::Below01: return "<0.01";
        case SignificanceBucket::From01To05: return "[0.01,0.05)";
        case SignificanceBucket::From05To10: return "[0.05,0.1)";
        case SignificanceBucket::None: return "none";
    }
    return "none";
}

namespace {

struct PointPrediction {
    double eta;
    double se_eta;
    double p;     // mean on the response scale
    double se_p;  // delta-method standard error on the response scale
};

PointPrediction predict_point(const GlmFit& fit, const FactorValues& at) {
    Eigen::RowVectorXd x = expand_row(fit.space, at, fit.terms);
    if (x.size() != fit.beta.size())
        throw ConfigError("grid point incompatible with the fitted model");
    PointPrediction out;
    out.eta = x.dot(fit.beta);
    double var = x * fit.covariance * x.transpose();
    out.se_eta = std::sqrt(std::max(0.0, var));
    if (fit.family == Family::BinomialLogit) {
        out.p = inv_logit(out.eta);
        out.se_p = out.p * (1.0 - out.p) * out.se_eta;
    } else {
        out.p = out.eta;
        out.se_p = out.se_eta;
    }
    return out;
}

}  // namespace

Surface predict_surface(const GlmFit& fit, std::span<const FactorValues> grid, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level outside (0, 1)");
    double z = norm_quantile(0.5 + 0.5 * level);

    Surface surface;
    surface.level = level;
    surface.points.reserve(grid.size());
    for (const auto& at : grid) {
        PointPrediction pred = predict_point(fit, at);
        SurfacePoint point;
        point.at = at;
        point.eta = pred.eta;
        point.se_eta = pred.se_eta;
        if (fit.family == Family::BinomialLogit) {
            point.estimate = clamp_open_unit(pred.p);
            point.lower = clamp_open_unit(inv_logit(pred.eta - z * pred.se_eta));
            point.upper = clamp_open_unit(inv_logit(pred.eta + z * pred.se_eta));
        } else {
            point.estimate = pred.p;
            point.lower = pred.eta - z * pred.se_eta;
            point.upper = pred.eta + z * pred.se_eta;
        }
        surface.points.push_back(std::move(point));
    }
    return surface;
}

DifferenceSurface difference_surface(const GlmFit& fit_a, const GlmFit& fit_b,
                                     std::span<const FactorValues> grid,
                                     bool test_on_logit_scale) {
    if (fit_a.family != Family::BinomialLogit || fit_b.family != Family::BinomialLogit)
        throw ConfigError("difference_surface requires two binomial fits");

    DifferenceSurface surface;
    surface.comparisons = grid.size();
    const double m = static_cast<double>(grid.size());

    for (const auto& at : grid) {
        PointPrediction a = predict_point(fit_a, at);
        PointPrediction b = predict_point(fit_b, at);
        DifferencePoint point;
        point.at = at;
        point.delta = a.p - b.p;
        point.se = std::sqrt(a.se_p * a.se_p + b.se_p * b.se_p);

        double num = test_on_logit_scale ? a.eta - b.eta : point.delta;
        double den = test_on_logit_scale
                         ? std::sqrt(a.se_eta * a.se_eta + b.se_eta * b.se_eta)
                         : point.se;
        if (den > 0.0) {
            point.has_p = true;
            point.z = num / den;
            point.raw_p = normal_two_sided_p(point.z);
            point.adjusted_p = std::min(1.0, m * point.raw_p);
            if (point.adjusted_p < 0.01)
                point.bucket = SignificanceBucket::Below01;
            else if (point.adjusted_p < 0.05)
                point.bucket = SignificanceBucket::From01To05;
            else if (point.adjusted_p < 0.1)
                point.bucket = SignificanceBucket::From05To10;
            else
                point.bucket = SignificanceBucket::None;
        }
        surface.points.push_back(std::move(point));
    }
    return surface;
}

std::vector<double> probability_of_agreement(const GlmFit& fit_a, const GlmFit& fit_b,
                                             std::span<const FactorValues> grid, double delta) {
    if (!(delta > 0.0)) throw ConfigError("probability_of_agreement: delta must be positive");
    std::vector<double> pa;
    pa.reserve(grid.size());
    for (const auto& at : grid) {
        PointPrediction a = predict_point(fit_a, at);
        PointPrediction b = predict_point(fit_b, at);
        double diff = a.p - b.p;
        double s = std::sqrt(a.se_p * a.se_p + b.se_p * b.se_p);
        if (s == 0.0) {
            pa.push_back(std::abs(diff) <= delta ? 1.0 : 0.0);
            continue;
        }
        pa.push_back(norm_cdf((delta - diff) / s) - norm_cdf((-delta - diff) / s));
    }
    return pa;
}

std::vector<FactorValues> make_grid(const FactorSpace& space, const std::string& x_factor,
                                    Interval x_range, std::size_t x_count,
                                    const std::string& y_factor, Interval y_range,
                                    std::size_t y_count, const FactorValues& fixed) {
    if (!space.at(x_factor).is_continuous() || !space.at(y_factor).is_continuous())
        throw ConfigError("grid axes must be continuous factors");
    if (x_count < 2 || y_count < 2) throw ConfigError("grid needs at least 2 points per axis");

    auto tick = [](Interval r, std::size_t count, std::size_t i) {
        return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    };

    std::vector<FactorValues> grid;
    grid.reserve(x_count * y_count);
    for (std::size_t j = 0; j < y_count; ++j) {
        for (std::size_t i = 0; i < x_count; ++i) {
            FactorValues at = fixed;
            at[x_factor] = tick(x_range, x_count, i);
            at[y_factor] = tick(y_range, y_count, j);
            grid.push_back(std::move(at));
        }
    }
    return grid;
}

}  // namespace dcomp
