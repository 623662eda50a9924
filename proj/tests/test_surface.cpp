#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "dcomp/rng.hpp"
#include "dcomp/stats.hpp"
#include "dcomp/surface.hpp"
#include "oracles.hpp"

using namespace dcomp;

namespace {

FactorSpace space_2d() {
    return FactorSpace({{"x1", FactorDef::Kind::Continuous, {-100.0, 100.0}, {}, false},
                        {"x2", FactorDef::Kind::Continuous, {-100.0, 100.0}, {}, false}});
}

Dataset simulate_2d(std::size_t n, double b0, double b1, double b2, std::uint64_t seed) {
    Dataset d;
    d.space = space_2d();
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double x1 = rng.uniform(-2.0, 2.0);
        double x2 = rng.uniform(-2.0, 2.0);
        d.add({{"x1", x1}, {"x2", x2}},
              rng.bernoulli(inv_logit(b0 + b1 * x1 + b2 * x2)) ? 1.0 : 0.0);
    }
    return d;
}

GlmFit mains_fit(std::uint64_t seed, double b0 = 0.3, double b1 = 0.9, double b2 = -0.6,
                 std::size_t n = 400) {
    auto d = simulate_2d(n, b0, b1, b2, seed);
    return fit_logistic(d, TermSpec({main_term("x1"), main_term("x2")}));
}

std::vector<FactorValues> square_grid(std::size_t per_axis) {
    auto space = space_2d();
    return make_grid(space, "x1", {-1.5, 1.5}, per_axis, "x2", {-1.5, 1.5}, per_axis, {});
}

bool identical_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("predict_surface: a zero coefficient vector gives 0.5 everywhere") {
    Dataset d;
    d.space = space_2d();
    // Both responses at every corner of a full factorial force beta = 0.
    for (double x1 : {-1.0, 1.0})
        for (double x2 : {-1.0, 1.0})
            for (double y : {0.0, 1.0}) d.add({{"x1", x1}, {"x2", x2}}, y);
    auto fit = fit_logistic(d, TermSpec({main_term("x1"), main_term("x2")}));
    auto surface = predict_surface(fit, square_grid(4));
    for (const auto& p : surface.points) CHECK(p.estimate == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("predict_surface: intercept-only closed form for estimate and standard error") {
    Dataset d;
    d.space = space_2d();
    const int n = 40, k = 15;
    for (int i = 0; i < n; ++i) d.add({{"x1", 0.1 * i}, {"x2", -0.2 * i}}, i < k ? 1.0 : 0.0);
    auto fit = fit_logistic(d, TermSpec{});
    auto surface = predict_surface(fit, square_grid(3));
    double p_hat = static_cast<double>(k) / n;
    double se = std::sqrt(1.0 / (n * p_hat * (1.0 - p_hat)));
    for (const auto& point : surface.points) {
        CHECK(point.estimate == doctest::Approx(p_hat).epsilon(1e-8));
        CHECK(point.se_eta == doctest::Approx(se).epsilon(1e-6));
    }
}

TEST_CASE("predict_surface: binomial bands ordered and strictly inside (0, 1)") {
    auto fit = mains_fit(42, 2.5, 2.0, -1.5);
    auto surface = predict_surface(fit, square_grid(8));
    for (const auto& p : surface.points) {
        CHECK(p.lower > 0.0);
        CHECK(p.upper < 1.0);
        CHECK(p.lower <= p.estimate);
        CHECK(p.estimate <= p.upper);
    }
}

TEST_CASE("predict_surface: gaussian bands on the identity scale") {
    Dataset d;
    d.space = space_2d();
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        double x1 = rng.uniform(-2.0, 2.0), x2 = rng.uniform(-2.0, 2.0);
        d.add({{"x1", x1}, {"x2", x2}}, 1.0 + 2.0 * x1 - x2 + rng.normal());
    }
    auto fit = fit_linear(d, TermSpec({main_term("x1"), main_term("x2")}));
    auto surface = predict_surface(fit, square_grid(5));
    constexpr double z95 = 1.959963984540054;
    for (const auto& p : surface.points) {
        CHECK(p.estimate == doctest::Approx(p.eta));
        CHECK(p.upper - p.estimate == doctest::Approx(z95 * p.se_eta).epsilon(1e-9));
        CHECK(p.estimate - p.lower == doctest::Approx(z95 * p.se_eta).epsilon(1e-9));
    }
}

TEST_CASE("predict_surface rejects a grid missing a model factor") {
    auto fit = mains_fit(43);
    std::vector<FactorValues> bad_grid = {{{"x1", 0.0}}};
    CHECK_THROWS(predict_surface(fit, bad_grid));
}

TEST_CASE("difference_surface: identical fits give zero delta and p = 1 everywhere") {
    auto fit = mains_fit(44);
    auto grid = square_grid(6);
    auto diff = difference_surface(fit, fit, grid);
    REQUIRE(diff.points.size() == grid.size());
    for (const auto& p : diff.points) {
        CHECK(p.delta == 0.0);
        CHECK(p.raw_p == 1.0);
        CHECK(p.adjusted_p == 1.0);
        CHECK(p.bucket == SignificanceBucket::None);
    }
}

TEST_CASE("difference_surface: swapping teams negates delta bit-exactly, p unchanged") {
    auto fit_a = mains_fit(45, 0.5, 1.2, -0.3);
    auto fit_b = mains_fit(46, -0.2, 0.7, -0.9);
    auto grid = square_grid(7);
    auto ab = difference_surface(fit_a, fit_b, grid);
    auto ba = difference_surface(fit_b, fit_a, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(identical_bits(ab.points[i].delta, -ba.points[i].delta));
        CHECK(identical_bits(ab.points[i].se, ba.points[i].se));
        CHECK(identical_bits(ab.points[i].raw_p, ba.points[i].raw_p));
        CHECK(identical_bits(ab.points[i].adjusted_p, ba.points[i].adjusted_p));
        CHECK(ab.points[i].bucket == ba.points[i].bucket);
    }
}

TEST_CASE("difference_surface: Bonferroni is exactly min(1, m * raw) with consistent buckets") {
    auto fit_a = mains_fit(47, 1.2, 1.5, -0.4);
    auto fit_b = mains_fit(48, -0.8, 0.4, -1.2);
    auto grid = square_grid(10);  // m = 100
    auto diff = difference_surface(fit_a, fit_b, grid);
    CHECK(diff.comparisons == 100);
    bool saw_significant = false;
    for (const auto& p : diff.points) {
        REQUIRE(p.has_p);
        CHECK(identical_bits(p.adjusted_p, std::min(1.0, 100.0 * p.raw_p)));
        CHECK(p.adjusted_p >= p.raw_p);
        SignificanceBucket expected = p.adjusted_p < 0.01   ? SignificanceBucket::Below01
                                      : p.adjusted_p < 0.05 ? SignificanceBucket::From01To05
                                      : p.adjusted_p < 0.1  ? SignificanceBucket::From05To10
                                                            : SignificanceBucket::None;
        CHECK(p.bucket == expected);
        if (p.bucket != SignificanceBucket::None) saw_significant = true;
    }
    CHECK(saw_significant);  // the two truths genuinely differ

    // A raw p of 0.0008 on a 100-point grid adjusts to 0.08.
    CHECK(std::min(1.0, 100.0 * 0.0008) == doctest::Approx(0.08));
}

TEST_CASE("difference_surface: logit-scale variant keeps delta on the probability scale") {
    auto fit_a = mains_fit(51, 0.9, 1.1, -0.2);
    auto fit_b = mains_fit(52, -0.1, 0.6, -0.8);
    auto grid = square_grid(5);
    auto prob_scale = difference_surface(fit_a, fit_b, grid, false);
    auto logit_scale = difference_surface(fit_a, fit_b, grid, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(prob_scale.points[i].delta == logit_scale.points[i].delta);
        // The test statistic moves; identical at eta-scale only by accident.
        CHECK(logit_scale.points[i].has_p);
    }
}

TEST_CASE("probability of agreement: identity, limits, monotonicity") {
    auto fit_a = mains_fit(53, 0.4, 0.8, -0.5);
    auto grid = square_grid(4);

    // Identical fits: PA = 2 Phi(delta / s) - 1, checked against quadrature.
    auto diff = difference_surface(fit_a, fit_a, grid);
    auto pa = probability_of_agreement(fit_a, fit_a, grid, 0.05);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = diff.points[i].se;
        double expected = 2.0 * oracle::normal_cdf(0.05 / s) - 1.0;
        CHECK(pa[i] == doctest::Approx(expected).epsilon(1e-7));
        CHECK(pa[i] >= 0.0);
        CHECK(pa[i] <= 1.0);
    }

    // Huge delta: agreement is certain.
    for (double v : probability_of_agreement(fit_a, fit_a, grid, 1e6))
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    // Monotone nondecreasing in delta.
    auto fit_b = mains_fit(54, -0.3, 0.5, -1.0);
    std::vector<double> previous(grid.size(), 0.0);
    for (double delta : {0.01, 0.05, 0.1, 0.2, 0.5}) {
        auto values = probability_of_agreement(fit_a, fit_b, grid, delta);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(values[i] >= previous[i] - 1e-12);
            previous[i] = values[i];
        }
    }

    CHECK_THROWS_AS(probability_of_agreement(fit_a, fit_b, grid, 0.0), ConfigError);
}

TEST_CASE("probability of agreement: degenerate spread falls back to the limit convention") {
    // Exact linear data has zero residual variance, hence zero standard error.
    Dataset d;
    d.space = space_2d();
    for (int i = 0; i < 10; ++i) {
        double x1 = 0.3 * i, x2 = -0.1 * i;
        d.add({{"x1", x1}, {"x2", x2}}, 2.0 + x1 - x2);
    }
    auto exact_a = fit_linear(d, TermSpec({main_term("x1"), main_term("x2")}));
    Dataset d2 = d;
    for (auto& y : d2.response) y += 0.02;  // parallel surface, 0.02 above
    auto exact_b = fit_linear(d2, TermSpec({main_term("x1"), main_term("x2")}));

    std::vector<FactorValues> grid = {{{"x1", 0.5}, {"x2", 0.5}}};
    auto inside = probability_of_agreement(exact_a, exact_b, grid, 0.05);
    CHECK(inside[0] == 1.0);
    auto outside = probability_of_agreement(exact_a, exact_b, grid, 0.01);
    CHECK(outside[0] == 0.0);
}

TEST_CASE("difference_surface flags degenerate points instead of inventing p-values") {
    Dataset d;
    d.space = space_2d();
    // Binomial fits never have exactly zero spread, so exercise the flag via
    // the gaussian-to-binomial guard instead: difference_surface requires
    // binomial fits.
    for (int i = 0; i < 10; ++i) d.add({{"x1", 0.3 * i}, {"x2", 0.1 * i}}, 2.0);
    auto gaussian = fit_linear(d, TermSpec({main_term("x1")}));
    std::vector<FactorValues> grid = {{{"x1", 0.0}, {"x2", 0.0}}};
    CHECK_THROWS_AS(difference_surface(gaussian, gaussian, grid), ConfigError);
}

TEST_CASE("make_grid pins off-axis factors and sizes the lattice") {
    FactorSpace space({{"a", FactorDef::Kind::Continuous, {0.0, 1.0}, {}, false},
                       {"b", FactorDef::Kind::Continuous, {0.0, 1.0}, {}, false},
                       {"g", FactorDef::Kind::Categorical, {}, {"u", "v"}, false}});
    FactorValues fixed{{"g", std::string("v")}};
    auto grid = make_grid(space, "a", {0.0, 1.0}, 3, "b", {0.0, 2.0}, 4, fixed);
    REQUIRE(grid.size() == 12);
    CHECK(std::get<double>(grid[0].at("a")) == doctest::Approx(0.0));
    CHECK(std::get<double>(grid[2].at("a")) == doctest::Approx(1.0));
    CHECK(std::get<std::string>(grid[5].at("g")) == "v");
    CHECK_THROWS_AS(make_grid(space, "g", {0.0, 1.0}, 3, "b", {0.0, 1.0}, 3, {}), ConfigError);
}
