#include "dcomp/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dcomp/stats.hpp"

namespace dcomp {

std::string Term::label() const {
    switch (kind) {
        case Kind::Intercept: return "(intercept)";
        case Kind::Main: return f1;
        case Kind::Quadratic: return f1 + "^2";
        case Kind::Interaction: return f1 + ":" + f2;
    }
    return "";
}

TermSpec::TermSpec(std::vector<Term> terms) {
    terms_.push_back(intercept_term());
    for (auto& t : terms) {
        if (t.kind == Term::Kind::Intercept) continue;
        if (t.kind == Term::Kind::Interaction && t.f1 == t.f2)
            throw ConfigError("interaction term requires two distinct factors");
        if (has(t)) throw ConfigError("duplicate model term " + t.label());
        terms_.push_back(std::move(t));
    }
}

bool TermSpec::has(const Term& term) const {
    return std::find(terms_.begin(), terms_.end(), term) != terms_.end();
}

TermSpec TermSpec::without(const Term& term) const {
    std::vector<Term> kept;
    for (const auto& t : terms_)
        if (!(t == term) && t.kind != Term::Kind::Intercept) kept.push_back(t);
    return TermSpec(std::move(kept));
}

TermSpec TermSpec::with(const Term& term) const {
    std::vector<Term> kept(terms_.begin() + 1, terms_.end());
    kept.push_back(term);
    return TermSpec(std::move(kept));
}

bool TermSpec::nested_in(const TermSpec& other) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const Term& t) { return other.has(t); });
}

std::vector<Term> TermSpec::higher_order_terms() const {
    std::vector<Term> out;
    for (const auto& t : terms_)
        if (t.higher_order()) out.push_back(t);
    return out;
}

TermSpec TermSpec::mains(std::span<const std::string> factors) {
    std::vector<Term> terms;
    for (const auto& f : factors) terms.push_back(main_term(f));
    return TermSpec(std::move(terms));
}

TermSpec TermSpec::full_pool(const FactorSpace& space, std::span<const std::string> factors) {
    std::vector<Term> terms;
    for (const auto& f : factors) terms.push_back(main_term(f));
    for (const auto& f : factors)
        if (space.at(f).is_continuous()) terms.push_back(quadratic_term(f));
    for (std::size_t i = 0; i < factors.size(); ++i)
        for (std::size_t j = i + 1; j < factors.size(); ++j)
            terms.push_back(interaction_term(factors[i], factors[j]));
    return TermSpec(std::move(terms));
}

void Dataset::add(FactorValues values, double y) {
    rows.push_back(std::move(values));
    response.push_back(y);
}

namespace {

// Basis columns for one term: a single column for continuous pieces, one
// indicator per non-reference level for categorical ones.
struct TermColumns {
    std::vector<std::string> names;
    // evaluate row -> column values
    std::vector<double> eval(const FactorSpace& space, const FactorValues& row) const;
    const Term* term = nullptr;
    const FactorSpace* space = nullptr;
};

double continuous_at(const FactorValues& row, const std::string& factor) {
    auto it = row.find(factor);
    if (it == row.end())
        throw ValidationError("model row missing factor '" + factor + "'");
    const double* v = std::get_if<double>(&it->second);
    if (!v) throw ValidationError("factor '" + factor + "' expects a numeric value");
    return *v;
}

const std::string& level_at(const FactorValues& row, const std::string& factor) {
    auto it = row.find(factor);
    if (it == row.end())
        throw ValidationError("model row missing factor '" + factor + "'");
    const std::string* v = std::get_if<std::string>(&it->second);
    if (!v) throw ValidationError("factor '" + factor + "' expects a level");
    return *v;
}

// Per-factor basis used to assemble term columns.
struct FactorBasis {
    bool continuous = true;
    std::vector<std::string> indicator_levels;  // non-reference levels

    static FactorBasis of(const FactorSpace& space, const std::string& factor) {
        const FactorDef& def = space.at(factor);
        FactorBasis basis;
        basis.continuous = def.is_continuous();
        if (!basis.continuous)
            basis.indicator_levels.assign(def.levels.begin() + 1, def.levels.end());
        return basis;
    }

    std::size_t width() const { return continuous ? 1 : indicator_levels.size(); }

    void values(const FactorValues& row, const std::string& factor, std::vector<double>& out) const {
        if (continuous) {
            out.push_back(continuous_at(row, factor));
            return;
        }
        const std::string& level = level_at(row, factor);
        for (const auto& l : indicator_levels) out.push_back(level == l ? 1.0 : 0.0);
    }

    void names(const std::string& factor, std::vector<std::string>& out) const {
        if (continuous) {
            out.push_back(factor);
            return;
        }
        for (const auto& l : indicator_levels) out.push_back(factor + "[" + l + "]");
    }
};

}  // namespace

DesignMatrix expand_design(const FactorSpace& space, std::span<const FactorValues> rows,
                           const TermSpec& terms) {
    DesignMatrix design;

    // Column names first, to size the matrix.
    for (const auto& term : terms.terms()) {
        switch (term.kind) {
            case Term::Kind::Intercept: design.column_names.emplace_back("(intercept)"); break;
            case Term::Kind::Main:
                FactorBasis::of(space, term.f1).names(term.f1, design.column_names);
                break;
            case Term::Kind::Quadratic: {
                if (!space.at(term.f1).is_continuous())
                    throw ConfigError("quadratic term on categorical factor '" + term.f1 + "'");
                design.column_names.push_back(term.f1 + "^2");
                break;
            }
            case Term::Kind::Interaction: {
                std::vector<std::string> a, b;
                FactorBasis::of(space, term.f1).names(term.f1, a);
                FactorBasis::of(space, term.f2).names(term.f2, b);
                for (const auto& na : a)
                    for (const auto& nb : b) design.column_names.push_back(na + ":" + nb);
                break;
            }
        }
    }

    design.x.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(design.column_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        design.x.row(static_cast<Eigen::Index>(r)) = expand_row(space, rows[r], terms);
    return design;
}

Eigen::RowVectorXd expand_row(const FactorSpace& space, const FactorValues& values,
                              const TermSpec& terms) {
    std::vector<double> out;
    std::vector<double> a, b;
    for (const auto& term : terms.terms()) {
        switch (term.kind) {
            case Term::Kind::Intercept: out.push_back(1.0); break;
            case Term::Kind::Main:
                FactorBasis::of(space, term.f1).values(values, term.f1, out);
                break;
            case Term::Kind::Quadratic: {
                double v = continuous_at(values, term.f1);
                out.push_back(v * v);
                break;
            }
            case Term::Kind::Interaction: {
                a.clear();
                b.clear();
                FactorBasis::of(space, term.f1).values(values, term.f1, a);
                FactorBasis::of(space, term.f2).values(values, term.f2, b);
                for (double va : a)
                    for (double vb : b) out.push_back(va * vb);
                break;
            }
        }
    }
    return Eigen::Map<Eigen::RowVectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

namespace {

void check_design(const Eigen::MatrixXd& x, const std::vector<std::string>& names,
                  std::size_t n_rows) {
    if (n_rows < static_cast<std::size_t>(x.cols()))
        throw SingularDesignError("design has " + std::to_string(n_rows) + " rows for " +
                                  std::to_string(x.cols()) + " coefficients");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) {
        // Columns permuted past the rank are the linearly dependent ones.
        std::string culprits;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < x.cols(); ++i) {
            if (!culprits.empty()) culprits += ", ";
            culprits += names[static_cast<std::size_t>(perm[i])];
        }
        throw SingularDesignError("singular design; collinear columns: " + culprits);
    }
}

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        // y is 0/1, so the saturated log-likelihood is 0.
        dev -= 2.0 * (y[i] * std::log(clamp_open_unit(p[i])) +
                      (1.0 - y[i]) * std::log(clamp_open_unit(1.0 - p[i])));
    }
    return dev;
}

Eigen::VectorXd fitted_probs(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd p(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) p[i] = inv_logit(eta[i]);
    return p;
}

constexpr double kDevianceTol = 1e-8;
constexpr double kScoreTol = 1e-6;
constexpr int kMaxIterations = 50;
constexpr double kSeparationProbTol = 1e-10;
constexpr double kBetaDivergence = 1e4;

bool separated(const Eigen::VectorXd& p, const Eigen::VectorXd& beta, double deviance) {
    bool all_at_bounds = true;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > kSeparationProbTol && p[i] < 1.0 - kSeparationProbTol) {
            all_at_bounds = false;
            break;
        }
    if (all_at_bounds) return true;
    if (beta.norm() > kBetaDivergence) return true;
    // A perfect fit of 0/1 responses means the classes are separated and the
    // MLE is off at infinity.
    return deviance < kDevianceTol;
}

}  // namespace

GlmFit fit_logistic(const Dataset& data, const TermSpec& terms) {
    if (data.rows.size() != data.response.size())
        throw ConfigError("dataset rows and responses differ in length");
    for (double y : data.response)
        if (y != 0.0 && y != 1.0)
            throw ValidationError("binomial response must be 0 or 1");

    DesignMatrix design = expand_design(data.space, data.rows, terms);
    check_design(design.x, design.column_names, data.n());
    const Eigen::MatrixXd& x = design.x;
    Eigen::Map<const Eigen::VectorXd> y(data.response.data(),
                                        static_cast<Eigen::Index>(data.response.size()));

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    Eigen::VectorXd p = fitted_probs(x, beta);
    double deviance = binomial_deviance(y, p);

    GlmFit fit;
    fit.terms = terms;
    fit.family = Family::BinomialLogit;
    fit.space = data.space;
    fit.column_names = design.column_names;
    fit.n = data.n();
    fit.convergence.deviance_trace.push_back(deviance);

    bool converged = false;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        Eigen::VectorXd w = p.array() * (1.0 - p.array());
        w = w.array().max(1e-12);
        Eigen::VectorXd z = x * beta + (y - p).cwiseQuotient(w);
        Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
        Eigen::VectorXd proposal = (xtw * x).ldlt().solve(xtw * z);

        // Step-halve until the deviance does not increase.
        Eigen::VectorXd next = proposal;
        Eigen::VectorXd p_next = fitted_probs(x, next);
        double dev_next = binomial_deviance(y, p_next);
        for (int half = 0; half < 30 && dev_next > deviance + 1e-12; ++half) {
            next = 0.5 * (next + beta);
            p_next = fitted_probs(x, next);
            dev_next = binomial_deviance(y, p_next);
        }

        double change = deviance - dev_next;
        beta = next;
        p = p_next;
        deviance = dev_next;
        fit.convergence.iterations = iter;
        fit.convergence.final_deviance_change = change;
        fit.convergence.deviance_trace.push_back(deviance);

        if (separated(p, beta, deviance))
            throw SeparationError(
                "complete or quasi-complete separation: the maximum-likelihood estimate diverges");

        if (std::abs(change) < kDevianceTol) {
            double score = (x.transpose() * (y - p)).cwiseAbs().maxCoeff();
            if (score < kScoreTol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        std::string trace;
        for (double d : fit.convergence.deviance_trace) {
            if (!trace.empty()) trace += " -> ";
            trace += std::to_string(d);
        }
        throw NonConvergenceError("IRLS did not converge in " + std::to_string(kMaxIterations) +
                                  " iterations; deviance trace: " + trace);
    }

    Eigen::VectorXd w = p.array() * (1.0 - p.array());
    Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
    fit.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    fit.beta = beta;
    fit.deviance = deviance;
    return fit;
}

GlmFit fit_linear(const Dataset& data, const TermSpec& terms) {
    if (data.rows.size() != data.response.size())
        throw ConfigError("dataset rows and responses differ in length");

    DesignMatrix design = expand_design(data.space, data.rows, terms);
    check_design(design.x, design.column_names, data.n());
    const Eigen::MatrixXd& x = design.x;
    Eigen::Map<const Eigen::VectorXd> y(data.response.data(),
                                        static_cast<Eigen::Index>(data.response.size()));

    Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    Eigen::VectorXd residuals = y - x * beta;
    double rss = residuals.squaredNorm();
    auto dof = static_cast<double>(data.n()) - static_cast<double>(x.cols());

    GlmFit fit;
    fit.terms = terms;
    fit.family = Family::GaussianIdentity;
    fit.space = data.space;
    fit.column_names = design.column_names;
    fit.beta = beta;
    fit.deviance = rss;
    fit.n = data.n();
    fit.sigma2 = dof > 0.0 ? rss / dof : 0.0;
    fit.covariance = fit.sigma2 * (x.transpose() * x)
                                      .ldlt()
                                      .solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    fit.convergence.iterations = 1;
    return fit;
}

LrtResult likelihood_ratio_test(const GlmFit& full, const GlmFit& reduced) {
    if (full.family != reduced.family)
        throw ConfigError("likelihood ratio test across different families");
    if (full.n != reduced.n)
        throw ConfigError("likelihood ratio test requires the same data in both fits");
    if (!reduced.terms.nested_in(full.terms))
        throw ConfigError("likelihood ratio test requires nested models");

    LrtResult result;
    result.df = static_cast<int>(full.k()) - static_cast<int>(reduced.k());
    // Deviance of the nested model can dip below the full model's only through
    // convergence noise; clamp at zero.
    result.statistic = std::max(0.0, reduced.deviance - full.deviance);
    result.p = result.df == 0 ? 1.0 : chi_square_sf(result.statistic, result.df);
    return result;
}

namespace {

GlmFit fit_family(const Dataset& data, const TermSpec& terms, Family family) {
    return family == Family::BinomialLogit ? fit_logistic(data, terms)
                                           : fit_linear(data, terms);
}

}  // namespace

SelectionResult select_model(const Dataset& data, const TermSpec& pool, double alpha,
                             Family family) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("select_model: alpha outside (0, 1)");

    GlmFit full = fit_family(data, pool, family);
    SelectionResult result;
    result.fit = full;

    TermSpec current = pool;
    while (true) {
        GlmFit current_fit = fit_family(data, current, family);
        bool found = false;
        Term drop;
        double drop_p = alpha;
        for (const Term& term : current.higher_order_terms()) {
            GlmFit candidate = fit_family(data, current.without(term), family);
            double p = likelihood_ratio_test(current_fit, candidate).p;
            if (p > drop_p) {
                drop_p = p;
                drop = term;
                found = true;
            }
        }
        if (!found) {
            result.fit = std::move(current_fit);
            break;
        }
        result.dropped.push_back(drop);
        current = current.without(drop);
    }

    // The simplification must survive a lack-of-fit test against the full
    // model; unwind drops until it does.
    result.lack_of_fit_p = likelihood_ratio_test(full, result.fit).p;
    while (result.lack_of_fit_p <= alpha && !result.dropped.empty()) {
        current = current.with(result.dropped.back());
        result.dropped.pop_back();
        result.fit = fit_family(data, current, family);
        result.lack_of_fit_p = likelihood_ratio_test(full, result.fit).p;
    }
    return result;
}

}  // namespace dcomp
