#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "dcomp/domain.hpp"

namespace dcomp {

// ---------------------------------------------------------------------------
// Model terms
// ---------------------------------------------------------------------------

struct Term {
    enum class Kind { Intercept, Main, Quadratic, Interaction };

    Kind kind = Kind::Intercept;
    std::string f1;
    std::string f2;  // interaction only

    bool higher_order() const { return kind == Kind::Quadratic || kind == Kind::Interaction; }
    bool involves(std::string_view factor) const { return f1 == factor || f2 == factor; }
    std::string label() const;

    friend bool operator==(const Term& a, const Term& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == Kind::Interaction)
            return (a.f1 == b.f1 && a.f2 == b.f2) || (a.f1 == b.f2 && a.f2 == b.f1);
        return a.f1 == b.f1;
    }
};

inline Term intercept_term() { return {Term::Kind::Intercept, "", ""}; }
inline Term main_term(std::string factor) { return {Term::Kind::Main, std::move(factor), ""}; }
inline Term quadratic_term(std::string factor) {
    return {Term::Kind::Quadratic, std::move(factor), ""};
}
inline Term interaction_term(std::string a, std::string b) {
    return {Term::Kind::Interaction, std::move(a), std::move(b)};
}

// Ordered term list; the intercept is always present and first. Categorical
// factors expand to indicator columns with the first declared level as the
// reference.
class TermSpec {
public:
    TermSpec() { terms_.push_back(intercept_term()); }
    explicit TermSpec(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    bool has(const Term& term) const;
    TermSpec without(const Term& term) const;
    TermSpec with(const Term& term) const;
    // True when every term of this spec appears in other.
    bool nested_in(const TermSpec& other) const;
    std::vector<Term> higher_order_terms() const;

    // Intercept plus a main effect per factor.
    static TermSpec mains(std::span<const std::string> factors);
    // Selection pool: mains, quadratics of the continuous factors, and all
    // two-factor interactions.
    static TermSpec full_pool(const FactorSpace& space, std::span<const std::string> factors);

private:
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

// Rows of factor values with one response column.
struct Dataset {
    FactorSpace space;
    std::vector<FactorValues> rows;
    std::vector<double> response;

    std::size_t n() const { return rows.size(); }
    void add(FactorValues values, double y);
};

// Design-matrix expansion shared by fitting and prediction.
struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<std::string> column_names;
};

DesignMatrix expand_design(const FactorSpace& space, std::span<const FactorValues> rows,
                           const TermSpec& terms);
Eigen::RowVectorXd expand_row(const FactorSpace& space, const FactorValues& values,
                              const TermSpec& terms);

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

enum class Family { BinomialLogit, GaussianIdentity };

struct ConvergenceRecord {
    int iterations = 0;
    double final_deviance_change = 0.0;
    std::vector<double> deviance_trace;
};

struct GlmFit {
    TermSpec terms;
    Family family = Family::BinomialLogit;
    FactorSpace space;
    std::vector<std::string> column_names;
    Eigen::VectorXd beta;
    Eigen::MatrixXd covariance;
    double deviance = 0.0;
    std::size_t n = 0;
    double sigma2 = 0.0;  // gaussian residual variance
    ConvergenceRecord convergence;

    std::size_t k() const { return static_cast<std::size_t>(beta.size()); }
};

// Binomial-logit maximum likelihood by iteratively reweighted least squares
// with step-halving. Converges when the deviance change drops below 1e-8 and
// the score equations are satisfied to 1e-6.
GlmFit fit_logistic(const Dataset& data, const TermSpec& terms);

// Gaussian-identity ordinary least squares.
GlmFit fit_linear(const Dataset& data, const TermSpec& terms);

struct LrtResult {
    double statistic = 0.0;
    int df = 0;
    double p = 1.0;
};

// Lack-of-fit comparison of a reduced model against the fuller one it nests in.
LrtResult likelihood_ratio_test(const GlmFit& full, const GlmFit& reduced);

struct SelectionResult {
    GlmFit fit;
    double lack_of_fit_p = 1.0;
    std::vector<Term> dropped;  // in drop order
};

// Backward elimination over the pool's higher-order terms. Main effects and
// the intercept are never dropped. The returned model passes a lack-of-fit
// test against the full pool at level alpha (dropping is unwound as needed).
SelectionResult select_model(const Dataset& data, const TermSpec& pool, double alpha,
                             Family family = Family::BinomialLogit);

}  // namespace dcomp
