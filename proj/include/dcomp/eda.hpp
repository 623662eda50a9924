#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcomp/domain.hpp"

namespace dcomp {

// Contingency table with true labels on rows and predicted labels on columns.
// Proportions are row-conditional; a row with no observations reports absent
// proportions rather than zeros.
struct ConfusionMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<long long>> counts;
    std::vector<std::vector<std::optional<double>>> proportions;
    long long total = 0;

    long long row_total(std::size_t r) const;
    bool row_has_data(std::size_t r) const { return row_total(r) > 0; }
};

// 2x2 source-present vs source-claimed summary.
ConfusionMatrix detection_confusion(std::span<const Evaluation> outcomes);

// K true source categories by K+1 claims (every category plus NO_SOURCE).
ConfusionMatrix identification_confusion(std::span<const Evaluation> outcomes,
                                         const CategorySet& categories);

// Agreement of two teams' per-run outcome classes over the shared source runs.
struct AgreementTable {
    static constexpr OutcomeClass kClasses[3] = {OutcomeClass::I, OutcomeClass::D,
                                                 OutcomeClass::X};
    long long counts[3][3] = {};
    long long total = 0;
    double fractions[3][3] = {};

    long long row_total(int r) const;
    long long col_total(int c) const;
    long long off_diagonal_total() const;
};

AgreementTable team_agreement(std::span<const Evaluation> outcomes_a,
                              std::span<const Evaluation> outcomes_b);

// Per-source, per-team outcome class shares; teams ordered by their overall
// fraction of fully correct answers, descending.
struct SourceOutcomeRow {
    std::string team_id;
    std::string category;
    long long n = 0;
    double prop_i = 0.0;
    double prop_d = 0.0;
    double prop_x = 0.0;
};

std::vector<SourceOutcomeRow> outcome_by_source(
    const std::map<std::string, std::vector<Evaluation>>& outcomes_by_team);

// Row filter for scatter exports.
struct ScatterFilter {
    std::optional<std::string> category;
    std::optional<Split> split;
    std::map<std::string, std::string, std::less<>> level_equals;
    std::map<std::string, Interval, std::less<>> ranges;

    bool matches(const RunRecord& run) const;
};

struct ScatterRecord {
    std::string run_id;
    double x = 0.0;
    double y = 0.0;
    std::string outcome;  // class, or "class_a/class_b" for the two-team variant
};

std::vector<ScatterRecord> export_scatter(std::span<const Evaluation> outcomes,
                                          const FactorSpace& space, const std::string& x_factor,
                                          const std::string& y_factor,
                                          const ScatterFilter& filter);

// Two-team variant: each record carries the pair of outcome classes.
std::vector<ScatterRecord> export_scatter_pair(std::span<const Evaluation> outcomes_a,
                                               std::span<const Evaluation> outcomes_b,
                                               const FactorSpace& space,
                                               const std::string& x_factor,
                                               const std::string& y_factor,
                                               const ScatterFilter& filter);

}  // namespace dcomp
