#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dcomp/domain.hpp"

namespace dcomp {

// ---------------------------------------------------------------------------
// Priors and the informative band
// ---------------------------------------------------------------------------

// Anticipated capability on one factor: P(success) = inv_logit(beta0 + beta1 x).
struct PriorCurve {
    double beta0 = 0.0;
    double beta1 = 0.0;
};

// Success probabilities at the two-point D-optimal design for a two-parameter
// logistic model.
inline constexpr double kDOptimalLowProb = 0.176;
inline constexpr double kDOptimalHighProb = 0.824;

// The two factor values where the curve attains success probabilities 0.176
// and 0.824, ordered lo < hi. Throws NumericalError for beta1 == 0.
std::pair<double, double> d_optimal_logistic_points(const PriorCurve& prior);

// Sub-interval of factor_range where current capability still fails often
// (P < 0.824) and dream capability already succeeds often (P > 0.176).
// Both curves must have the same slope sign. An empty interval is a valid
// result and is returned with lo > hi.
Interval interesting_band(const PriorCurve& current, const PriorCurve& dream, Interval factor_range);

// ---------------------------------------------------------------------------
// Split configuration
// ---------------------------------------------------------------------------

struct HoleBox {
    std::map<std::string, Interval, std::less<>> box;  // axis-aligned, continuous factors
    std::set<Split> excludes;

    bool contains(const FactorValues& values) const;
};

struct LevelFractions {
    double train = 1.0;
    double public_test = 1.0;
    double private_test = 1.0;
};

struct SplitTargets {
    std::map<std::string, int, std::less<>> per_category;  // source categories only
};

struct SplitConfig {
    // Continuous sub-ranges; factors not listed use the full range.
    std::map<std::string, Interval, std::less<>> train_ranges;
    std::map<std::string, Interval, std::less<>> public_ranges;
    // Categorical level fractions; factors not listed use every level.
    std::map<std::string, LevelFractions, std::less<>> level_fractions;
    std::vector<HoleBox> holes;
    SplitTargets train_targets;
    SplitTargets public_targets;
    SplitTargets private_targets;
    // Fraction of each split's test runs that carry no source.
    double no_source_fraction_train = 0.0;
    double no_source_fraction_public = 0.0;
    double no_source_fraction_private = 0.0;
    // Informative band per continuous factor; in-band = inside every band.
    std::map<std::string, Interval, std::less<>> bands;
    double w_in = 4.0;
    double w_out = 1.0;
    int replicate_count = 1;
    std::uint64_t seed = 0;

    const SplitTargets& targets(Split s) const;
    double no_source_fraction(Split s) const;
};

// Structural checks: subrange nesting, fraction monotonicity, hole tags
// compatible with eligible-region nesting, weight ordering, factor references.
void validate_split_config(const SplitConfig& config, const FactorSpace& space,
                           const CategorySet& categories);

// ---------------------------------------------------------------------------
// Assignment
// ---------------------------------------------------------------------------

enum class Assignment { Train, Public, Private, Discarded };

std::string_view to_string(Assignment a);

struct SplitAssignment {
    std::map<std::string, Assignment, std::less<>> by_run;  // every superset run
    std::map<std::string, std::string, std::less<>> replicate_group;  // assigned runs only
    std::vector<std::string> test_manifest;  // PUBLIC and PRIVATE inter-mixed
    // Allowed level subsets chosen for each fractioned categorical factor,
    // indexed TRAIN / PUBLIC / PRIVATE. Kept for invariant checking.
    std::map<std::string, std::array<std::vector<std::string>, 3>, std::less<>> allowed_levels;
};

// Weighted, seed-deterministic selection of training / public / private runs
// from the candidate superset. Throws InfeasibleDesignError naming the binding
// constraint when targets cannot be met.
SplitAssignment assign_splits(std::span<const RunRecord> superset, const SplitConfig& config,
                              const FactorSpace& space, const CategorySet& categories);

// Uniform permutation of the PUBLIC and PRIVATE run ids. A function of the
// seed and the sorted id set only, never of split labels or categories.
std::vector<std::string> randomize_test_order(const SplitAssignment& assignment,
                                              std::uint64_t seed);

// Superset runs with split labels and replicate groups applied; discarded
// runs dropped. Order: TRAIN first (grouped for competitor convenience), then
// test runs in manifest order.
std::vector<RunRecord> apply_assignment(std::span<const RunRecord> superset,
                                        const SplitAssignment& assignment);

// ---------------------------------------------------------------------------
// Invariant audit
// ---------------------------------------------------------------------------

struct InvariantReport {
    struct Rule {
        std::string name;
        bool pass = true;
        std::vector<std::string> offenders;
        std::string detail;
    };
    std::vector<Rule> rules;

    bool all_pass() const;
    const Rule* find(std::string_view name) const;
};

// Re-checks every assign_splits postcondition against the raw superset.
InvariantReport check_split_invariants(std::span<const RunRecord> superset,
                                       const SplitAssignment& assignment,
                                       const SplitConfig& config, const FactorSpace& space,
                                       const CategorySet& categories);

}  // namespace dcomp
