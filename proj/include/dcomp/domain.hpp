#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dcomp/error.hpp"

namespace dcomp {

// ---------------------------------------------------------------------------
// Factor space
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return !(lo <= hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool contains(const Interval& other) const { return other.empty() || (lo <= other.lo && other.hi <= hi); }
};

struct FactorDef {
    enum class Kind { Continuous, Categorical };

    std::string name;
    Kind kind = Kind::Continuous;
    Interval range;                   // continuous
    std::vector<std::string> levels;  // categorical
    bool nuisance = false;

    bool is_continuous() const { return kind == Kind::Continuous; }
    bool has_level(std::string_view level) const;
};

class FactorSpace {
public:
    FactorSpace() = default;
    explicit FactorSpace(std::vector<FactorDef> factors);

    const std::vector<FactorDef>& factors() const { return factors_; }
    const FactorDef* find(std::string_view name) const;
    const FactorDef& at(std::string_view name) const;  // throws ConfigError

private:
    std::vector<FactorDef> factors_;
};

using FactorValue = std::variant<double, std::string>;
using FactorValues = std::map<std::string, FactorValue, std::less<>>;

// ---------------------------------------------------------------------------
// Categories
// ---------------------------------------------------------------------------

// The K named source categories. NO_SOURCE is a distinguished literal, not a
// member: a run either carries one of these categories or no source at all.
class CategorySet {
public:
    static constexpr std::string_view kNoSource = "NO_SOURCE";

    CategorySet() = default;
    explicit CategorySet(std::vector<std::string> names);

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool contains(std::string_view name) const;
    // Valid as a truth/claim value: a member or NO_SOURCE.
    bool valid_label(std::string_view label) const;

    static bool is_no_source(std::string_view label) { return label == kNoSource; }

private:
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Runs, predictions, submissions
// ---------------------------------------------------------------------------

enum class Split { Train, Public, Private };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct RunRecord {
    std::string run_id;
    FactorValues factor_values;
    std::string true_category;  // category name or NO_SOURCE
    std::optional<double> true_location_s;
    Split split = Split::Train;
    std::optional<std::string> replicate_group;

    bool has_source() const { return !CategorySet::is_no_source(true_category); }
};

// Structural checks: non-nuisance coverage, range/level membership, and the
// location-present-iff-source rule.
void validate_run(const RunRecord& run, const FactorSpace& space, const CategorySet& categories);

struct PredictionEntry {
    std::string run_id;
    std::string claimed_category;  // category name or NO_SOURCE
    std::optional<double> claimed_location_s;

    bool claims_source() const { return !CategorySet::is_no_source(claimed_category); }
};

struct Submission {
    std::string team_id;
    std::int64_t timestamp = 0;  // seconds since epoch, UTC
    std::vector<PredictionEntry> entries;
};

// Produced only by validate_submission; scoring refuses anything else.
class ValidatedSubmission {
public:
    const Submission& get() const { return submission_; }

private:
    friend ValidatedSubmission validate_submission(const Submission&, std::span<const std::string>,
                                                   const CategorySet&);
    explicit ValidatedSubmission(Submission s) : submission_(std::move(s)) {}
    Submission submission_;
};

// Accepts a submission iff it has exactly one well-formed entry per test run.
// Throws ValidationError enumerating every violation, each naming its run_id.
ValidatedSubmission validate_submission(const Submission& submission,
                                        std::span<const std::string> test_run_ids,
                                        const CategorySet& categories);

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

enum class OutcomeClass { I, D, X, TN, FP };

std::string_view to_string(OutcomeClass c);

struct OutcomeRecord {
    std::string run_id;
    int det = 0;   // source truly present and some source claimed
    int iden = 0;  // claimed category matches exactly
    std::optional<double> loc_miss_s;
    OutcomeClass outcome_class = OutcomeClass::X;

    bool source_run() const {
        return outcome_class == OutcomeClass::I || outcome_class == OutcomeClass::D ||
               outcome_class == OutcomeClass::X;
    }
};

// Pure classification of one prediction against the answer key.
OutcomeRecord classify_outcome(const RunRecord& answer, const PredictionEntry& prediction);

// One scored prediction with its run context; what the eda and inference
// modules consume. Pointers refer into the caller's key and submission.
struct Evaluation {
    const RunRecord* run = nullptr;
    const PredictionEntry* prediction = nullptr;
    OutcomeRecord outcome;
};

std::vector<Evaluation> evaluate_submission(const ValidatedSubmission& submission,
                                            std::span<const RunRecord> key);

// Run ids of the test portion (PUBLIC and PRIVATE) of a host manifest, in
// manifest order.
std::vector<std::string> test_run_ids(std::span<const RunRecord> key);

}  // namespace dcomp
