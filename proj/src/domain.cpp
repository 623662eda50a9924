#include "dcomp/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dcomp/csv.hpp"

namespace dcomp {

bool FactorDef::has_level(std::string_view level) const {
    return std::find(levels.begin(), levels.end(), level) != levels.end();
}

FactorSpace::FactorSpace(std::vector<FactorDef> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.name.empty()) throw ConfigError("factor with empty name");
        if (!seen.insert(f.name).second) throw ConfigError("duplicate factor name '" + f.name + "'");
        if (f.kind == FactorDef::Kind::Continuous) {
            if (!(f.range.lo < f.range.hi))
                throw ConfigError("factor '" + f.name + "': continuous range requires lo < hi");
        } else {
            if (f.levels.empty()) throw ConfigError("factor '" + f.name + "': no levels");
            std::set<std::string> lv(f.levels.begin(), f.levels.end());
            if (lv.size() != f.levels.size())
                throw ConfigError("factor '" + f.name + "': duplicate levels");
        }
    }
}

const FactorDef* FactorSpace::find(std::string_view name) const {
    for (const auto& f : factors_)
        if (f.name == name) return &f;
    return nullptr;
}

const FactorDef& FactorSpace::at(std::string_view name) const {
    const FactorDef* f = find(name);
    if (!f) throw ConfigError("unknown factor '" + std::string(name) + "'");
    return *f;
}

CategorySet::CategorySet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ConfigError("category set requires at least one source category");
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw ConfigError("empty category name");
        if (is_no_source(n)) throw ConfigError("NO_SOURCE is reserved and cannot be a source category");
        if (!seen.insert(n).second) throw ConfigError("duplicate category '" + n + "'");
    }
}

bool CategorySet::contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

bool CategorySet::valid_label(std::string_view label) const {
    return is_no_source(label) || contains(label);
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "TRAIN";
        case Split::Public: return "PUBLIC";
        case Split::Private: return "PRIVATE";
    }
    return "TRAIN";
}

Split split_from_string(std::string_view s) {
    if (s == "TRAIN") return Split::Train;
    if (s == "PUBLIC") return Split::Public;
    if (s == "PRIVATE") return Split::Private;
    throw ValidationError("unknown split label '" + std::string(s) + "'");
}

std::string_view to_string(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::I: return "I";
        case OutcomeClass::D: return "D";
        case OutcomeClass::X: return "X";
        case OutcomeClass::TN: return "TN";
        case OutcomeClass::FP: return "FP";
    }
    return "X";
}

void validate_run(const RunRecord& run, const FactorSpace& space, const CategorySet& categories) {
    std::vector<std::string> issues;
    auto flag = [&](std::string msg) { issues.push_back("run " + run.run_id + ": " + std::move(msg)); };

    if (run.run_id.empty()) issues.push_back("run with empty run_id");
    if (!categories.valid_label(run.true_category))
        flag("unknown category '" + run.true_category + "'");
    if (run.has_source() != run.true_location_s.has_value())
        flag("true_location_s must be present iff a source is present");
    if (run.true_location_s && *run.true_location_s < 0.0) flag("negative true_location_s");

    for (const auto& factor : space.factors()) {
        auto it = run.factor_values.find(factor.name);
        if (it == run.factor_values.end()) {
            if (!factor.nuisance) flag("missing value for factor '" + factor.name + "'");
            continue;
        }
        if (factor.is_continuous()) {
            const double* v = std::get_if<double>(&it->second);
            if (!v)
                flag("factor '" + factor.name + "' expects a number");
            else if (!factor.range.contains(*v))
                flag("factor '" + factor.name + "' value out of range");
        } else {
            const std::string* v = std::get_if<std::string>(&it->second);
            if (!v)
                flag("factor '" + factor.name + "' expects a level");
            else if (!factor.has_level(*v))
                flag("factor '" + factor.name + "' unknown level '" + *v + "'");
        }
    }
    for (const auto& [name, value] : run.factor_values) {
        (void)value;
        if (!space.find(name)) flag("value for undeclared factor '" + name + "'");
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
}

OutcomeRecord classify_outcome(const RunRecord& answer, const PredictionEntry& prediction) {
    if (answer.run_id != prediction.run_id)
        throw ValidationError("classify_outcome: prediction for run " + prediction.run_id +
                              " checked against answer for run " + answer.run_id);
    if (prediction.claims_source() && !prediction.claimed_location_s)
        throw ValidationError("run " + prediction.run_id +
                              ": claimed a source without a claimed location");

    OutcomeRecord out;
    out.run_id = answer.run_id;

    if (!answer.has_source()) {
        out.outcome_class =
            prediction.claims_source() ? OutcomeClass::FP : OutcomeClass::TN;
        return out;
    }

    out.det = prediction.claims_source() ? 1 : 0;
    out.iden = (out.det == 1 && prediction.claimed_category == answer.true_category) ? 1 : 0;
    if (answer.true_location_s && prediction.claimed_location_s)
        out.loc_miss_s = std::abs(*prediction.claimed_location_s - *answer.true_location_s);

    if (out.det == 0)
        out.outcome_class = OutcomeClass::X;
    else
        out.outcome_class = out.iden ? OutcomeClass::I : OutcomeClass::D;
    return out;
}

ValidatedSubmission validate_submission(const Submission& submission,
                                        std::span<const std::string> test_run_ids,
                                        const CategorySet& categories) {
    std::vector<std::string> issues;
    std::unordered_set<std::string_view> manifest(test_run_ids.begin(), test_run_ids.end());
    std::unordered_set<std::string_view> seen;

    for (const auto& entry : submission.entries) {
        if (!manifest.count(entry.run_id)) {
            issues.push_back("unknown run_id '" + entry.run_id + "'");
            continue;
        }
        if (!seen.insert(entry.run_id).second) {
            issues.push_back("duplicate entry for run " + entry.run_id);
            continue;
        }
        if (!categories.valid_label(entry.claimed_category))
            issues.push_back("run " + entry.run_id + ": unknown category '" +
                             entry.claimed_category + "'");
        if (entry.claims_source() != entry.claimed_location_s.has_value())
            issues.push_back("run " + entry.run_id +
                             ": claimed location must be present iff a source is claimed");
        else if (entry.claimed_location_s && *entry.claimed_location_s < 0.0)
            issues.push_back("run " + entry.run_id + ": negative claimed location");
    }
    for (const auto& id : test_run_ids)
        if (!seen.count(id)) issues.push_back("missing entry for run " + id);

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return ValidatedSubmission(submission);
}

std::vector<Evaluation> evaluate_submission(const ValidatedSubmission& submission,
                                            std::span<const RunRecord> key) {
    std::unordered_map<std::string_view, const PredictionEntry*> by_run;
    for (const auto& entry : submission.get().entries) by_run.emplace(entry.run_id, &entry);

    std::vector<Evaluation> evaluations;
    evaluations.reserve(key.size());
    for (const auto& run : key) {
        if (run.split == Split::Train) continue;
        auto it = by_run.find(run.run_id);
        if (it == by_run.end())
            throw ValidationError("validated submission lacks entry for test run " + run.run_id);
        evaluations.push_back({&run, it->second, classify_outcome(run, *it->second)});
    }
    return evaluations;
}

std::vector<std::string> test_run_ids(std::span<const RunRecord> key) {
    std::vector<std::string> ids;
    for (const auto& run : key)
        if (run.split != Split::Train) ids.push_back(run.run_id);
    return ids;
}

}  // namespace dcomp
