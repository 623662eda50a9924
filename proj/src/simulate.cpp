#include "dcomp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dcomp/rng.hpp"
#include "dcomp/stats.hpp"

namespace dcomp {

namespace {
constexpr double kLocationLo = 5.0;
constexpr double kLocationHi = 55.0;
constexpr double kFalsePositiveLocationHi = 60.0;
}  // namespace

double TruthModel::eta(const FactorSpace& space, const FactorValues& values) const {
    Eigen::RowVectorXd x = expand_row(space, values, terms);
    if (static_cast<std::size_t>(x.size()) != beta.size())
        throw ConfigError("truth model: coefficient count " + std::to_string(beta.size()) +
                          " does not match " + std::to_string(x.size()) + " design columns");
    double out = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) out += x[i] * beta[static_cast<std::size_t>(i)];
    return out;
}

void validate_truth(const SyntheticTruth& truth, const FactorSpace& space,
                    const CategorySet& categories) {
    if (truth.teams.empty()) throw ConfigError("truth: no teams");
    {
        std::vector<std::string> ids;
        for (const auto& t : truth.teams) ids.push_back(t.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw ConfigError("truth: duplicate team id");
    }
    for (const auto& name : categories.names())
        if (!truth.per_category.count(name))
            throw ConfigError("truth: no model for category '" + name + "'");
    for (const auto& [name, model] : truth.per_category) {
        (void)model;
        if (!categories.contains(name))
            throw ConfigError("truth: model for unknown category '" + name + "'");
    }
    for (const auto& [truth_cat, row] : truth.confusion_bias) {
        if (!categories.contains(truth_cat))
            throw ConfigError("truth: confusion bias for unknown category '" + truth_cat + "'");
        for (const auto& [claimed, weight] : row) {
            if (!categories.contains(claimed) || claimed == truth_cat)
                throw ConfigError("truth: bad confusion bias target '" + claimed + "'");
            if (!(weight >= 0.0)) throw ConfigError("truth: negative confusion weight");
        }
    }
    // Touch every model once at the range midpoint to surface sizing mistakes
    // before a long simulation.
    FactorValues probe;
    for (const auto& f : space.factors()) {
        if (f.is_continuous())
            probe[f.name] = 0.5 * (f.range.lo + f.range.hi);
        else
            probe[f.name] = f.levels.front();
    }
    for (const auto& [name, model] : truth.per_category) {
        (void)name;
        model.detect.eta(space, probe);
        model.identify.eta(space, probe);
    }
    truth.no_source_correct.eta(space, probe);
    truth.log_loc_scale.eta(space, probe);
}

double detect_probability(const SyntheticTruth& truth, const FactorSpace& space,
                          const std::string& category, const FactorValues& values,
                          double team_offset) {
    return inv_logit(truth.per_category.at(category).detect.eta(space, values) + team_offset);
}

double identify_probability(const SyntheticTruth& truth, const FactorSpace& space,
                            const std::string& category, const FactorValues& values,
                            double team_offset) {
    return inv_logit(truth.per_category.at(category).identify.eta(space, values) + team_offset);
}

double no_source_correct_probability(const SyntheticTruth& truth, const FactorSpace& space,
                                     const FactorValues& values, double team_offset) {
    return inv_logit(truth.no_source_correct.eta(space, values) + team_offset);
}

namespace {

FactorValues draw_values(Rng& rng, const FactorSpace& space, bool nuisance_only,
                         const FactorValues& base = {}) {
    FactorValues values = base;
    for (const auto& f : space.factors()) {
        if (nuisance_only && !f.nuisance) continue;
        if (f.is_continuous())
            values[f.name] = rng.uniform(f.range.lo, f.range.hi);
        else
            values[f.name] = f.levels[rng.below(f.levels.size())];
    }
    return values;
}

long long total_target(const SplitConfig& split, const std::string& category) {
    long long total = 0;
    for (Split s : {Split::Train, Split::Public, Split::Private}) {
        const auto& per_cat = split.targets(s).per_category;
        auto it = per_cat.find(category);
        if (it != per_cat.end()) total += it->second;
    }
    return total;
}

long long total_no_source_target(const SplitConfig& split) {
    long long total = 0;
    for (Split s : {Split::Train, Split::Public, Split::Private}) {
        double frac = split.no_source_fraction(s);
        if (frac <= 0.0) continue;
        long long sources = 0;
        for (const auto& [cat, n] : split.targets(s).per_category) {
            (void)cat;
            sources += n;
        }
        total += static_cast<long long>(
            std::llround(frac * static_cast<double>(sources) / (1.0 - frac)));
    }
    return total;
}

}  // namespace

std::vector<RunRecord> generate_superset(const SyntheticTruth& truth, const FactorSpace& space,
                                         const CategorySet& categories, const SplitConfig& split,
                                         std::uint64_t seed, double superset_multiplier) {
    validate_truth(truth, space, categories);
    if (!(superset_multiplier >= 1.0))
        throw ConfigError("superset multiplier must be at least 1");

    Rng rng(derive_stream(seed, "sim/superset"));
    std::vector<RunRecord> runs;
    long long next_id = 0;
    const int r = split.replicate_count;

    std::vector<std::string> labels = categories.names();
    labels.emplace_back(CategorySet::kNoSource);
    for (const auto& category : labels) {
        bool no_source = CategorySet::is_no_source(category);
        long long want_runs = no_source ? total_no_source_target(split)
                                        : total_target(split, category);
        if (want_runs == 0) continue;
        auto scenarios = static_cast<long long>(
            std::ceil(superset_multiplier * static_cast<double>(want_runs) / r));
        for (long long s = 0; s < scenarios; ++s) {
            FactorValues shared = draw_values(rng, space, false);
            for (int rep = 0; rep < r; ++rep) {
                RunRecord run;
                char buf[32];
                std::snprintf(buf, sizeof(buf), "run-%08lld", next_id++);
                run.run_id = buf;
                run.factor_values = draw_values(rng, space, true, shared);
                run.true_category = category;
                if (!no_source) run.true_location_s = rng.uniform(kLocationLo, kLocationHi);
                runs.push_back(std::move(run));
            }
        }
    }
    return runs;
}

Submission simulate_team_submission(const SyntheticTruth& truth, const SyntheticTruth::Team& team,
                                    const FactorSpace& space, const CategorySet& categories,
                                    std::span<const RunRecord> key,
                                    std::span<const std::string> test_order, std::uint64_t seed) {
    std::unordered_map<std::string_view, const RunRecord*> by_id;
    for (const auto& run : key) by_id.emplace(run.run_id, &run);

    Rng rng(derive_stream(seed, "sim/team/" + team.id));
    Submission sub;
    sub.team_id = team.id;

    for (const auto& run_id : test_order) {
        auto it = by_id.find(run_id);
        if (it == by_id.end())
            throw ValidationError("test manifest names unknown run " + run_id);
        const RunRecord& run = *it->second;

        PredictionEntry entry;
        entry.run_id = run.run_id;

        if (!run.has_source()) {
            double p = no_source_correct_probability(truth, space, run.factor_values, team.offset);
            if (rng.bernoulli(p)) {
                entry.claimed_category = std::string(CategorySet::kNoSource);
            } else {
                entry.claimed_category = categories.names()[rng.below(categories.size())];
                entry.claimed_location_s = rng.uniform(0.0, kFalsePositiveLocationHi);
            }
            sub.entries.push_back(std::move(entry));
            continue;
        }

        double p_det = detect_probability(truth, space, run.true_category, run.factor_values,
                                          team.offset);
        if (!rng.bernoulli(p_det)) {
            entry.claimed_category = std::string(CategorySet::kNoSource);
            sub.entries.push_back(std::move(entry));
            continue;
        }

        double p_iden = identify_probability(truth, space, run.true_category, run.factor_values,
                                             team.offset);
        if (rng.bernoulli(p_iden)) {
            entry.claimed_category = run.true_category;
        } else {
            // Wrong category, weighted by the configured confusion structure.
            std::vector<const std::string*> wrong;
            std::vector<double> weights;
            const auto bias = truth.confusion_bias.find(run.true_category);
            for (const auto& name : categories.names()) {
                if (name == run.true_category) continue;
                wrong.push_back(&name);
                double w = 1.0;
                if (bias != truth.confusion_bias.end()) {
                    auto wit = bias->second.find(name);
                    if (wit != bias->second.end()) w = wit->second;
                }
                weights.push_back(w);
            }
            double total = 0.0;
            for (double w : weights) total += w;
            entry.claimed_category = *wrong[rng.weighted_pick(weights, total)];
        }

        double scale = std::exp(truth.log_loc_scale.eta(space, run.factor_values));
        double miss = rng.half_normal(scale);
        double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        entry.claimed_location_s = std::max(0.0, *run.true_location_s + sign * miss);
        sub.entries.push_back(std::move(entry));
    }
    return sub;
}

SimulationResult simulate_competition(const SyntheticTruth& truth, const FactorSpace& space,
                                      const CategorySet& categories, const SplitConfig& split,
                                      std::uint64_t seed, double superset_multiplier) {
    SimulationResult result;
    result.superset = generate_superset(truth, space, categories, split, seed,
                                        superset_multiplier);

    SplitConfig seeded = split;
    seeded.seed = derive_stream(seed, "sim/design");
    result.assignment = assign_splits(result.superset, seeded, space, categories);
    result.host_manifest = apply_assignment(result.superset, result.assignment);

    for (const auto& team : truth.teams)
        result.submissions.push_back(simulate_team_submission(
            truth, team, space, categories, result.host_manifest,
            result.assignment.test_manifest, seed));
    return result;
}

}  // namespace dcomp
