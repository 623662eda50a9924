#include "dcomp/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "dcomp/csv.hpp"
#include "dcomp/rng.hpp"
#include "dcomp/stats.hpp"

namespace dcomp {

std::pair<double, double> d_optimal_logistic_points(const PriorCurve& prior) {
    if (prior.beta1 == 0.0)
        throw NumericalError("d_optimal_logistic_points: degenerate prior (beta1 = 0)");
    double a = (logit(kDOptimalLowProb) - prior.beta0) / prior.beta1;
    double b = (logit(kDOptimalHighProb) - prior.beta0) / prior.beta1;
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

Interval interesting_band(const PriorCurve& current, const PriorCurve& dream,
                          Interval factor_range) {
    if (current.beta1 == 0.0 || dream.beta1 == 0.0)
        throw NumericalError("interesting_band: degenerate prior (beta1 = 0)");
    if ((current.beta1 > 0.0) != (dream.beta1 > 0.0))
        throw NumericalError("interesting_band: priors must share a slope sign");

    // Still challenging for today's best: P_current < 0.824.
    double cur_hi = (logit(kDOptimalHighProb) - current.beta0) / current.beta1;
    // Within reach of the dream capability: P_dream > 0.176.
    double dream_lo = (logit(kDOptimalLowProb) - dream.beta0) / dream.beta1;

    Interval band;
    if (current.beta1 > 0.0) {
        band.lo = dream_lo;
        band.hi = cur_hi;
    } else {
        band.lo = cur_hi;
        band.hi = dream_lo;
    }
    band.lo = std::max(band.lo, factor_range.lo);
    band.hi = std::min(band.hi, factor_range.hi);
    if (band.empty()) return Interval{1.0, 0.0};
    return band;
}

bool HoleBox::contains(const FactorValues& values) const {
    for (const auto& [factor, interval] : box) {
        auto it = values.find(factor);
        if (it == values.end()) return false;
        const double* v = std::get_if<double>(&it->second);
        if (!v || !interval.contains(*v)) return false;
    }
    return !box.empty();
}

const SplitTargets& SplitConfig::targets(Split s) const {
    switch (s) {
        case Split::Train: return train_targets;
        case Split::Public: return public_targets;
        case Split::Private: return private_targets;
    }
    return train_targets;
}

double SplitConfig::no_source_fraction(Split s) const {
    switch (s) {
        case Split::Train: return no_source_fraction_train;
        case Split::Public: return no_source_fraction_public;
        case Split::Private: return no_source_fraction_private;
    }
    return 0.0;
}

std::string_view to_string(Assignment a) {
    switch (a) {
        case Assignment::Train: return "TRAIN";
        case Assignment::Public: return "PUBLIC";
        case Assignment::Private: return "PRIVATE";
        case Assignment::Discarded: return "DISCARDED";
    }
    return "DISCARDED";
}

namespace {

constexpr Split kSplits[3] = {Split::Train, Split::Public, Split::Private};

Interval full_range(const FactorDef& f) { return f.range; }

Interval split_range(const SplitConfig& config, const FactorDef& f, Split s) {
    const std::map<std::string, Interval, std::less<>>* ranges = nullptr;
    if (s == Split::Train) ranges = &config.train_ranges;
    if (s == Split::Public) ranges = &config.public_ranges;
    if (ranges) {
        auto it = ranges->find(f.name);
        if (it != ranges->end()) return it->second;
    }
    return full_range(f);
}

int level_count(double fraction, std::size_t n_levels) {
    auto n = static_cast<int>(std::lround(fraction * static_cast<double>(n_levels)));
    return std::clamp(n, 1, static_cast<int>(n_levels));
}

}  // namespace

void validate_split_config(const SplitConfig& config, const FactorSpace& space,
                           const CategorySet& categories) {
    auto require_design_factor = [&](const std::string& name, FactorDef::Kind kind,
                                     std::string_view where) {
        const FactorDef& f = space.at(name);
        if (f.kind != kind)
            throw ConfigError("split config: factor '" + name + "' has the wrong kind for " +
                              std::string(where));
        if (f.nuisance)
            throw ConfigError("split config: nuisance factor '" + name + "' cannot appear in " +
                              std::string(where));
    };

    for (const auto& [name, r] : config.train_ranges) {
        require_design_factor(name, FactorDef::Kind::Continuous, "train_ranges");
        const FactorDef& f = space.at(name);
        Interval pub = split_range(config, f, Split::Public);
        if (!pub.contains(r))
            throw ConfigError("split config: TRAIN range for '" + name +
                              "' not contained in PUBLIC range");
        if (!f.range.contains(r))
            throw ConfigError("split config: TRAIN range for '" + name + "' exceeds factor range");
    }
    for (const auto& [name, r] : config.public_ranges) {
        require_design_factor(name, FactorDef::Kind::Continuous, "public_ranges");
        if (!space.at(name).range.contains(r))
            throw ConfigError("split config: PUBLIC range for '" + name + "' exceeds factor range");
    }
    for (const auto& [name, fr] : config.level_fractions) {
        require_design_factor(name, FactorDef::Kind::Categorical, "level_fractions");
        for (double v : {fr.train, fr.public_test, fr.private_test})
            if (!(v > 0.0 && v <= 1.0))
                throw ConfigError("split config: level fraction for '" + name +
                                  "' outside (0, 1]");
        if (fr.train > fr.public_test || fr.public_test > fr.private_test)
            throw ConfigError("split config: level fractions for '" + name +
                              "' must be nondecreasing TRAIN -> PUBLIC -> PRIVATE");
    }
    for (const auto& hole : config.holes) {
        if (hole.box.empty()) throw ConfigError("split config: hole with empty box");
        if (hole.excludes.empty()) throw ConfigError("split config: hole excluding no split");
        for (const auto& [name, iv] : hole.box) {
            require_design_factor(name, FactorDef::Kind::Continuous, "holes");
            if (iv.empty()) throw ConfigError("split config: hole interval for '" + name + "' empty");
        }
        // Eligible regions must stay nested: a hole cut from an outer set must
        // also be cut from every inner set.
        if (hole.excludes.count(Split::Public) && !hole.excludes.count(Split::Train))
            throw ConfigError("split config: hole excludes PUBLIC but not TRAIN");
        if (hole.excludes.count(Split::Private) &&
            (!hole.excludes.count(Split::Public) || !hole.excludes.count(Split::Train)))
            throw ConfigError("split config: hole excludes PRIVATE but not the inner splits");
    }
    for (Split s : kSplits) {
        for (const auto& [category, count] : config.targets(s).per_category) {
            if (!categories.contains(category))
                throw ConfigError("split config: target for unknown category '" + category + "'" +
                                  (CategorySet::is_no_source(category)
                                       ? " (no-source counts come from no_source_fraction)"
                                       : ""));
            if (count < 0) throw ConfigError("split config: negative target count");
            if (config.replicate_count > 0 && count % config.replicate_count != 0)
                throw ConfigError("split config: target for '" + category + "' in " +
                                  std::string(to_string(s)) + " not a multiple of replicate_count");
        }
        double frac = config.no_source_fraction(s);
        if (!(frac >= 0.0 && frac < 1.0))
            throw ConfigError("split config: no_source_fraction outside [0, 1)");
    }
    for (const auto& [name, band] : config.bands) {
        require_design_factor(name, FactorDef::Kind::Continuous, "bands");
        (void)band;  // an empty band is allowed: nothing is in-band
    }
    if (!(config.w_in >= config.w_out && config.w_out > 0.0))
        throw ConfigError("split config: require w_in >= w_out > 0");
    if (config.replicate_count < 1) throw ConfigError("split config: replicate_count < 1");
}

namespace {

// A scenario is replicate_count runs sharing category and non-nuisance factor
// values; replicates differ only in nuisance values. Selection operates on
// whole scenarios so every retained design point carries its replicates.
struct Scenario {
    std::string category;
    std::vector<const RunRecord*> runs;  // sorted by run_id, size == replicate_count
    FactorValues shared;                 // non-nuisance values
    std::string group_id;                // lexicographically first run_id
};

std::string scenario_key(const RunRecord& run, const FactorSpace& space) {
    std::string key = run.true_category;
    for (const auto& f : space.factors()) {
        if (f.nuisance) continue;
        key += '|';
        key += f.name;
        key += '=';
        auto it = run.factor_values.find(f.name);
        if (it == run.factor_values.end()) continue;
        if (const double* v = std::get_if<double>(&it->second))
            key += format_double(*v);
        else
            key += std::get<std::string>(it->second);
    }
    return key;
}

struct Eligibility {
    const SplitConfig* config;
    const FactorSpace* space;
    // Allowed level subset per fractioned categorical factor, per split index.
    std::map<std::string, std::array<std::vector<std::string>, 3>, std::less<>> allowed_levels;

    static std::size_t index(Split s) { return static_cast<std::size_t>(s); }

    bool level_allowed(const std::string& factor, const std::string& level, Split s) const {
        auto it = allowed_levels.find(factor);
        if (it == allowed_levels.end()) return true;
        const auto& set = it->second[index(s)];
        return std::find(set.begin(), set.end(), level) != set.end();
    }

    bool run_eligible(const RunRecord& run, Split s) const {
        for (const auto& f : space->factors()) {
            if (f.nuisance) continue;
            auto it = run.factor_values.find(f.name);
            if (it == run.factor_values.end()) return false;
            if (f.is_continuous()) {
                if (!split_range(*config, f, s).contains(std::get<double>(it->second)))
                    return false;
            } else if (!level_allowed(f.name, std::get<std::string>(it->second), s)) {
                return false;
            }
        }
        for (const auto& hole : config->holes)
            if (hole.excludes.count(s) && hole.contains(run.factor_values)) return false;
        return true;
    }

    bool scenario_eligible(const Scenario& sc, Split s) const {
        return std::all_of(sc.runs.begin(), sc.runs.end(),
                           [&](const RunRecord* r) { return run_eligible(*r, s); });
    }
};

bool scenario_in_band(const Scenario& sc, const SplitConfig& config) {
    if (config.bands.empty()) return false;
    for (const auto& [factor, band] : config.bands) {
        auto it = sc.shared.find(factor);
        if (it == sc.shared.end()) return false;
        const double* v = std::get_if<double>(&it->second);
        if (!v || !band.contains(*v)) return false;
    }
    return true;
}

// Sequential weighted draws without replacement; O(n) per draw is fine at the
// superset sizes this toolkit targets.
std::vector<std::size_t> weighted_sample(Rng& rng, std::vector<double> weights, std::size_t k) {
    std::vector<std::size_t> index(weights.size());
    std::iota(index.begin(), index.end(), 0);
    std::vector<std::size_t> picked;
    picked.reserve(k);
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t draw = 0; draw < k; ++draw) {
        std::size_t at = rng.weighted_pick(weights, total);
        picked.push_back(index[at]);
        total -= weights[at];
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(at));
        index.erase(index.begin() + static_cast<std::ptrdiff_t>(at));
    }
    return picked;
}

int derived_no_source_target(const SplitConfig& config, Split s) {
    double frac = config.no_source_fraction(s);
    if (frac <= 0.0) return 0;
    long long sources = 0;
    for (const auto& [cat, n] : config.targets(s).per_category) {
        (void)cat;
        sources += n;
    }
    double raw = frac * static_cast<double>(sources) / (1.0 - frac);
    int r = config.replicate_count;
    auto scenarios = static_cast<long long>(std::llround(raw / r));
    return static_cast<int>(scenarios) * r;
}

}  // namespace

SplitAssignment assign_splits(std::span<const RunRecord> superset, const SplitConfig& config,
                              const FactorSpace& space, const CategorySet& categories) {
    validate_split_config(config, space, categories);
    {
        std::vector<std::string> issues;
        std::unordered_set<std::string_view> ids;
        for (const auto& run : superset) {
            try {
                validate_run(run, space, categories);
            } catch (const ValidationError& e) {
                issues.insert(issues.end(), e.issues().begin(), e.issues().end());
            }
            if (!ids.insert(run.run_id).second)
                issues.push_back("duplicate run_id '" + run.run_id + "' in superset");
        }
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    // Group into scenarios of replicate_count runs each.
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& run : superset) groups[scenario_key(run, space)].push_back(&run);

    const int r = config.replicate_count;
    std::vector<Scenario> scenarios;
    for (auto& [key, runs] : groups) {
        (void)key;
        std::sort(runs.begin(), runs.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->run_id < b->run_id; });
        for (std::size_t at = 0; at + static_cast<std::size_t>(r) <= runs.size();
             at += static_cast<std::size_t>(r)) {
            Scenario sc;
            sc.category = runs[at]->true_category;
            sc.runs.assign(runs.begin() + static_cast<std::ptrdiff_t>(at),
                           runs.begin() + static_cast<std::ptrdiff_t>(at + r));
            for (const auto& f : space.factors()) {
                if (f.nuisance) continue;
                auto it = runs[at]->factor_values.find(f.name);
                if (it != runs[at]->factor_values.end()) sc.shared.emplace(f.name, it->second);
            }
            sc.group_id = sc.runs.front()->run_id;
            scenarios.push_back(std::move(sc));
        }
    }
    std::sort(scenarios.begin(), scenarios.end(),
              [](const Scenario& a, const Scenario& b) { return a.group_id < b.group_id; });

    // Choose the allowed level subset per fractioned categorical factor with a
    // seeded shuffle; prefix subsets keep TRAIN within PUBLIC within PRIVATE.
    Eligibility elig{&config, &space, {}};
    for (const auto& [factor, fractions] : config.level_fractions) {
        std::vector<std::string> order = space.at(factor).levels;
        Rng rng(derive_stream(config.seed, "design/levels/" + factor));
        rng.shuffle(order);
        std::array<std::vector<std::string>, 3> sets;
        const double fr[3] = {fractions.train, fractions.public_test, fractions.private_test};
        for (int i = 0; i < 3; ++i) {
            int n = level_count(fr[i], order.size());
            sets[i].assign(order.begin(), order.begin() + n);
            std::sort(sets[i].begin(), sets[i].end());
        }
        elig.allowed_levels.emplace(factor, std::move(sets));
    }

    SplitAssignment out;
    out.allowed_levels = elig.allowed_levels;
    for (const auto& run : superset) out.by_run.emplace(run.run_id, Assignment::Discarded);

    std::vector<bool> taken(scenarios.size(), false);

    std::vector<std::string> labels = categories.names();
    labels.emplace_back(CategorySet::kNoSource);

    for (Split s : kSplits) {
        for (const auto& category : labels) {
            int target_runs;
            if (CategorySet::is_no_source(category)) {
                target_runs = derived_no_source_target(config, s);
            } else {
                const auto& per_cat = config.targets(s).per_category;
                auto it = per_cat.find(category);
                target_runs = it == per_cat.end() ? 0 : it->second;
            }
            if (target_runs == 0) continue;
            const std::size_t want = static_cast<std::size_t>(target_runs / r);

            std::vector<std::size_t> pool;
            std::vector<double> weights;
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                if (taken[i] || scenarios[i].category != category) continue;
                if (!elig.scenario_eligible(scenarios[i], s)) continue;
                pool.push_back(i);
                weights.push_back(scenario_in_band(scenarios[i], config) ? config.w_in
                                                                         : config.w_out);
            }
            if (pool.size() < want)
                throw InfeasibleDesignError(
                    "infeasible design: split " + std::string(to_string(s)) + ", category " +
                    category + ": need " + std::to_string(want) + " scenarios (" +
                    std::to_string(target_runs) + " runs) but only " +
                    std::to_string(pool.size()) + " eligible");

            Rng rng(derive_stream(config.seed, "design/select/" + std::string(to_string(s)) +
                                                   "/" + category));
            Assignment a = s == Split::Train    ? Assignment::Train
                           : s == Split::Public ? Assignment::Public
                                                : Assignment::Private;
            for (std::size_t at : weighted_sample(rng, weights, want)) {
                std::size_t idx = pool[at];
                taken[idx] = true;
                for (const RunRecord* run : scenarios[idx].runs) {
                    out.by_run[run->run_id] = a;
                    out.replicate_group[run->run_id] = scenarios[idx].group_id;
                }
            }
        }
    }

    out.test_manifest = randomize_test_order(out, derive_stream(config.seed, "design/test-order"));
    return out;
}

std::vector<std::string> randomize_test_order(const SplitAssignment& assignment,
                                              std::uint64_t seed) {
    std::vector<std::string> ids;
    for (const auto& [run_id, a] : assignment.by_run)
        if (a == Assignment::Public || a == Assignment::Private) ids.push_back(run_id);
    std::sort(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(ids);
    return ids;
}

std::vector<RunRecord> apply_assignment(std::span<const RunRecord> superset,
                                        const SplitAssignment& assignment) {
    std::unordered_map<std::string_view, const RunRecord*> by_id;
    for (const auto& run : superset) by_id.emplace(run.run_id, &run);

    auto labelled = [&](const std::string& run_id, Split s) {
        RunRecord rec = *by_id.at(run_id);
        rec.split = s;
        auto it = assignment.replicate_group.find(run_id);
        rec.replicate_group =
            it == assignment.replicate_group.end() ? std::nullopt : std::optional(it->second);
        return rec;
    };

    std::vector<RunRecord> out;
    std::vector<const RunRecord*> train;
    for (const auto& [run_id, a] : assignment.by_run)
        if (a == Assignment::Train) train.push_back(by_id.at(run_id));
    // Training data is grouped by category for the competitors' convenience;
    // only the test ordering is randomized.
    std::sort(train.begin(), train.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tie(a->true_category, a->run_id) < std::tie(b->true_category, b->run_id);
    });
    for (const RunRecord* run : train) out.push_back(labelled(run->run_id, Split::Train));
    for (const auto& run_id : assignment.test_manifest) {
        Assignment a = assignment.by_run.at(run_id);
        out.push_back(labelled(run_id, a == Assignment::Public ? Split::Public : Split::Private));
    }
    return out;
}

bool InvariantReport::all_pass() const {
    return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.pass; });
}

const InvariantReport::Rule* InvariantReport::find(std::string_view name) const {
    for (const auto& r : rules)
        if (r.name == name) return &r;
    return nullptr;
}

InvariantReport check_split_invariants(std::span<const RunRecord> superset,
                                       const SplitAssignment& assignment,
                                       const SplitConfig& config, const FactorSpace& space,
                                       const CategorySet& categories) {
    InvariantReport report;
    auto rule = [&](std::string name) -> InvariantReport::Rule& {
        report.rules.push_back({std::move(name), true, {}, {}});
        return report.rules.back();
    };

    std::unordered_map<std::string_view, const RunRecord*> by_id;
    for (const auto& run : superset) by_id.emplace(run.run_id, &run);

    {
        auto& r = rule("assigned-exactly-once");
        for (const auto& run : superset)
            if (!assignment.by_run.count(run.run_id)) {
                r.pass = false;
                r.offenders.push_back(run.run_id);
            }
        for (const auto& [run_id, a] : assignment.by_run) {
            (void)a;
            if (!by_id.count(run_id)) {
                r.pass = false;
                r.offenders.push_back(run_id);
            }
        }
        if (!r.pass) r.detail = "assignment does not cover the superset exactly";
    }

    Eligibility elig{&config, &space, assignment.allowed_levels};

    {
        auto& r = rule("range-and-level-eligibility");
        for (const auto& [run_id, a] : assignment.by_run) {
            if (a == Assignment::Discarded) continue;
            auto it = by_id.find(run_id);
            if (it == by_id.end()) continue;
            Split s = a == Assignment::Train    ? Split::Train
                      : a == Assignment::Public ? Split::Public
                                                : Split::Private;
            const RunRecord& run = *it->second;
            bool ok = true;
            for (const auto& f : space.factors()) {
                if (f.nuisance) continue;
                auto vit = run.factor_values.find(f.name);
                if (vit == run.factor_values.end()) {
                    ok = false;
                    break;
                }
                if (f.is_continuous()) {
                    if (!split_range(config, f, s).contains(std::get<double>(vit->second)))
                        ok = false;
                } else if (!elig.level_allowed(f.name, std::get<std::string>(vit->second), s)) {
                    ok = false;
                }
                if (!ok) break;
            }
            if (!ok) {
                r.pass = false;
                r.offenders.push_back(run_id);
            }
        }
        if (!r.pass) r.detail = "assigned run outside its split's ranges or allowed levels";
    }

    {
        auto& r = rule("hole-exclusion");
        for (const auto& [run_id, a] : assignment.by_run) {
            if (a == Assignment::Discarded) continue;
            auto it = by_id.find(run_id);
            if (it == by_id.end()) continue;
            Split s = a == Assignment::Train    ? Split::Train
                      : a == Assignment::Public ? Split::Public
                                                : Split::Private;
            for (const auto& hole : config.holes)
                if (hole.excludes.count(s) && hole.contains(it->second->factor_values)) {
                    r.pass = false;
                    r.offenders.push_back(run_id);
                    break;
                }
        }
        if (!r.pass) r.detail = "assigned run inside a hole excluding its split";
    }

    {
        auto& r = rule("level-nesting");
        for (const auto& [factor, fractions] : config.level_fractions) {
            (void)fractions;
            auto it = assignment.allowed_levels.find(factor);
            if (it == assignment.allowed_levels.end()) {
                r.pass = false;
                r.detail = "allowed level sets missing for factor '" + factor + "'";
                continue;
            }
            const auto& sets = it->second;
            auto subset = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                return std::all_of(a.begin(), a.end(), [&](const std::string& x) {
                    return std::find(b.begin(), b.end(), x) != b.end();
                });
            };
            if (!subset(sets[0], sets[1]) || !subset(sets[1], sets[2])) {
                r.pass = false;
                r.detail = "allowed level sets for '" + factor + "' not nested";
            }
        }
    }

    {
        auto& r = rule("target-counts");
        std::map<std::pair<Split, std::string>, int> counts;
        for (const auto& [run_id, a] : assignment.by_run) {
            if (a == Assignment::Discarded) continue;
            auto it = by_id.find(run_id);
            if (it == by_id.end()) continue;
            Split s = a == Assignment::Train    ? Split::Train
                      : a == Assignment::Public ? Split::Public
                                                : Split::Private;
            counts[{s, it->second->true_category}]++;
        }
        std::vector<std::string> labels = categories.names();
        labels.emplace_back(CategorySet::kNoSource);
        for (Split s : kSplits) {
            for (const auto& category : labels) {
                int want;
                if (CategorySet::is_no_source(category)) {
                    want = derived_no_source_target(config, s);
                } else {
                    const auto& per_cat = config.targets(s).per_category;
                    auto it = per_cat.find(category);
                    want = it == per_cat.end() ? 0 : it->second;
                }
                int got = counts.count({s, category}) ? counts[{s, category}] : 0;
                if (got != want) {
                    r.pass = false;
                    r.detail += std::string(to_string(s)) + "/" + category + ": " +
                                std::to_string(got) + " != " + std::to_string(want) + "; ";
                }
            }
        }
    }

    {
        auto& r = rule("replicate-groups");
        std::map<std::string, std::vector<const RunRecord*>> groups;
        for (const auto& [run_id, a] : assignment.by_run) {
            if (a == Assignment::Discarded) continue;
            auto git = assignment.replicate_group.find(run_id);
            if (git == assignment.replicate_group.end()) {
                r.pass = false;
                r.offenders.push_back(run_id);
                continue;
            }
            auto it = by_id.find(run_id);
            if (it != by_id.end()) groups[git->second].push_back(it->second);
        }
        for (const auto& [group, members] : groups) {
            bool bad = members.size() != static_cast<std::size_t>(config.replicate_count);
            for (std::size_t i = 1; !bad && i < members.size(); ++i) {
                if (scenario_key(*members[i], space) != scenario_key(*members[0], space) ||
                    assignment.by_run.at(members[i]->run_id) !=
                        assignment.by_run.at(members[0]->run_id))
                    bad = true;
            }
            if (bad) {
                r.pass = false;
                r.offenders.push_back(group);
            }
        }
        if (!r.pass) r.detail = "replicate group malformed (size, shared values, or split)";
    }

    {
        auto& r = rule("test-manifest");
        std::unordered_set<std::string_view> manifest(assignment.test_manifest.begin(),
                                                      assignment.test_manifest.end());
        if (manifest.size() != assignment.test_manifest.size()) {
            r.pass = false;
            r.detail = "duplicate run_id in test manifest";
        }
        for (const auto& [run_id, a] : assignment.by_run) {
            bool is_test = a == Assignment::Public || a == Assignment::Private;
            if (is_test != (manifest.count(run_id) > 0)) {
                r.pass = false;
                r.offenders.push_back(run_id);
            }
        }
        if (!r.pass && r.detail.empty())
            r.detail = "test manifest differs from the PUBLIC and PRIVATE assignment";
    }

    return report;
}

}  // namespace dcomp
