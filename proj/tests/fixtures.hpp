#pragma once

// Shared fixtures for the unit suites: a small factor space and category set
// in the shape of an urban-search style competition, plus helpers to build
// keys and submissions.

#include <string>
#include <vector>

#include "dcomp/domain.hpp"
#include "dcomp/scoring.hpp"

namespace fixtures {

using namespace dcomp;

inline FactorSpace make_space() {
    std::vector<FactorDef> factors;
    factors.push_back({"snr", FactorDef::Kind::Continuous, {0.0, 8.0}, {}, false});
    factors.push_back({"speed", FactorDef::Kind::Continuous, {1.0, 13.0}, {}, false});
    factors.push_back({"shield", FactorDef::Kind::Categorical, {}, {"0", "1"}, false});
    factors.push_back(
        {"background", FactorDef::Kind::Categorical, {}, {"b1", "b2", "b3", "b4"}, false});
    factors.push_back({"duration", FactorDef::Kind::Continuous, {30.0, 120.0}, {}, true});
    return FactorSpace(std::move(factors));
}

inline CategorySet make_categories() {
    return CategorySet({"HEU", "WGPu", "I131", "Co60", "Tc99m", "HEU+Tc99m"});
}

inline FactorValues values(double snr, double speed, const std::string& shield,
                           const std::string& background, double duration = 60.0) {
    FactorValues v;
    v["snr"] = snr;
    v["speed"] = speed;
    v["shield"] = shield;
    v["background"] = background;
    v["duration"] = duration;
    return v;
}

inline RunRecord run(std::string id, std::string category, std::optional<double> location,
                     Split split = Split::Public, FactorValues v = values(4.0, 6.0, "0", "b1")) {
    RunRecord r;
    r.run_id = std::move(id);
    r.true_category = std::move(category);
    r.true_location_s = location;
    r.split = split;
    r.factor_values = std::move(v);
    return r;
}

inline PredictionEntry claim(std::string run_id, std::string category,
                             std::optional<double> location) {
    return {std::move(run_id), std::move(category), location};
}

// A small mixed test key: one source and one no-source run per split side.
inline std::vector<RunRecord> small_key() {
    return {
        run("r1", "WGPu", 30.0, Split::Public),
        run("r2", "NO_SOURCE", std::nullopt, Split::Public),
        run("r3", "HEU", 12.0, Split::Private),
        run("r4", "NO_SOURCE", std::nullopt, Split::Private),
    };
}

inline Submission perfect_submission(std::span<const RunRecord> key, std::string team = "perfect") {
    Submission sub;
    sub.team_id = std::move(team);
    for (const auto& r : key) {
        if (r.split == Split::Train) continue;
        sub.entries.push_back({r.run_id, r.true_category, r.true_location_s});
    }
    return sub;
}

}  // namespace fixtures
