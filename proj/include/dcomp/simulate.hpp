#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dcomp/design.hpp"
#include "dcomp/domain.hpp"
#include "dcomp/glm.hpp"

namespace dcomp {

struct SplitConfig;

// Linear predictor over factor values; the simulator's building block.
struct TruthModel {
    TermSpec terms;
    std::vector<double> beta;

    double eta(const FactorSpace& space, const FactorValues& values) const;
};

// Known ground truth standing in for a real data generator. Better teams get a
// positive capability offset added to every linear predictor.
struct SyntheticTruth {
    struct CategoryTruth {
        TruthModel detect;    // P(detect) through the logit link
        TruthModel identify;  // P(identify | detect) through the logit link
    };
    struct Team {
        std::string id;
        double offset = 0.0;
    };

    std::map<std::string, CategoryTruth> per_category;
    TruthModel no_source_correct;  // P(claim NO_SOURCE) for no-source runs
    TruthModel log_loc_scale;      // location-miss half-normal scale = exp(eta)
    std::vector<Team> teams;
    // Optional misidentification weights: true category -> claimed -> weight.
    // Unlisted wrong categories default to weight 1.
    std::map<std::string, std::map<std::string, double>> confusion_bias;
};

void validate_truth(const SyntheticTruth& truth, const FactorSpace& space,
                    const CategorySet& categories);

// Closed-form per-team probabilities at one factor point; also the oracle the
// tests check simulation output against.
double detect_probability(const SyntheticTruth& truth, const FactorSpace& space,
                          const std::string& category, const FactorValues& values,
                          double team_offset);
double identify_probability(const SyntheticTruth& truth, const FactorSpace& space,
                            const std::string& category, const FactorValues& values,
                            double team_offset);
double no_source_correct_probability(const SyntheticTruth& truth, const FactorSpace& space,
                                     const FactorValues& values, double team_offset);

// Candidate superset draw: uniform factor values over ranges and levels,
// replicate_count runs per scenario differing only in nuisance values.
std::vector<RunRecord> generate_superset(const SyntheticTruth& truth,
                                         const FactorSpace& space,
                                         const CategorySet& categories,
                                         const SplitConfig& split, std::uint64_t seed,
                                         double superset_multiplier);

// One simulated team's answers over the ordered test manifest.
Submission simulate_team_submission(const SyntheticTruth& truth, const SyntheticTruth::Team& team,
                                    const FactorSpace& space, const CategorySet& categories,
                                    std::span<const RunRecord> key,
                                    std::span<const std::string> test_order, std::uint64_t seed);

struct SimulationResult {
    std::vector<RunRecord> superset;
    SplitAssignment assignment;
    std::vector<RunRecord> host_manifest;
    std::vector<Submission> submissions;  // one per truth team, in team order
};

// superset -> split design -> per-team submissions, all from one seed.
// Streams: sim/superset, the design module's own streams, sim/team/<id>.
SimulationResult simulate_competition(const SyntheticTruth& truth, const FactorSpace& space,
                                      const CategorySet& categories, const SplitConfig& split,
                                      std::uint64_t seed, double superset_multiplier = 6.0);

}  // namespace dcomp
