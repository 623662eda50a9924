#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dcomp/domain.hpp"

namespace dcomp {

// ---------------------------------------------------------------------------
// The leaderboard metric
// ---------------------------------------------------------------------------

// Additive desirability over the detection, identification and location
// components. Weights must sum to 1.
struct ScoreWeights {
    double w_det = 0.5;
    double w_iden = 0.3;
    double w_loc = 0.2;
    double no_source_weight = 0.5;  // run weight of no-source runs
    double loc_tolerance_s = 5.0;   // miss at/after which Loc is 0
};

void validate_weights(const ScoreWeights& weights);

// Per-run desirability in [0, 1]. No-source runs score 1 for TN, 0 for FP.
double score_run(const OutcomeRecord& outcome, const ScoreWeights& weights);

struct SubmissionScores {
    double public_score = 0.0;
    double private_score = 0.0;
};

// Run-weight-normalized mean of per-run scores over each test split.
SubmissionScores score_submission(const ValidatedSubmission& submission,
                                  std::span<const RunRecord> key, const ScoreWeights& weights);

// ---------------------------------------------------------------------------
// Leaderboard
// ---------------------------------------------------------------------------

struct SubmissionPolicy {
    int max_total_submissions = 100;
    int max_daily_submissions = 5;
};

void validate_policy(const SubmissionPolicy& policy);

struct LeaderboardEntry {
    std::string team_id;
    double best_public_score = 0.0;
    double best_private_score = 0.0;
    std::int64_t best_submission_timestamp = 0;
    int submission_count = 0;
};

// Best-score tracking per team. The private column follows the submission
// that holds the best public score, so competitors cannot probe the private
// set by watching their final ranking.
class Leaderboard {
public:
    struct Decision {
        bool accepted = false;
        bool improved = false;
        std::string reason;  // set when rejected
    };

    Decision submit(const std::string& team_id, std::int64_t timestamp,
                    const SubmissionScores& scores, const SubmissionPolicy& policy);

    // Sorted descending by the relevant best score; ties go to the earlier
    // best submission.
    std::vector<LeaderboardEntry> public_board() const;
    std::vector<LeaderboardEntry> private_board() const;

    struct TeamState {
        LeaderboardEntry entry;
        std::int64_t last_timestamp = 0;
        std::map<std::int64_t, int> per_day;  // UTC day index -> count
    };

    const std::map<std::string, TeamState>& teams() const { return teams_; }
    void restore(std::map<std::string, TeamState> teams) { teams_ = std::move(teams); }

private:
    std::map<std::string, TeamState> teams_;
};

// ---------------------------------------------------------------------------
// Mock submissions and weight robustness
// ---------------------------------------------------------------------------

struct MockPattern {
    enum class Kind { AllCorrect, ExceptCategory, LocationOffset, AllNoSource, Random };

    Kind kind = Kind::AllCorrect;
    std::string category;        // ExceptCategory: the failing category
    std::string misidentify_as;  // ExceptCategory: empty means missed entirely
    double offset_s = 0.0;       // LocationOffset
    std::uint64_t seed = 0;      // Random

    std::string name() const;
};

// One valid full-test-set submission per pattern, each embodying exactly the
// described systematic error. team_id is the pattern name.
std::vector<Submission> generate_mock_submissions(std::span<const RunRecord> key,
                                                  std::span<const MockPattern> patterns,
                                                  const CategorySet& categories);

struct WeightRobustness {
    struct CandidateRanking {
        ScoreWeights weights;
        std::vector<std::string> ranking;  // mock names, best private score first
        std::vector<double> private_scores;
    };
    std::vector<CandidateRanking> candidates;
    // Mock pairs whose relative order differs between candidate weightings.
    std::vector<std::pair<std::string, std::string>> unstable_pairs;
};

WeightRobustness weight_robustness(std::span<const Submission> mocks,
                                   std::span<const ScoreWeights> candidates,
                                   std::span<const RunRecord> key,
                                   const CategorySet& categories);

}  // namespace dcomp
