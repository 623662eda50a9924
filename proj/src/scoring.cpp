#include "dcomp/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "dcomp/csv.hpp"
#include "dcomp/rng.hpp"

namespace dcomp {

void validate_weights(const ScoreWeights& weights) {
    if (weights.w_det < 0.0 || weights.w_iden < 0.0 || weights.w_loc < 0.0)
        throw ConfigError("score weights must be nonnegative");
    if (std::abs(weights.w_det + weights.w_iden + weights.w_loc - 1.0) > 1e-12)
        throw ConfigError("score weights must sum to 1");
    if (!(weights.no_source_weight > 0.0)) throw ConfigError("no_source_weight must be positive");
    if (!(weights.loc_tolerance_s > 0.0)) throw ConfigError("loc_tolerance_s must be positive");
}

double score_run(const OutcomeRecord& outcome, const ScoreWeights& weights) {
    if (!outcome.source_run()) return outcome.outcome_class == OutcomeClass::TN ? 1.0 : 0.0;
    double loc = 0.0;
    if (outcome.det == 1 && outcome.loc_miss_s)
        loc = std::max(0.0, 1.0 - *outcome.loc_miss_s / weights.loc_tolerance_s);
    return weights.w_det * outcome.det + weights.w_iden * outcome.iden + weights.w_loc * loc;
}

SubmissionScores score_submission(const ValidatedSubmission& submission,
                                  std::span<const RunRecord> key, const ScoreWeights& weights) {
    validate_weights(weights);
    double num[2] = {0.0, 0.0};
    double den[2] = {0.0, 0.0};
    for (const Evaluation& ev : evaluate_submission(submission, key)) {
        int side = ev.run->split == Split::Public ? 0 : 1;
        double run_weight = ev.run->has_source() ? 1.0 : weights.no_source_weight;
        num[side] += run_weight * score_run(ev.outcome, weights);
        den[side] += run_weight;
    }
    SubmissionScores scores;
    scores.public_score = den[0] > 0.0 ? num[0] / den[0] : 0.0;
    scores.private_score = den[1] > 0.0 ? num[1] / den[1] : 0.0;
    return scores;
}

void validate_policy(const SubmissionPolicy& policy) {
    if (policy.max_total_submissions < 1 || policy.max_daily_submissions < 1)
        throw ConfigError("submission caps must be at least 1");
}

namespace {
constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t utc_day(std::int64_t timestamp) {
    // Floor division so pre-epoch timestamps land in the right day.
    std::int64_t d = timestamp / kSecondsPerDay;
    if (timestamp % kSecondsPerDay < 0) --d;
    return d;
}
}  // namespace

Leaderboard::Decision Leaderboard::submit(const std::string& team_id, std::int64_t timestamp,
                                          const SubmissionScores& scores,
                                          const SubmissionPolicy& policy) {
    validate_policy(policy);
    auto it = teams_.find(team_id);
    if (it != teams_.end()) {
        TeamState& state = it->second;
        if (timestamp < state.last_timestamp)
            return {false, false, "clock regression: timestamp earlier than the team's last submission"};
        if (state.entry.submission_count >= policy.max_total_submissions)
            return {false, false, "total submission cap reached"};
        auto day = state.per_day.find(utc_day(timestamp));
        if (day != state.per_day.end() && day->second >= policy.max_daily_submissions)
            return {false, false, "daily submission cap reached"};
    }

    TeamState& state = teams_[team_id];
    bool first = state.entry.submission_count == 0;
    state.entry.team_id = team_id;
    state.entry.submission_count++;
    state.last_timestamp = timestamp;
    state.per_day[utc_day(timestamp)]++;

    bool improved = first || scores.public_score > state.entry.best_public_score;
    if (improved) {
        state.entry.best_public_score = scores.public_score;
        state.entry.best_private_score = scores.private_score;
        state.entry.best_submission_timestamp = timestamp;
    }
    return {true, improved, ""};
}

namespace {
std::vector<LeaderboardEntry> sorted_board(const std::map<std::string, Leaderboard::TeamState>& teams,
                                           bool use_private) {
    std::vector<LeaderboardEntry> board;
    board.reserve(teams.size());
    for (const auto& [team, state] : teams) {
        (void)team;
        board.push_back(state.entry);
    }
    std::stable_sort(board.begin(), board.end(),
                     [use_private](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                         double sa = use_private ? a.best_private_score : a.best_public_score;
                         double sb = use_private ? b.best_private_score : b.best_public_score;
                         if (sa != sb) return sa > sb;
                         return a.best_submission_timestamp < b.best_submission_timestamp;
                     });
    return board;
}
}  // namespace

std::vector<LeaderboardEntry> Leaderboard::public_board() const {
    return sorted_board(teams_, false);
}

std::vector<LeaderboardEntry> Leaderboard::private_board() const {
    return sorted_board(teams_, true);
}

std::string MockPattern::name() const {
    switch (kind) {
        case Kind::AllCorrect: return "ALL_CORRECT";
        case Kind::ExceptCategory:
            return "EXCEPT_" + category +
                   (misidentify_as.empty() ? "_MISS" : "_AS_" + misidentify_as);
        case Kind::LocationOffset: return "LOCATION_OFFSET_" + format_double(offset_s) + "s";
        case Kind::AllNoSource: return "ALL_NO_SOURCE";
        case Kind::Random: return "RANDOM_" + std::to_string(seed);
    }
    return "MOCK";
}

std::vector<Submission> generate_mock_submissions(std::span<const RunRecord> key,
                                                  std::span<const MockPattern> patterns,
                                                  const CategorySet& categories) {
    std::vector<const RunRecord*> test_runs;
    double max_location = 1.0;
    for (const auto& run : key) {
        if (run.split == Split::Train) continue;
        test_runs.push_back(&run);
        if (run.true_location_s) max_location = std::max(max_location, *run.true_location_s);
    }

    std::vector<Submission> mocks;
    for (const auto& pattern : patterns) {
        if (pattern.kind == MockPattern::Kind::ExceptCategory) {
            if (!categories.contains(pattern.category))
                throw ConfigError("mock pattern: unknown category '" + pattern.category + "'");
            if (!pattern.misidentify_as.empty() && !categories.contains(pattern.misidentify_as))
                throw ConfigError("mock pattern: unknown category '" + pattern.misidentify_as + "'");
        }

        Submission sub;
        sub.team_id = pattern.name();
        Rng rng(pattern.seed);
        for (const RunRecord* run : test_runs) {
            PredictionEntry entry;
            entry.run_id = run->run_id;
            auto answer_correct = [&] {
                entry.claimed_category = run->true_category;
                entry.claimed_location_s = run->true_location_s;
            };
            switch (pattern.kind) {
                case MockPattern::Kind::AllCorrect: answer_correct(); break;
                case MockPattern::Kind::ExceptCategory:
                    if (run->true_category == pattern.category) {
                        if (pattern.misidentify_as.empty()) {
                            entry.claimed_category = std::string(CategorySet::kNoSource);
                        } else {
                            entry.claimed_category = pattern.misidentify_as;
                            entry.claimed_location_s = run->true_location_s;
                        }
                    } else {
                        answer_correct();
                    }
                    break;
                case MockPattern::Kind::LocationOffset:
                    answer_correct();
                    if (entry.claimed_location_s)
                        entry.claimed_location_s =
                            std::max(0.0, *entry.claimed_location_s + pattern.offset_s);
                    break;
                case MockPattern::Kind::AllNoSource:
                    entry.claimed_category = std::string(CategorySet::kNoSource);
                    break;
                case MockPattern::Kind::Random: {
                    std::size_t pick = rng.below(categories.size() + 1);
                    if (pick == categories.size()) {
                        entry.claimed_category = std::string(CategorySet::kNoSource);
                    } else {
                        entry.claimed_category = categories.names()[pick];
                        entry.claimed_location_s = rng.uniform(0.0, max_location);
                    }
                    break;
                }
            }
            sub.entries.push_back(std::move(entry));
        }
        mocks.push_back(std::move(sub));
    }
    return mocks;
}

WeightRobustness weight_robustness(std::span<const Submission> mocks,
                                   std::span<const ScoreWeights> candidates,
                                   std::span<const RunRecord> key,
                                   const CategorySet& categories) {
    if (mocks.empty()) throw ConfigError("weight_robustness: need at least 1 mock submission");
    if (candidates.empty()) throw ConfigError("weight_robustness: need at least 1 candidate");

    auto manifest = test_run_ids(key);
    WeightRobustness out;
    // rank_of[candidate][mock index]
    std::vector<std::vector<std::size_t>> rank_of(candidates.size(),
                                                  std::vector<std::size_t>(mocks.size()));

    for (std::size_t c = 0; c < candidates.size(); ++c) {
        WeightRobustness::CandidateRanking ranking;
        ranking.weights = candidates[c];
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t m = 0; m < mocks.size(); ++m) {
            auto validated = validate_submission(mocks[m], manifest, categories);
            scored.emplace_back(score_submission(validated, key, candidates[c]).private_score, m);
        }
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first > b.first;
        });
        for (std::size_t pos = 0; pos < scored.size(); ++pos) {
            ranking.ranking.push_back(mocks[scored[pos].second].team_id);
            ranking.private_scores.push_back(scored[pos].first);
            rank_of[c][scored[pos].second] = pos;
        }
        out.candidates.push_back(std::move(ranking));
    }

    for (std::size_t i = 0; i < mocks.size(); ++i) {
        for (std::size_t j = i + 1; j < mocks.size(); ++j) {
            bool any_less = false, any_greater = false;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (rank_of[c][i] < rank_of[c][j]) any_less = true;
                if (rank_of[c][i] > rank_of[c][j]) any_greater = true;
            }
            if (any_less && any_greater)
                out.unstable_pairs.emplace_back(mocks[i].team_id, mocks[j].team_id);
        }
    }
    return out;
}

}  // namespace dcomp
