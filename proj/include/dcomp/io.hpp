#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dcomp/design.hpp"
#include "dcomp/domain.hpp"
#include "dcomp/eda.hpp"
#include "dcomp/glm.hpp"
#include "dcomp/scoring.hpp"
#include "dcomp/simulate.hpp"
#include "dcomp/surface.hpp"

namespace dcomp {

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

// Host-side manifest: run_id,split,true_category,true_location_s,<factors...>.
// Factor columns follow the FactorSpace declaration order; absent values are
// empty fields.
void write_host_manifest(const std::filesystem::path& path, std::span<const RunRecord> runs,
                         const FactorSpace& space);
std::vector<RunRecord> read_host_manifest(const std::filesystem::path& path,
                                          const FactorSpace& space,
                                          const CategorySet& categories);

// Superset manifests use the same schema without the split column (candidates
// have no split yet). The replicate_group column is host metadata.
void write_superset_manifest(const std::filesystem::path& path, std::span<const RunRecord> runs,
                             const FactorSpace& space);
std::vector<RunRecord> read_superset_manifest(const std::filesystem::path& path,
                                              const FactorSpace& space,
                                              const CategorySet& categories);

// Competitor-facing test manifest: the ordered run_id list and nothing else.
// Split labels and every truth column are withheld.
void write_test_manifest(const std::filesystem::path& path,
                         std::span<const std::string> ordered_run_ids);
std::vector<std::string> read_test_manifest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Submissions
// ---------------------------------------------------------------------------

// run_id,claimed_category,claimed_location_s with the NO_SOURCE literal and an
// empty location field when no source is claimed.
void write_submission(const std::filesystem::path& path, const Submission& submission);
Submission read_submission(const std::filesystem::path& path, std::string team_id,
                           std::int64_t timestamp);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct CompetitionPaths {
    std::string superset = "superset.csv";
    std::string host_manifest = "host_manifest.csv";
    std::string test_manifest = "test_manifest.csv";
    std::string leaderboard = "leaderboard.json";
};

struct CompetitionConfig {
    FactorSpace space;
    CategorySet categories;
    SplitConfig split;
    ScoreWeights weights;
    SubmissionPolicy policy;
    CompetitionPaths paths;
};

CompetitionConfig load_competition_config(const std::filesystem::path& path);
SyntheticTruth load_truth(const std::filesystem::path& path, const CompetitionConfig& config);
std::vector<ScoreWeights> load_weight_candidates(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Leaderboard persistence and views
// ---------------------------------------------------------------------------

// Full board state, atomically replaced (write-temp-then-rename).
void save_board(const std::filesystem::path& path, const Leaderboard& board);
Leaderboard load_board(const std::filesystem::path& path);  // missing file -> empty board

// JSON array sorted by score descending.
std::string board_to_json(std::span<const LeaderboardEntry> entries);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string fit_report_json(const GlmFit& fit, double lack_of_fit_p);

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& matrix);
void write_agreement_csv(const std::filesystem::path& path, const AgreementTable& table);
void write_bars_csv(const std::filesystem::path& path, std::span<const SourceOutcomeRow> rows);
void write_scatter_csv(const std::filesystem::path& path, std::span<const ScatterRecord> records);
void write_surface_csv(const std::filesystem::path& path, const Surface& surface,
                       const std::string& x_factor, const std::string& y_factor);
void write_difference_csv(const std::filesystem::path& path, const DifferenceSurface& surface,
                          const std::string& x_factor, const std::string& y_factor);
void write_pa_csv(const std::filesystem::path& path, std::span<const FactorValues> grid,
                  std::span<const double> pa, const std::string& x_factor,
                  const std::string& y_factor);

void write_invariant_report(const std::filesystem::path& path, const InvariantReport& report);

// Write a whole file atomically.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace dcomp
