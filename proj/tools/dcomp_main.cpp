// dcomp: host-side command line for designing, scoring, and analyzing a
// supervised-learning data competition.

#include <CLI11.hpp>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcomp/csv.hpp"
#include "dcomp/design.hpp"
#include "dcomp/domain.hpp"
#include "dcomp/eda.hpp"
#include "dcomp/error.hpp"
#include "dcomp/glm.hpp"
#include "dcomp/io.hpp"
#include "dcomp/scoring.hpp"
#include "dcomp/simulate.hpp"
#include "dcomp/surface.hpp"

namespace fs = std::filesystem;
using namespace dcomp;

namespace {

struct Global {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

fs::path resolve(const Global& global, const std::string& path) {
    fs::path p(path);
    return p.is_absolute() ? p : fs::path(global.out) / p;
}

CompetitionConfig load_config(const Global& global) {
    if (global.config_path.empty()) throw ConfigError("--config is required");
    CompetitionConfig config = load_competition_config(global.config_path);
    if (global.seed) config.split.seed = *global.seed;
    return config;
}

Interval parse_range(const std::string& text, const std::string& what) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError(what + ": expected lo:hi");
    return {parse_double(text.substr(0, colon), what), parse_double(text.substr(colon + 1), what)};
}

std::pair<std::string, std::string> parse_kv(const std::string& text, const std::string& what) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(what + ": expected key=value");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

MockPattern parse_pattern(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(':', start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    MockPattern pattern;
    if (parts[0] == "ALL_CORRECT" && parts.size() == 1) {
        pattern.kind = MockPattern::Kind::AllCorrect;
    } else if (parts[0] == "ALL_NO_SOURCE" && parts.size() == 1) {
        pattern.kind = MockPattern::Kind::AllNoSource;
    } else if (parts[0] == "EXCEPT_CATEGORY" && parts.size() == 3) {
        pattern.kind = MockPattern::Kind::ExceptCategory;
        pattern.category = parts[1];
        if (parts[2] != "miss") {
            auto [key, value] = parse_kv(parts[2], "pattern " + text);
            if (key != "as")
                throw ConfigError("pattern " + text + ": expected miss or as=<category>");
            pattern.misidentify_as = value;
        }
    } else if (parts[0] == "LOCATION_OFFSET" && parts.size() == 2) {
        pattern.kind = MockPattern::Kind::LocationOffset;
        pattern.offset_s = parse_double(parts[1], "pattern " + text);
    } else if (parts[0] == "RANDOM" && parts.size() == 2) {
        pattern.kind = MockPattern::Kind::Random;
        pattern.seed = std::stoull(parts[1]);
    } else {
        throw ConfigError("unknown mock pattern '" + text + "'");
    }
    return pattern;
}

// Keeps the validated submissions alive for the pointers inside Evaluation.
std::vector<std::unique_ptr<ValidatedSubmission>> g_loaded_submissions;

std::vector<Evaluation> load_evaluations(const CompetitionConfig& config,
                                         std::span<const RunRecord> key,
                                         const fs::path& submission_path) {
    Submission sub = read_submission(submission_path, submission_path.stem().string(), 0);
    auto validated = validate_submission(sub, test_run_ids(key), config.categories);
    g_loaded_submissions.push_back(std::make_unique<ValidatedSubmission>(std::move(validated)));
    return evaluate_submission(*g_loaded_submissions.back(), key);
}

std::vector<Evaluation> filter_evaluations(std::vector<Evaluation> evals,
                                           const std::optional<std::string>& category,
                                           const std::optional<Split>& split) {
    std::vector<Evaluation> out;
    for (auto& ev : evals) {
        if (category && ev.run->true_category != *category) continue;
        if (split && ev.run->split != *split) continue;
        out.push_back(ev);
    }
    return out;
}

std::optional<Split> parse_split_filter(const std::string& text) {
    if (text.empty() || text == "ALL") return std::nullopt;
    return split_from_string(text);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_design(const Global& global) {
    CompetitionConfig config = load_config(global);
    auto superset = read_superset_manifest(resolve(global, config.paths.superset), config.space,
                                           config.categories);
    SplitAssignment assignment =
        assign_splits(superset, config.split, config.space, config.categories);
    auto manifest = apply_assignment(superset, assignment);

    InvariantReport report = check_split_invariants(superset, assignment, config.split,
                                                    config.space, config.categories);
    write_invariant_report(resolve(global, "invariant_report.json"), report);
    for (const auto& rule : report.rules)
        std::cout << (rule.pass ? "PASS " : "FAIL ") << rule.name << "\n";
    if (!report.all_pass())
        throw InfeasibleDesignError("split invariant audit failed; see invariant_report.json");

    write_host_manifest(resolve(global, config.paths.host_manifest), manifest, config.space);
    write_test_manifest(resolve(global, config.paths.test_manifest), assignment.test_manifest);

    std::map<Assignment, int> counts;
    for (const auto& [id, a] : assignment.by_run) {
        (void)id;
        counts[a]++;
    }
    std::cout << "design: train " << counts[Assignment::Train] << ", public "
              << counts[Assignment::Public] << ", private " << counts[Assignment::Private]
              << ", discarded " << counts[Assignment::Discarded] << "\n";
    return 0;
}

int cmd_score(const Global& global, const std::string& team, std::int64_t timestamp,
              const std::string& submission_path) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    Submission sub = read_submission(resolve(global, submission_path), team, timestamp);
    auto validated = validate_submission(sub, test_run_ids(key), config.categories);
    SubmissionScores scores = score_submission(validated, key, config.weights);

    fs::path board_path = resolve(global, config.paths.leaderboard);
    Leaderboard board = load_board(board_path);
    auto decision = board.submit(team, timestamp, scores, config.policy);
    if (!decision.accepted) {
        std::cerr << "rejected: " << decision.reason << "\n";
        return 1;
    }
    save_board(board_path, board);
    std::cout << "team " << team << ": public " << format_double(scores.public_score)
              << ", private " << format_double(scores.private_score)
              << (decision.improved ? " (new best)" : "") << "\n";
    return 0;
}

int cmd_leaderboard(const Global& global, bool use_private) {
    CompetitionConfig config = load_config(global);
    Leaderboard board = load_board(resolve(global, config.paths.leaderboard));
    std::cout << board_to_json(use_private ? board.private_board() : board.public_board());
    return 0;
}

int cmd_simulate(const Global& global, const std::string& truth_path, double superset_mult) {
    CompetitionConfig config = load_config(global);
    SyntheticTruth truth = load_truth(resolve(global, truth_path), config);
    std::uint64_t seed = global.seed.value_or(config.split.seed);
    SimulationResult sim = simulate_competition(truth, config.space, config.categories,
                                                config.split, seed, superset_mult);

    write_superset_manifest(resolve(global, config.paths.superset), sim.superset, config.space);
    write_host_manifest(resolve(global, config.paths.host_manifest), sim.host_manifest,
                        config.space);
    write_test_manifest(resolve(global, config.paths.test_manifest),
                        sim.assignment.test_manifest);
    for (const auto& sub : sim.submissions)
        write_submission(resolve(global, "sub_" + sub.team_id + ".csv"), sub);

    std::cout << "simulate: superset " << sim.superset.size() << " runs, test manifest "
              << sim.assignment.test_manifest.size() << " runs, teams " << sim.submissions.size()
              << "\n";
    return 0;
}

int cmd_mock(const Global& global, const std::vector<std::string>& pattern_texts) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    std::vector<MockPattern> patterns;
    for (const auto& text : pattern_texts) patterns.push_back(parse_pattern(text));
    auto mocks = generate_mock_submissions(key, patterns, config.categories);
    auto manifest = test_run_ids(key);
    for (const auto& mock : mocks) {
        write_submission(resolve(global, "mock_" + mock.team_id + ".csv"), mock);
        auto validated = validate_submission(mock, manifest, config.categories);
        SubmissionScores scores = score_submission(validated, key, config.weights);
        std::cout << mock.team_id << ": public " << format_double(scores.public_score)
                  << ", private " << format_double(scores.private_score) << "\n";
    }
    return 0;
}

int cmd_weights_check(const Global& global, const std::string& candidates_path,
                      const std::vector<std::string>& pattern_texts) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    auto candidates = load_weight_candidates(resolve(global, candidates_path));
    std::vector<MockPattern> patterns;
    for (const auto& text : pattern_texts) patterns.push_back(parse_pattern(text));
    auto mocks = generate_mock_submissions(key, patterns, config.categories);

    WeightRobustness result = weight_robustness(mocks, candidates, key, config.categories);
    std::ostringstream out;
    out << "candidate,rank,mock,private_score\n";
    for (std::size_t c = 0; c < result.candidates.size(); ++c)
        for (std::size_t r = 0; r < result.candidates[c].ranking.size(); ++r)
            write_csv_row(out, {std::to_string(c), std::to_string(r + 1),
                                result.candidates[c].ranking[r],
                                format_double(result.candidates[c].private_scores[r])});
    atomic_write(resolve(global, "weights_check.csv"), out.str());

    for (std::size_t c = 0; c < result.candidates.size(); ++c) {
        std::cout << "candidate " << c << ":";
        for (const auto& name : result.candidates[c].ranking) std::cout << " " << name;
        std::cout << "\n";
    }
    if (result.unstable_pairs.empty()) {
        std::cout << "ranking stable across all candidates\n";
    } else {
        for (const auto& [a, b] : result.unstable_pairs)
            std::cout << "unstable pair: " << a << " vs " << b << "\n";
    }
    return 0;
}

// Options shared by the model-based analyze subcommands.
struct GlmOptions {
    std::string submission;
    std::string submission_b;
    std::string response = "detect";
    std::string category;
    std::vector<std::string> factors;
    std::string pool = "full";
    double alpha = 0.05;
    std::string split = "ALL";
    // surface grid
    std::string x_factor, y_factor;
    std::string x_range, y_range;
    std::size_t grid_n = 50;
    std::vector<std::string> fixes;
    bool logit_scale = false;
    double pa_delta = 0.05;
};

Dataset build_dataset(const CompetitionConfig& config, std::span<const Evaluation> evals,
                      const GlmOptions& options) {
    Dataset data;
    data.space = config.space;
    for (const auto& ev : evals) {
        double y = 0.0;
        if (options.response == "detect") {
            if (!ev.outcome.source_run()) continue;
            y = ev.outcome.det;
        } else if (options.response == "identify") {
            if (!ev.outcome.source_run()) continue;
            y = ev.outcome.iden;
        } else if (options.response == "correct-no-source") {
            if (ev.outcome.source_run()) continue;
            y = ev.outcome.outcome_class == OutcomeClass::TN ? 1.0 : 0.0;
        } else if (options.response == "loc-miss") {
            if (!ev.outcome.loc_miss_s) continue;
            y = *ev.outcome.loc_miss_s;
        } else {
            throw ConfigError("unknown response '" + options.response + "'");
        }
        data.add(ev.run->factor_values, y);
    }
    if (data.n() == 0) throw ValidationError("no rows matched the response/category filters");
    return data;
}

SelectionResult fit_selected(const CompetitionConfig& config, const Dataset& data,
                             const GlmOptions& options) {
    TermSpec pool = options.pool == "mains"
                        ? TermSpec::mains(options.factors)
                        : TermSpec::full_pool(config.space, options.factors);
    Family family =
        options.response == "loc-miss" ? Family::GaussianIdentity : Family::BinomialLogit;
    return select_model(data, pool, options.alpha, family);
}

std::vector<FactorValues> build_grid(const CompetitionConfig& config, const GlmOptions& options) {
    if (options.x_factor.empty() || options.y_factor.empty())
        throw ConfigError("surface output needs --x and --y");
    Interval x_range = options.x_range.empty() ? config.space.at(options.x_factor).range
                                               : parse_range(options.x_range, "--x-range");
    Interval y_range = options.y_range.empty() ? config.space.at(options.y_factor).range
                                               : parse_range(options.y_range, "--y-range");
    FactorValues fixed;
    for (const auto& text : options.fixes) {
        auto [factor, value] = parse_kv(text, "--fix");
        if (config.space.at(factor).is_continuous())
            fixed[factor] = parse_double(value, "--fix " + factor);
        else
            fixed[factor] = value;
    }
    // Every model factor off the axes must be pinned.
    for (const auto& f : options.factors)
        if (f != options.x_factor && f != options.y_factor && !fixed.count(f))
            throw ConfigError("factor '" + f + "' is in the model; pin it with --fix " + f +
                              "=<value>");
    return make_grid(config.space, options.x_factor, x_range, options.grid_n, options.y_factor,
                     y_range, options.grid_n, fixed);
}

int cmd_analyze_confusion(const Global& global, const GlmOptions& options) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    auto evals = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission)), std::nullopt,
        parse_split_filter(options.split));
    write_confusion_csv(resolve(global, "confusion_detection.csv"), detection_confusion(evals));
    write_confusion_csv(resolve(global, "confusion_identification.csv"),
                        identification_confusion(evals, config.categories));
    std::cout << "confusion written for " << evals.size() << " outcomes\n";
    return 0;
}

int cmd_analyze_agreement(const Global& global, const GlmOptions& options) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    std::optional<std::string> category =
        options.category.empty() ? std::nullopt : std::optional(options.category);
    auto split = parse_split_filter(options.split);
    auto evals_a = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission)), category, split);
    auto evals_b = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission_b)), category, split);
    AgreementTable table = team_agreement(evals_a, evals_b);
    write_agreement_csv(resolve(global, "agreement.csv"), table);
    std::cout << "agreement over " << table.total << " source runs, off-diagonal "
              << table.off_diagonal_total() << "\n";
    return 0;
}

int cmd_analyze_bars(const Global& global, const std::vector<std::string>& team_specs) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    std::map<std::string, std::vector<Evaluation>> by_team;
    for (const auto& spec : team_specs) {
        auto [team, path] = parse_kv(spec, "--submission");
        by_team[team] = load_evaluations(config, key, resolve(global, path));
    }
    write_bars_csv(resolve(global, "bars.csv"), outcome_by_source(by_team));
    std::cout << "bars written for " << by_team.size() << " teams\n";
    return 0;
}

int cmd_analyze_scatter(const Global& global, const GlmOptions& options,
                        const std::vector<std::string>& where) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    ScatterFilter filter;
    if (!options.category.empty()) filter.category = options.category;
    filter.split = parse_split_filter(options.split);
    for (const auto& text : where) {
        auto [factor, value] = parse_kv(text, "--where");
        if (config.space.at(factor).is_continuous())
            filter.ranges[factor] = parse_range(value, "--where " + factor);
        else
            filter.level_equals[factor] = value;
    }
    auto evals_a = load_evaluations(config, key, resolve(global, options.submission));
    std::vector<ScatterRecord> records;
    if (options.submission_b.empty()) {
        records = export_scatter(evals_a, config.space, options.x_factor, options.y_factor,
                                 filter);
    } else {
        auto evals_b = load_evaluations(config, key, resolve(global, options.submission_b));
        records = export_scatter_pair(evals_a, evals_b, config.space, options.x_factor,
                                      options.y_factor, filter);
    }
    write_scatter_csv(resolve(global, "scatter.csv"), records);
    std::cout << "scatter: " << records.size() << " records\n";
    return 0;
}

int cmd_analyze_glm(const Global& global, const GlmOptions& options) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    std::optional<std::string> category =
        options.category.empty() ? std::nullopt : std::optional(options.category);
    auto evals = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission)), category,
        parse_split_filter(options.split));
    Dataset data = build_dataset(config, evals, options);
    SelectionResult selection = fit_selected(config, data, options);
    atomic_write(resolve(global, "glm_report.json"),
                 fit_report_json(selection.fit, selection.lack_of_fit_p));
    if (!options.x_factor.empty()) {
        auto grid = build_grid(config, options);
        write_surface_csv(resolve(global, "surface.csv"),
                          predict_surface(selection.fit, grid, 0.95), options.x_factor,
                          options.y_factor);
    }
    std::cout << "glm: n=" << data.n() << ", deviance=" << format_double(selection.fit.deviance)
              << ", lack_of_fit_p=" << format_double(selection.lack_of_fit_p) << "\n";
    return 0;
}

int cmd_analyze_compare(const Global& global, const GlmOptions& options, bool with_pa) {
    CompetitionConfig config = load_config(global);
    auto key = read_host_manifest(resolve(global, config.paths.host_manifest), config.space,
                                  config.categories);
    std::optional<std::string> category =
        options.category.empty() ? std::nullopt : std::optional(options.category);
    auto split = parse_split_filter(options.split);
    auto evals_a = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission)), category, split);
    auto evals_b = filter_evaluations(
        load_evaluations(config, key, resolve(global, options.submission_b)), category, split);
    Dataset data_a = build_dataset(config, evals_a, options);
    Dataset data_b = build_dataset(config, evals_b, options);
    GlmFit fit_a = fit_selected(config, data_a, options).fit;
    GlmFit fit_b = fit_selected(config, data_b, options).fit;
    auto grid = build_grid(config, options);
    if (with_pa) {
        auto pa = probability_of_agreement(fit_a, fit_b, grid, options.pa_delta);
        write_pa_csv(resolve(global, "pa.csv"), grid, pa, options.x_factor, options.y_factor);
        std::cout << "pa: " << grid.size() << " grid points, delta "
                  << format_double(options.pa_delta) << "\n";
    } else {
        DifferenceSurface diff = difference_surface(fit_a, fit_b, grid, options.logit_scale);
        write_difference_csv(resolve(global, "difference.csv"), diff, options.x_factor,
                             options.y_factor);
        std::cout << "compare: " << grid.size() << " grid points\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data competition design, scoring, and analysis toolkit"};
    app.require_subcommand(1);

    Global global;
    app.add_option("--config", global.config_path, "competition config JSON")
        ->envname("DCOMP_CONFIG");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
    app.add_option("--out", global.out, "directory for outputs and relative paths");

    auto* design = app.add_subcommand("design", "build train/public/private sets from a superset");

    auto* score = app.add_subcommand("score", "score a submission and update the leaderboard");
    std::string team = "team";
    std::int64_t timestamp = -1;
    std::string submission_path;
    score->add_option("--team", team, "team id")->required();
    score->add_option("--timestamp", timestamp, "submission time (s since epoch, UTC)");
    score->add_option("submission", submission_path, "submission CSV")->required();

    auto* leaderboard = app.add_subcommand("leaderboard", "print a board as JSON");
    bool show_private = false, show_public = false;
    leaderboard->add_flag("--private", show_private, "final board (private test set)");
    leaderboard->add_flag("--public", show_public, "live board (public test set)");

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic competition");
    std::string truth_path;
    double superset_mult = 6.0;
    simulate->add_option("--truth", truth_path, "synthetic truth JSON")->required();
    simulate->add_option("--superset-mult", superset_mult,
                         "superset size as a multiple of the design targets");

    auto* mock = app.add_subcommand("mock", "generate and score mock submissions");
    std::vector<std::string> patterns;
    mock->add_option("--pattern", patterns,
                     "ALL_CORRECT | ALL_NO_SOURCE | EXCEPT_CATEGORY:<cat>:{miss|as=<cat>} | "
                     "LOCATION_OFFSET:<s> | RANDOM:<seed>")
        ->required();

    auto* weights_check =
        app.add_subcommand("weights-check", "rank mock submissions under candidate weightings");
    std::string candidates_path;
    std::vector<std::string> wc_patterns;
    weights_check->add_option("--candidates", candidates_path, "JSON array of weightings")
        ->required();
    weights_check->add_option("--pattern", wc_patterns, "mock patterns (as in mock)")->required();

    auto* analyze = app.add_subcommand("analyze", "post-competition analysis");
    analyze->require_subcommand(1);
    GlmOptions options;
    std::vector<std::string> where;
    std::vector<std::string> team_specs;

    auto add_submission = [&](CLI::App* cmd) {
        cmd->add_option("--submission", options.submission, "submission CSV")->required();
    };
    auto add_submission_b = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--submission-b", options.submission_b,
                                    "second team's submission CSV");
        if (required) opt->required();
    };
    auto add_filters = [&](CLI::App* cmd) {
        cmd->add_option("--category", options.category, "restrict to one true category");
        cmd->add_option("--split", options.split, "PUBLIC, PRIVATE, or ALL");
    };
    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--response", options.response,
                        "detect | identify | correct-no-source | loc-miss");
        cmd->add_option("--factors", options.factors, "model factors")->required()->delimiter(',');
        cmd->add_option("--pool", options.pool, "mains | full (mains+quadratics+interactions)");
        cmd->add_option("--alpha", options.alpha, "backward-elimination level");
    };
    auto add_grid = [&](CLI::App* cmd) {
        cmd->add_option("--x", options.x_factor, "x-axis factor");
        cmd->add_option("--y", options.y_factor, "y-axis factor");
        cmd->add_option("--x-range", options.x_range, "lo:hi (default: factor range)");
        cmd->add_option("--y-range", options.y_range, "lo:hi (default: factor range)");
        cmd->add_option("--grid-n", options.grid_n, "grid points per axis");
        cmd->add_option("--fix", options.fixes, "pin an off-axis factor, factor=value");
    };

    auto* confusion = analyze->add_subcommand("confusion", "detection/identification matrices");
    add_submission(confusion);
    add_filters(confusion);

    auto* agreement = analyze->add_subcommand("agreement", "team-agreement cross-tab");
    add_submission(agreement);
    add_submission_b(agreement);
    add_filters(agreement);

    auto* bars = analyze->add_subcommand("bars", "per-source outcome shares per team");
    bars->add_option("--submission", team_specs, "team=path (repeatable)")->required();

    auto* scatter = analyze->add_subcommand("scatter", "plot-ready outcome coordinates");
    add_submission(scatter);
    add_submission_b(scatter, false);
    add_filters(scatter);
    scatter->add_option("--x", options.x_factor, "x-axis factor")->required();
    scatter->add_option("--y", options.y_factor, "y-axis factor")->required();
    scatter->add_option("--where", where, "factor=level or factor=lo:hi (repeatable)");

    auto* glm = analyze->add_subcommand("glm", "response-surface fit with model selection");
    add_submission(glm);
    add_filters(glm);
    add_model(glm);
    add_grid(glm);

    auto* compare = analyze->add_subcommand("compare", "difference surface for two teams");
    add_submission(compare);
    add_submission_b(compare);
    add_filters(compare);
    add_model(compare);
    add_grid(compare);
    compare->add_flag("--logit-scale", options.logit_scale,
                      "test differences on the linear-predictor scale");

    auto* pa = analyze->add_subcommand("pa", "probability of agreement for two teams");
    add_submission(pa);
    add_submission_b(pa);
    add_filters(pa);
    add_model(pa);
    add_grid(pa);
    pa->add_option("--delta", options.pa_delta, "practically meaningful difference");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) global.seed = seed_value;
    if (timestamp < 0) timestamp = static_cast<std::int64_t>(std::time(nullptr));

    try {
        if (design->parsed()) return cmd_design(global);
        if (score->parsed()) return cmd_score(global, team, timestamp, submission_path);
        if (leaderboard->parsed()) {
            if (show_private && show_public)
                throw ConfigError("choose one of --public or --private");
            return cmd_leaderboard(global, show_private);
        }
        if (simulate->parsed()) return cmd_simulate(global, truth_path, superset_mult);
        if (mock->parsed()) return cmd_mock(global, patterns);
        if (weights_check->parsed())
            return cmd_weights_check(global, candidates_path, wc_patterns);
        if (analyze->parsed()) {
            if (confusion->parsed()) return cmd_analyze_confusion(global, options);
            if (agreement->parsed()) return cmd_analyze_agreement(global, options);
            if (bars->parsed()) return cmd_analyze_bars(global, team_specs);
            if (scatter->parsed()) return cmd_analyze_scatter(global, options, where);
            if (glm->parsed()) return cmd_analyze_glm(global, options);
            if (compare->parsed()) return cmd_analyze_compare(global, options, false);
            if (pa->parsed()) return cmd_analyze_compare(global, options, true);
        }
        throw ConfigError("no command");
    } catch (const InfeasibleDesignError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error:\n";
        for (const auto& issue : e.issues()) std::cerr << "  " << issue << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
