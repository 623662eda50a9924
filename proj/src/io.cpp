#include "dcomp/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dcomp/csv.hpp"

namespace dcomp {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string location_field(const std::optional<double>& location) {
    return location ? format_double(*location) : std::string();
}

void write_manifest(const std::filesystem::path& path, std::span<const RunRecord> runs,
                    const FactorSpace& space, bool with_split) {
    std::ostringstream out;
    std::vector<std::string> header = {"run_id"};
    if (with_split) header.emplace_back("split");
    header.emplace_back("true_category");
    header.emplace_back("true_location_s");
    if (with_split) header.emplace_back("replicate_group");
    for (const auto& f : space.factors()) header.push_back(f.name);
    write_csv_row(out, header);

    for (const auto& run : runs) {
        std::vector<std::string> row = {run.run_id};
        if (with_split) row.emplace_back(to_string(run.split));
        row.push_back(run.true_category);
        row.push_back(location_field(run.true_location_s));
        if (with_split) row.push_back(run.replicate_group.value_or(""));
        for (const auto& f : space.factors()) {
            auto it = run.factor_values.find(f.name);
            if (it == run.factor_values.end()) {
                row.emplace_back();
            } else if (const double* v = std::get_if<double>(&it->second)) {
                row.push_back(format_double(*v));
            } else {
                row.push_back(std::get<std::string>(it->second));
            }
        }
        write_csv_row(out, row);
    }
    atomic_write(path, out.str());
}

std::vector<RunRecord> read_manifest(const std::filesystem::path& path, const FactorSpace& space,
                                     const CategorySet& categories, bool with_split) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    CsvTable table = read_csv(in, path.string());

    auto require_column = [&](std::string_view name) {
        int c = table.column(name);
        if (c < 0)
            throw ValidationError(path.string() + ": missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(c);
    };

    std::size_t id_col = require_column("run_id");
    std::size_t cat_col = require_column("true_category");
    std::size_t loc_col = require_column("true_location_s");
    std::size_t split_col = with_split ? require_column("split") : 0;
    int group_col = table.column("replicate_group");

    std::vector<std::pair<std::size_t, const FactorDef*>> factor_cols;
    for (const auto& f : space.factors())
        factor_cols.emplace_back(require_column(f.name), &f);

    std::vector<RunRecord> runs;
    runs.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        RunRecord run;
        run.run_id = row[id_col];
        run.true_category = row[cat_col];
        if (!row[loc_col].empty())
            run.true_location_s = parse_double(row[loc_col], run.run_id + " true_location_s");
        if (with_split) run.split = split_from_string(row[split_col]);
        if (group_col >= 0 && !row[static_cast<std::size_t>(group_col)].empty())
            run.replicate_group = row[static_cast<std::size_t>(group_col)];
        for (const auto& [col, f] : factor_cols) {
            if (row[col].empty()) continue;
            if (f->is_continuous())
                run.factor_values[f->name] = parse_double(row[col], run.run_id + " " + f->name);
            else
                run.factor_values[f->name] = row[col];
        }
        validate_run(run, space, categories);
        runs.push_back(std::move(run));
    }
    return runs;
}

}  // namespace

void write_host_manifest(const std::filesystem::path& path, std::span<const RunRecord> runs,
                         const FactorSpace& space) {
    write_manifest(path, runs, space, true);
}

std::vector<RunRecord> read_host_manifest(const std::filesystem::path& path,
                                          const FactorSpace& space,
                                          const CategorySet& categories) {
    return read_manifest(path, space, categories, true);
}

void write_superset_manifest(const std::filesystem::path& path, std::span<const RunRecord> runs,
                             const FactorSpace& space) {
    write_manifest(path, runs, space, false);
}

std::vector<RunRecord> read_superset_manifest(const std::filesystem::path& path,
                                              const FactorSpace& space,
                                              const CategorySet& categories) {
    return read_manifest(path, space, categories, false);
}

void write_test_manifest(const std::filesystem::path& path,
                         std::span<const std::string> ordered_run_ids) {
    std::ostringstream out;
    out << "run_id\n";
    for (const auto& id : ordered_run_ids) out << id << '\n';
    atomic_write(path, out.str());
}

std::vector<std::string> read_test_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    CsvTable table = read_csv(in, path.string());
    if (table.header != std::vector<std::string>{"run_id"})
        throw ValidationError(path.string() + ": expected a single run_id column");
    std::vector<std::string> ids;
    ids.reserve(table.rows.size());
    for (const auto& row : table.rows) ids.push_back(row[0]);
    return ids;
}

void write_submission(const std::filesystem::path& path, const Submission& submission) {
    std::ostringstream out;
    out << "run_id,claimed_category,claimed_location_s\n";
    for (const auto& entry : submission.entries) {
        write_csv_row(out, {entry.run_id, entry.claimed_category,
                            location_field(entry.claimed_location_s)});
    }
    atomic_write(path, out.str());
}

Submission read_submission(const std::filesystem::path& path, std::string team_id,
                           std::int64_t timestamp) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    CsvTable table = read_csv(in, path.string());
    std::size_t id_col = 0, cat_col = 1, loc_col = 2;
    if (table.column("run_id") != 0 || table.column("claimed_category") != 1 ||
        table.column("claimed_location_s") != 2 || table.header.size() != 3)
        throw ValidationError(path.string() +
                              ": expected header run_id,claimed_category,claimed_location_s");

    Submission sub;
    sub.team_id = std::move(team_id);
    sub.timestamp = timestamp;
    for (const auto& row : table.rows) {
        PredictionEntry entry;
        entry.run_id = row[id_col];
        entry.claimed_category = row[cat_col];
        if (!row[loc_col].empty())
            entry.claimed_location_s = parse_double(row[loc_col], entry.run_id + " location");
        sub.entries.push_back(std::move(entry));
    }
    return sub;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

Interval interval_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(what + ": expected [lo, hi]");
    return Interval{j[0].get<double>(), j[1].get<double>()};
}

Term term_from_label(std::string_view label) {
    if (label == "1" || label == "(intercept)") return intercept_term();
    auto colon = label.find(':');
    if (colon != std::string_view::npos)
        return interaction_term(std::string(label.substr(0, colon)),
                                std::string(label.substr(colon + 1)));
    if (label.size() > 2 && label.substr(label.size() - 2) == "^2")
        return quadratic_term(std::string(label.substr(0, label.size() - 2)));
    return main_term(std::string(label));
}

TermSpec terms_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + ": terms must be an array of labels");
    std::vector<Term> terms;
    for (const auto& t : j) terms.push_back(term_from_label(t.get<std::string>()));
    return TermSpec(std::move(terms));
}

TruthModel truth_model_from(const json& j, const std::string& what) {
    TruthModel model;
    model.terms = terms_from_json(j.at("terms"), what);
    model.beta = j.at("beta").get<std::vector<double>>();
    return model;
}

ScoreWeights weights_from(const json& j) {
    ScoreWeights weights;
    weights.w_det = j.at("w_det").get<double>();
    weights.w_iden = j.at("w_iden").get<double>();
    weights.w_loc = j.at("w_loc").get<double>();
    if (j.contains("no_source_weight"))
        weights.no_source_weight = j.at("no_source_weight").get<double>();
    if (j.contains("loc_tolerance_s"))
        weights.loc_tolerance_s = j.at("loc_tolerance_s").get<double>();
    validate_weights(weights);
    return weights;
}

SplitConfig split_config_from(const json& j, const FactorSpace& space) {
    SplitConfig config;
    if (j.contains("train_ranges"))
        for (const auto& [name, r] : j.at("train_ranges").items())
            config.train_ranges[name] = interval_from(r, "train_ranges." + name);
    if (j.contains("public_ranges"))
        for (const auto& [name, r] : j.at("public_ranges").items())
            config.public_ranges[name] = interval_from(r, "public_ranges." + name);
    if (j.contains("level_fractions"))
        for (const auto& [name, f] : j.at("level_fractions").items()) {
            LevelFractions fr;
            fr.train = f.at("train").get<double>();
            fr.public_test = f.at("public").get<double>();
            fr.private_test = f.at("private").get<double>();
            config.level_fractions[name] = fr;
        }
    if (j.contains("holes"))
        for (const auto& h : j.at("holes")) {
            HoleBox hole;
            for (const auto& [name, r] : h.at("box").items())
                hole.box[name] = interval_from(r, "hole box." + name);
            for (const auto& s : h.at("excludes"))
                hole.excludes.insert(split_from_string(s.get<std::string>()));
            config.holes.push_back(std::move(hole));
        }
    auto targets_from = [&](const json& t) {
        SplitTargets targets;
        for (const auto& [category, count] : t.items())
            targets.per_category[category] = count.get<int>();
        return targets;
    };
    const json& targets = j.at("targets");
    config.train_targets = targets_from(targets.at("train"));
    config.public_targets = targets_from(targets.at("public"));
    config.private_targets = targets_from(targets.at("private"));
    if (j.contains("no_source_fraction")) {
        const json& f = j.at("no_source_fraction");
        config.no_source_fraction_train = f.at("train").get<double>();
        config.no_source_fraction_public = f.at("public").get<double>();
        config.no_source_fraction_private = f.at("private").get<double>();
    }
    // A band can be given directly or derived from a current/dream prior pair.
    if (j.contains("bands"))
        for (const auto& [name, b] : j.at("bands").items()) {
            if (b.is_array()) {
                config.bands[name] = interval_from(b, "bands." + name);
            } else {
                PriorCurve current{b.at("current")[0].get<double>(),
                                   b.at("current")[1].get<double>()};
                PriorCurve dream{b.at("dream")[0].get<double>(),
                                 b.at("dream")[1].get<double>()};
                config.bands[name] = interesting_band(current, dream, space.at(name).range);
            }
        }
    if (j.contains("emphasis")) {
        config.w_in = j.at("emphasis").at("w_in").get<double>();
        config.w_out = j.at("emphasis").at("w_out").get<double>();
    }
    if (j.contains("replicate_count")) config.replicate_count = j.at("replicate_count").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    return config;
}

}  // namespace

CompetitionConfig load_competition_config(const std::filesystem::path& path) {
    json j = parse_json_file(path);
    CompetitionConfig config;
    try {
        std::vector<FactorDef> factors;
        for (const auto& f : j.at("factors")) {
            FactorDef def;
            def.name = f.at("name").get<std::string>();
            std::string kind = f.at("kind").get<std::string>();
            if (kind == "continuous") {
                def.kind = FactorDef::Kind::Continuous;
                def.range = interval_from(f.at("range"), "factor " + def.name);
            } else if (kind == "categorical") {
                def.kind = FactorDef::Kind::Categorical;
                def.levels = f.at("levels").get<std::vector<std::string>>();
            } else {
                throw ConfigError("factor " + def.name + ": unknown kind '" + kind + "'");
            }
            if (f.contains("nuisance")) def.nuisance = f.at("nuisance").get<bool>();
            factors.push_back(std::move(def));
        }
        config.space = FactorSpace(std::move(factors));
        config.categories = CategorySet(j.at("categories").get<std::vector<std::string>>());
        config.split = split_config_from(j.at("split"), config.space);
        config.weights = weights_from(j.at("weights"));
        if (j.contains("policy")) {
            config.policy.max_total_submissions =
                j.at("policy").at("max_total_submissions").get<int>();
            config.policy.max_daily_submissions =
                j.at("policy").at("max_daily_submissions").get<int>();
        }
        validate_policy(config.policy);
        if (j.contains("paths")) {
            const json& p = j.at("paths");
            if (p.contains("superset")) config.paths.superset = p.at("superset");
            if (p.contains("host_manifest")) config.paths.host_manifest = p.at("host_manifest");
            if (p.contains("test_manifest")) config.paths.test_manifest = p.at("test_manifest");
            if (p.contains("leaderboard")) config.paths.leaderboard = p.at("leaderboard");
        }
        std::set<std::string> distinct{config.paths.superset, config.paths.host_manifest,
                                       config.paths.test_manifest, config.paths.leaderboard};
        if (distinct.size() != 4) throw ConfigError("config paths must be distinct");
        validate_split_config(config.split, config.space, config.categories);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config;
}

SyntheticTruth load_truth(const std::filesystem::path& path, const CompetitionConfig& config) {
    json j = parse_json_file(path);
    SyntheticTruth truth;
    try {
        for (const auto& t : j.at("teams"))
            truth.teams.push_back({t.at("id").get<std::string>(), t.at("offset").get<double>()});
        for (const auto& [category, m] : j.at("detect").items())
            truth.per_category[category].detect = truth_model_from(m, "detect." + category);
        for (const auto& [category, m] : j.at("identify").items())
            truth.per_category[category].identify = truth_model_from(m, "identify." + category);
        truth.no_source_correct = truth_model_from(j.at("no_source"), "no_source");
        truth.log_loc_scale = truth_model_from(j.at("loc_scale"), "loc_scale");
        if (j.contains("confusion_bias"))
            for (const auto& [category, row] : j.at("confusion_bias").items())
                for (const auto& [claimed, weight] : row.items())
                    truth.confusion_bias[category][claimed] = weight.get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    validate_truth(truth, config.space, config.categories);
    return truth;
}

std::vector<ScoreWeights> load_weight_candidates(const std::filesystem::path& path) {
    json j = parse_json_file(path);
    if (!j.is_array()) throw ConfigError(path.string() + ": expected a JSON array of weightings");
    std::vector<ScoreWeights> candidates;
    for (const auto& w : j) candidates.push_back(weights_from(w));
    return candidates;
}

// ---------------------------------------------------------------------------
// Leaderboard persistence
// ---------------------------------------------------------------------------

void save_board(const std::filesystem::path& path, const Leaderboard& board) {
    json teams = json::object();
    for (const auto& [team, state] : board.teams()) {
        json per_day = json::object();
        for (const auto& [day, count] : state.per_day) per_day[std::to_string(day)] = count;
        teams[team] = {{"best_public_score", state.entry.best_public_score},
                       {"best_private_score", state.entry.best_private_score},
                       {"best_submission_timestamp", state.entry.best_submission_timestamp},
                       {"submission_count", state.entry.submission_count},
                       {"last_timestamp", state.last_timestamp},
                       {"per_day", per_day}};
    }
    json j = {{"teams", teams}};
    atomic_write(path, j.dump(2) + "\n");
}

Leaderboard load_board(const std::filesystem::path& path) {
    Leaderboard board;
    if (!std::filesystem::exists(path)) return board;
    json j = parse_json_file(path);
    std::map<std::string, Leaderboard::TeamState> teams;
    try {
        for (const auto& [team, s] : j.at("teams").items()) {
            Leaderboard::TeamState state;
            state.entry.team_id = team;
            state.entry.best_public_score = s.at("best_public_score").get<double>();
            state.entry.best_private_score = s.at("best_private_score").get<double>();
            state.entry.best_submission_timestamp =
                s.at("best_submission_timestamp").get<std::int64_t>();
            state.entry.submission_count = s.at("submission_count").get<int>();
            state.last_timestamp = s.at("last_timestamp").get<std::int64_t>();
            for (const auto& [day, count] : s.at("per_day").items())
                state.per_day[std::stoll(day)] = count.get<int>();
            teams[team] = std::move(state);
        }
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    board.restore(std::move(teams));
    return board;
}

std::string board_to_json(std::span<const LeaderboardEntry> entries) {
    json out = json::array();
    for (const auto& e : entries)
        out.push_back({{"team_id", e.team_id},
                       {"best_public_score", e.best_public_score},
                       {"best_private_score", e.best_private_score},
                       {"best_submission_timestamp", e.best_submission_timestamp},
                       {"submission_count", e.submission_count}});
    return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string fit_report_json(const GlmFit& fit, double lack_of_fit_p) {
    json terms = json::array();
    for (const auto& t : fit.terms.terms()) terms.push_back(t.label());
    json coefficients = json::object();
    json standard_errors = json::object();
    for (std::size_t i = 0; i < fit.column_names.size(); ++i) {
        coefficients[fit.column_names[i]] = fit.beta[static_cast<Eigen::Index>(i)];
        standard_errors[fit.column_names[i]] =
            std::sqrt(std::max(0.0, fit.covariance(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(i))));
    }
    json j = {{"family", fit.family == Family::BinomialLogit ? "binomial-logit"
                                                             : "gaussian-identity"},
              {"terms", terms},
              {"coefficients", coefficients},
              {"standard_errors", standard_errors},
              {"deviance", fit.deviance},
              {"n", fit.n},
              {"lack_of_fit_p", lack_of_fit_p},
              {"convergence",
               {{"iterations", fit.convergence.iterations},
                {"final_deviance_change", fit.convergence.final_deviance_change},
                {"deviance_trace", fit.convergence.deviance_trace}}}};
    if (fit.family == Family::GaussianIdentity) j["sigma2"] = fit.sigma2;
    return j.dump(2) + "\n";
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& matrix) {
    std::ostringstream out;
    out << "true,predicted,count,proportion\n";
    for (std::size_t r = 0; r < matrix.row_labels.size(); ++r)
        for (std::size_t c = 0; c < matrix.col_labels.size(); ++c)
            write_csv_row(out, {matrix.row_labels[r], matrix.col_labels[c],
                                std::to_string(matrix.counts[r][c]),
                                matrix.proportions[r][c] ? format_double(*matrix.proportions[r][c])
                                                         : std::string()});
    atomic_write(path, out.str());
}

void write_agreement_csv(const std::filesystem::path& path, const AgreementTable& table) {
    std::ostringstream out;
    out << "class_a,class_b,count,fraction\n";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            write_csv_row(out, {std::string(to_string(AgreementTable::kClasses[r])),
                                std::string(to_string(AgreementTable::kClasses[c])),
                                std::to_string(table.counts[r][c]),
                                format_double(table.fractions[r][c])});
    atomic_write(path, out.str());
}

void write_bars_csv(const std::filesystem::path& path, std::span<const SourceOutcomeRow> rows) {
    std::ostringstream out;
    out << "team,category,n,prop_i,prop_d,prop_x\n";
    for (const auto& row : rows)
        write_csv_row(out, {row.team_id, row.category, std::to_string(row.n),
                            format_double(row.prop_i), format_double(row.prop_d),
                            format_double(row.prop_x)});
    atomic_write(path, out.str());
}

void write_scatter_csv(const std::filesystem::path& path,
                       std::span<const ScatterRecord> records) {
    std::ostringstream out;
    out << "run_id,x,y,class\n";
    for (const auto& r : records)
        write_csv_row(out, {r.run_id, format_double(r.x), format_double(r.y), r.outcome});
    atomic_write(path, out.str());
}

namespace {

double axis_value(const FactorValues& at, const std::string& factor) {
    auto it = at.find(factor);
    if (it == at.end()) throw ConfigError("grid point missing axis factor '" + factor + "'");
    return std::get<double>(it->second);
}

}  // namespace

void write_surface_csv(const std::filesystem::path& path, const Surface& surface,
                       const std::string& x_factor, const std::string& y_factor) {
    std::ostringstream out;
    out << "x,y,estimate,se,lower,upper\n";
    for (const auto& p : surface.points)
        write_csv_row(out, {format_double(axis_value(p.at, x_factor)),
                            format_double(axis_value(p.at, y_factor)), format_double(p.estimate),
                            format_double(p.se_eta), format_double(p.lower),
                            format_double(p.upper)});
    atomic_write(path, out.str());
}

void write_difference_csv(const std::filesystem::path& path, const DifferenceSurface& surface,
                          const std::string& x_factor, const std::string& y_factor) {
    std::ostringstream out;
    out << "x,y,estimate,se,lower,upper,raw_p,adj_p,bucket\n";
    constexpr double z95 = 1.959963984540054;
    for (const auto& p : surface.points) {
        std::vector<std::string> row = {format_double(axis_value(p.at, x_factor)),
                                        format_double(axis_value(p.at, y_factor)),
                                        format_double(p.delta), format_double(p.se),
                                        format_double(p.delta - z95 * p.se),
                                        format_double(p.delta + z95 * p.se)};
        if (p.has_p) {
            row.push_back(format_double(p.raw_p));
            row.push_back(format_double(p.adjusted_p));
            row.emplace_back(to_string(p.bucket));
        } else {
            row.emplace_back();
            row.emplace_back();
            row.emplace_back("degenerate");
        }
        write_csv_row(out, row);
    }
    atomic_write(path, out.str());
}

void write_pa_csv(const std::filesystem::path& path, std::span<const FactorValues> grid,
                  std::span<const double> pa, const std::string& x_factor,
                  const std::string& y_factor) {
    std::ostringstream out;
    out << "x,y,pa\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        write_csv_row(out, {format_double(axis_value(grid[i], x_factor)),
                            format_double(axis_value(grid[i], y_factor)),
                            format_double(pa[i])});
    atomic_write(path, out.str());
}

void write_invariant_report(const std::filesystem::path& path, const InvariantReport& report) {
    json rules = json::array();
    for (const auto& r : report.rules) {
        json rule = {{"name", r.name}, {"pass", r.pass}};
        if (!r.pass) {
            rule["detail"] = r.detail;
            rule["offenders"] = r.offenders;
        }
        rules.push_back(std::move(rule));
    }
    json j = {{"all_pass", report.all_pass()}, {"rules", rules}};
    atomic_write(path, j.dump(2) + "\n");
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace dcomp
