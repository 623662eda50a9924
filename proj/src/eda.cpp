#include "dcomp/eda.hpp"

#include <algorithm>
#include <unordered_map>

namespace dcomp {

long long ConfusionMatrix::row_total(std::size_t r) const {
    long long total_row = 0;
    for (long long c : counts[r]) total_row += c;
    return total_row;
}

namespace {

void fill_proportions(ConfusionMatrix& m) {
    m.proportions.assign(m.counts.size(),
                         std::vector<std::optional<double>>(m.col_labels.size(), std::nullopt));
    m.total = 0;
    for (std::size_t r = 0; r < m.counts.size(); ++r) {
        long long row_total = m.row_total(r);
        m.total += row_total;
        if (row_total == 0) continue;
        for (std::size_t c = 0; c < m.counts[r].size(); ++c)
            m.proportions[r][c] = static_cast<double>(m.counts[r][c]) /
                                  static_cast<double>(row_total);
    }
}

int class_index(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::I: return 0;
        case OutcomeClass::D: return 1;
        case OutcomeClass::X: return 2;
        default: return -1;
    }
}

}  // namespace

ConfusionMatrix detection_confusion(std::span<const Evaluation> outcomes) {
    if (outcomes.empty()) throw ValidationError("detection_confusion: no outcomes");
    ConfusionMatrix m;
    m.row_labels = {"S", "NoS"};
    m.col_labels = {"S", "NoS"};
    m.counts.assign(2, std::vector<long long>(2, 0));
    for (const auto& ev : outcomes) {
        int row = ev.outcome.source_run() ? 0 : 1;
        bool claimed = ev.outcome.source_run() ? ev.outcome.det == 1
                                               : ev.outcome.outcome_class == OutcomeClass::FP;
        m.counts[row][claimed ? 0 : 1]++;
    }
    fill_proportions(m);
    return m;
}

ConfusionMatrix identification_confusion(std::span<const Evaluation> outcomes,
                                         const CategorySet& categories) {
    if (outcomes.empty()) throw ValidationError("identification_confusion: no outcomes");
    ConfusionMatrix m;
    m.row_labels = categories.names();
    m.col_labels = categories.names();
    m.col_labels.emplace_back(CategorySet::kNoSource);
    m.counts.assign(m.row_labels.size(), std::vector<long long>(m.col_labels.size(), 0));

    std::unordered_map<std::string_view, std::size_t> col;
    for (std::size_t i = 0; i < m.col_labels.size(); ++i) col.emplace(m.col_labels[i], i);

    for (const auto& ev : outcomes) {
        if (!ev.outcome.source_run()) continue;
        auto row_it = col.find(ev.run->true_category);
        auto col_it = col.find(ev.prediction->claimed_category);
        if (row_it == col.end() || col_it == col.end())
            throw ValidationError("identification_confusion: outcome with unknown category");
        m.counts[row_it->second][col_it->second]++;
    }
    fill_proportions(m);
    return m;
}

long long AgreementTable::row_total(int r) const {
    return counts[r][0] + counts[r][1] + counts[r][2];
}

long long AgreementTable::col_total(int c) const {
    return counts[0][c] + counts[1][c] + counts[2][c];
}

long long AgreementTable::off_diagonal_total() const {
    long long off = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (r != c) off += counts[r][c];
    return off;
}

AgreementTable team_agreement(std::span<const Evaluation> outcomes_a,
                              std::span<const Evaluation> outcomes_b) {
    std::unordered_map<std::string_view, const Evaluation*> b_by_run;
    for (const auto& ev : outcomes_b)
        if (ev.outcome.source_run()) b_by_run.emplace(ev.outcome.run_id, &ev);

    AgreementTable table;
    std::vector<std::string> mismatch;
    std::size_t matched = 0;
    for (const auto& ev : outcomes_a) {
        if (!ev.outcome.source_run()) continue;
        auto it = b_by_run.find(ev.outcome.run_id);
        if (it == b_by_run.end()) {
            mismatch.push_back("run " + ev.outcome.run_id + " only in outcomes_a");
            continue;
        }
        ++matched;
        table.counts[class_index(ev.outcome.outcome_class)]
                    [class_index(it->second->outcome.outcome_class)]++;
        table.total++;
    }
    if (matched != b_by_run.size())
        for (const auto& [run_id, ev] : b_by_run) {
            (void)ev;
            mismatch.push_back("run " + std::string(run_id) + " only in outcomes_b");
        }
    if (!mismatch.empty()) throw ValidationError(std::move(mismatch));

    if (table.total > 0)
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                table.fractions[r][c] =
                    static_cast<double>(table.counts[r][c]) / static_cast<double>(table.total);
    return table;
}

std::vector<SourceOutcomeRow> outcome_by_source(
    const std::map<std::string, std::vector<Evaluation>>& outcomes_by_team) {
    if (outcomes_by_team.empty()) throw ValidationError("outcome_by_source: no teams");

    // All teams must cover the identical run set.
    const auto& first = outcomes_by_team.begin()->second;
    std::vector<std::string> reference;
    for (const auto& ev : first) reference.push_back(ev.outcome.run_id);
    std::sort(reference.begin(), reference.end());
    for (const auto& [team, outcomes] : outcomes_by_team) {
        std::vector<std::string> ids;
        for (const auto& ev : outcomes) ids.push_back(ev.outcome.run_id);
        std::sort(ids.begin(), ids.end());
        if (ids != reference)
            throw ValidationError("outcome_by_source: team " + team +
                                  " covers a different run set");
    }

    // Order teams by fraction of fully correct answers (class I or TN).
    std::vector<std::pair<double, std::string>> order;
    for (const auto& [team, outcomes] : outcomes_by_team) {
        long long correct = 0;
        for (const auto& ev : outcomes)
            if (ev.outcome.outcome_class == OutcomeClass::I ||
                ev.outcome.outcome_class == OutcomeClass::TN)
                ++correct;
        order.emplace_back(static_cast<double>(correct) / static_cast<double>(outcomes.size()),
                           team);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<SourceOutcomeRow> rows;
    for (const auto& [score, team] : order) {
        (void)score;
        const auto& outcomes = outcomes_by_team.at(team);
        std::map<std::string, std::array<long long, 3>> tallies;
        for (const auto& ev : outcomes) {
            if (!ev.outcome.source_run()) continue;
            tallies[ev.run->true_category][class_index(ev.outcome.outcome_class)]++;
        }
        for (const auto& [category, t] : tallies) {
            SourceOutcomeRow row;
            row.team_id = team;
            row.category = category;
            row.n = t[0] + t[1] + t[2];
            row.prop_i = static_cast<double>(t[0]) / static_cast<double>(row.n);
            row.prop_d = static_cast<double>(t[1]) / static_cast<double>(row.n);
            row.prop_x = static_cast<double>(t[2]) / static_cast<double>(row.n);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

bool ScatterFilter::matches(const RunRecord& run) const {
    if (category && run.true_category != *category) return false;
    if (split && run.split != *split) return false;
    for (const auto& [factor, level] : level_equals) {
        auto it = run.factor_values.find(factor);
        const std::string* v = it == run.factor_values.end()
                                   ? nullptr
                                   : std::get_if<std::string>(&it->second);
        if (!v || *v != level) return false;
    }
    for (const auto& [factor, range] : ranges) {
        auto it = run.factor_values.find(factor);
        const double* v = it == run.factor_values.end() ? nullptr
                                                        : std::get_if<double>(&it->second);
        if (!v || !range.contains(*v)) return false;
    }
    return true;
}

namespace {

double continuous_value(const RunRecord& run, const FactorSpace& space, const std::string& name) {
    const FactorDef& f = space.at(name);
    if (!f.is_continuous())
        throw ConfigError("scatter export: factor '" + name + "' is not continuous");
    auto it = run.factor_values.find(name);
    if (it == run.factor_values.end())
        throw ValidationError("run " + run.run_id + ": missing value for factor '" + name + "'");
    return std::get<double>(it->second);
}

}  // namespace

std::vector<ScatterRecord> export_scatter(std::span<const Evaluation> outcomes,
                                          const FactorSpace& space, const std::string& x_factor,
                                          const std::string& y_factor,
                                          const ScatterFilter& filter) {
    space.at(x_factor);
    space.at(y_factor);
    std::vector<ScatterRecord> records;
    for (const auto& ev : outcomes) {
        if (!filter.matches(*ev.run)) continue;
        records.push_back({ev.outcome.run_id, continuous_value(*ev.run, space, x_factor),
                           continuous_value(*ev.run, space, y_factor),
                           std::string(to_string(ev.outcome.outcome_class))});
    }
    return records;
}

std::vector<ScatterRecord> export_scatter_pair(std::span<const Evaluation> outcomes_a,
                                               std::span<const Evaluation> outcomes_b,
                                               const FactorSpace& space,
                                               const std::string& x_factor,
                                               const std::string& y_factor,
                                               const ScatterFilter& filter) {
    space.at(x_factor);
    space.at(y_factor);
    std::unordered_map<std::string_view, const Evaluation*> b_by_run;
    for (const auto& ev : outcomes_b) b_by_run.emplace(ev.outcome.run_id, &ev);

    std::vector<ScatterRecord> records;
    for (const auto& ev : outcomes_a) {
        if (!filter.matches(*ev.run)) continue;
        auto it = b_by_run.find(ev.outcome.run_id);
        if (it == b_by_run.end())
            throw ValidationError("scatter export: run " + ev.outcome.run_id +
                                  " missing from the second team's outcomes");
        records.push_back({ev.outcome.run_id, continuous_value(*ev.run, space, x_factor),
                           continuous_value(*ev.run, space, y_factor),
                           std::string(to_string(ev.outcome.outcome_class)) + "/" +
                               std::string(to_string(it->second->outcome.outcome_class))});
    }
    return records;
}

}  // namespace dcomp
