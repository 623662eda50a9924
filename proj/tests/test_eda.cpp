#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <optional>

#include "dcomp/eda.hpp"
#include "dcomp/rng.hpp"
#include "dcomp/scoring.hpp"
#include "fixtures.hpp"

using namespace dcomp;
using fixtures::run;

namespace {

// Key plus two submissions whose per-run outcome-class pairs follow the given
// 3x3 counts (rows: team A's I/D/X, columns: team B's).
struct PairFixture {
    std::vector<RunRecord> key;
    Submission sub_a, sub_b;
    std::optional<ValidatedSubmission> validated_a, validated_b;
    std::vector<Evaluation> evals_a, evals_b;

    explicit PairFixture(const long long counts[3][3], const std::string& category = "WGPu") {
        auto claim_for = [&](int cls, const RunRecord& r) -> PredictionEntry {
            if (cls == 0) return {r.run_id, r.true_category, r.true_location_s};
            if (cls == 1)
                return {r.run_id, r.true_category == "HEU" ? "WGPu" : "HEU", r.true_location_s};
            return {r.run_id, "NO_SOURCE", std::nullopt};
        };
        int next = 0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (long long i = 0; i < counts[a][b]; ++i) {
                    RunRecord r = run("p" + std::to_string(next++), category, 25.0);
                    sub_a.entries.push_back(claim_for(a, r));
                    sub_b.entries.push_back(claim_for(b, r));
                    key.push_back(std::move(r));
                }
            }
        }
        sub_a.team_id = "a";
        sub_b.team_id = "b";
        auto manifest = test_run_ids(key);
        auto categories = fixtures::make_categories();
        validated_a.emplace(validate_submission(sub_a, manifest, categories));
        validated_b.emplace(validate_submission(sub_b, manifest, categories));
        evals_a = evaluate_submission(*validated_a, key);
        evals_b = evaluate_submission(*validated_b, key);
    }
};

struct EvalFixture {
    std::vector<RunRecord> key;
    Submission sub;
    std::optional<ValidatedSubmission> validated;
    std::vector<Evaluation> evals;

    EvalFixture(std::vector<RunRecord> k, Submission s) : key(std::move(k)), sub(std::move(s)) {
        validated.emplace(
            validate_submission(sub, test_run_ids(key), fixtures::make_categories()));
        evals = evaluate_submission(*validated, key);
    }
};

}  // namespace

TEST_CASE("detection confusion: all identified -> S row is (1, 0)") {
    auto key = std::vector<RunRecord>{run("r1", "WGPu", 10.0), run("r2", "HEU", 12.0)};
    EvalFixture fx(key, fixtures::perfect_submission(key));
    auto m = detection_confusion(fx.evals);
    CHECK(*m.proportions[0][0] == doctest::Approx(1.0));
    CHECK(*m.proportions[0][1] == doctest::Approx(0.0));
    CHECK_FALSE(m.row_has_data(1));
    CHECK_FALSE(m.proportions[1][0].has_value());
}

TEST_CASE("detection confusion: hand-counted mixed fixture") {
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0), run("r2", "WGPu", 10.0),
                                  run("r3", "HEU", 10.0), run("r4", "Co60", 10.0),
                                  run("r5", "NO_SOURCE", std::nullopt)};
    Submission sub;
    sub.team_id = "t";
    sub.entries = {{"r1", "WGPu", 10.0},
                   {"r2", "HEU", 11.0},  // detected, wrong id
                   {"r3", "HEU", 9.0},
                   {"r4", "NO_SOURCE", std::nullopt},  // missed
                   {"r5", "NO_SOURCE", std::nullopt}};
    EvalFixture fx(key, sub);
    auto m = detection_confusion(fx.evals);
    CHECK(m.counts[0][0] == 3);
    CHECK(m.counts[0][1] == 1);
    CHECK(m.counts[1][0] == 0);
    CHECK(m.counts[1][1] == 1);
    CHECK(*m.proportions[0][0] == doctest::Approx(0.75));
    CHECK(*m.proportions[0][1] == doctest::Approx(0.25));
    CHECK(*m.proportions[1][1] == doctest::Approx(1.0));
    CHECK(m.total == 5);
}

TEST_CASE("detection confusion rejects an empty outcome list") {
    CHECK_THROWS_AS(detection_confusion({}), ValidationError);
}

TEST_CASE("identification confusion: perfect identifier is diagonal") {
    auto categories = fixtures::make_categories();
    std::vector<RunRecord> key;
    for (std::size_t i = 0; i < categories.size(); ++i)
        key.push_back(run("r" + std::to_string(i), categories.names()[i], 10.0));
    EvalFixture fx(key, fixtures::perfect_submission(key));
    auto m = identification_confusion(fx.evals, categories);
    for (std::size_t r = 0; r < categories.size(); ++r)
        for (std::size_t c = 0; c < m.col_labels.size(); ++c)
            CHECK(m.counts[r][c] == (r == c ? 1 : 0));
}

TEST_CASE("identification confusion: every source missed lands in the NO_SOURCE column") {
    auto categories = fixtures::make_categories();
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0), run("r2", "HEU", 10.0)};
    Submission sub;
    sub.team_id = "t";
    sub.entries = {{"r1", "NO_SOURCE", std::nullopt}, {"r2", "NO_SOURCE", std::nullopt}};
    EvalFixture fx(key, sub);
    auto m = identification_confusion(fx.evals, categories);
    std::size_t nos = m.col_labels.size() - 1;
    CHECK(m.counts[1][nos] == 1);  // WGPu row
    CHECK(m.counts[0][nos] == 1);  // HEU row
    CHECK(m.total == 2);
}

TEST_CASE("identification confusion matches a brute-force count on a mixed fixture") {
    auto categories = fixtures::make_categories();
    std::vector<RunRecord> key;
    Submission sub;
    sub.team_id = "t";
    const char* truths[] = {"WGPu", "WGPu", "WGPu", "HEU",  "HEU",
                            "Co60", "I131", "Tc99m", "HEU+Tc99m", "HEU+Tc99m"};
    const char* claims[] = {"WGPu", "HEU",  "NO_SOURCE", "HEU",  "NO_SOURCE",
                            "Co60", "I131", "Tc99m",     "HEU", "HEU+Tc99m"};
    for (int i = 0; i < 10; ++i) {
        key.push_back(run("r" + std::to_string(i), truths[i], 10.0));
        bool claims_source = std::string(claims[i]) != "NO_SOURCE";
        sub.entries.push_back({"r" + std::to_string(i), claims[i],
                               claims_source ? std::optional(10.0) : std::nullopt});
    }
    EvalFixture fx(key, sub);
    auto m = identification_confusion(fx.evals, categories);

    // Independent recount straight from the fixture arrays.
    std::map<std::pair<std::string, std::string>, long long> naive;
    for (int i = 0; i < 10; ++i) naive[{truths[i], claims[i]}]++;
    for (std::size_t r = 0; r < m.row_labels.size(); ++r)
        for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
            auto it = naive.find({m.row_labels[r], m.col_labels[c]});
            CHECK(m.counts[r][c] == (it == naive.end() ? 0 : it->second));
        }
    CHECK(m.total == 10);
}

TEST_CASE("team agreement: identical outcomes have empty off-diagonals") {
    long long counts[3][3] = {{5, 0, 0}, {0, 3, 0}, {0, 0, 2}};
    PairFixture fx(counts);
    auto t = team_agreement(fx.evals_a, fx.evals_a);
    CHECK(t.off_diagonal_total() == 0);
    CHECK(t.total == 10);
}

TEST_CASE("team agreement reproduces the published cross-tab") {
    long long counts[3][3] = {{930, 4, 134}, {4, 1, 34}, {33, 10, 697}};
    PairFixture fx(counts);
    auto t = team_agreement(fx.evals_a, fx.evals_b);

    CHECK(t.total == 1847);
    const double published[3][3] = {{0.504, 0.002, 0.073},
                                    {0.002, 0.001, 0.018},
                                    {0.018, 0.005, 0.377}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            CHECK(t.counts[r][c] == counts[r][c]);
            CHECK(std::round(t.fractions[r][c] * 1000.0) / 1000.0 ==
                  doctest::Approx(published[r][c]));
        }
    CHECK(t.off_diagonal_total() == 219);
    CHECK(std::round(static_cast<double>(t.off_diagonal_total()) / t.total * 10000.0) / 10000.0 ==
          doctest::Approx(0.1186));
    // Marginals: team A identified 1068 and detected 39 more; team B 967 / 15.
    CHECK(t.row_total(0) == 1068);
    CHECK(t.row_total(1) == 39);
    CHECK(t.row_total(2) == 740);
    CHECK(t.col_total(0) == 967);
    CHECK(t.col_total(1) == 15);
    CHECK(t.col_total(2) == 865);
}

TEST_CASE("team agreement transposes when the teams swap") {
    long long counts[3][3] = {{12, 3, 5}, {1, 7, 2}, {4, 0, 9}};
    PairFixture fx(counts);
    auto ab = team_agreement(fx.evals_a, fx.evals_b);
    auto ba = team_agreement(fx.evals_b, fx.evals_a);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(ab.counts[r][c] == ba.counts[c][r]);
}

TEST_CASE("team agreement marginals reconcile on random fixtures") {
    Rng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        long long counts[3][3];
        long long total = 0;
        for (auto& row : counts)
            for (auto& c : row) {
                c = static_cast<long long>(rng.below(30));
                total += c;
            }
        if (total == 0) counts[0][0] = total = 1;
        PairFixture fx(counts);
        auto t = team_agreement(fx.evals_a, fx.evals_b);
        CHECK(t.total == total);
        long long sum = 0;
        double frac_sum = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                sum += t.counts[r][c];
                frac_sum += t.fractions[r][c];
            }
        CHECK(sum == t.total);
        CHECK(frac_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("team agreement names the symmetric difference on a run-set mismatch") {
    long long counts[3][3] = {{2, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    PairFixture fx(counts);
    auto shorter = fx.evals_b;
    shorter.pop_back();
    try {
        team_agreement(fx.evals_a, shorter);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.issues().size() == 1);
        CHECK(e.issues()[0].find("p1") != std::string::npos);
    }
}

TEST_CASE("outcome_by_source: single perfect team") {
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0), run("r2", "WGPu", 11.0),
                                  run("r3", "HEU", 12.0)};
    EvalFixture fx(key, fixtures::perfect_submission(key));
    std::map<std::string, std::vector<Evaluation>> by_team{{"solo", fx.evals}};
    auto rows = outcome_by_source(by_team);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.prop_i == doctest::Approx(1.0));
        CHECK(row.prop_d == doctest::Approx(0.0));
        CHECK(row.prop_x == doctest::Approx(0.0));
        CHECK(row.prop_i + row.prop_d + row.prop_x == doctest::Approx(1.0));
    }
}

TEST_CASE("outcome_by_source: two teams, hand-enumerated, ordered by overall correctness") {
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0), run("r2", "WGPu", 11.0),
                                  run("r3", "HEU", 12.0), run("r4", "NO_SOURCE", std::nullopt)};
    Submission good = fixtures::perfect_submission(key, "good");
    Submission poor;
    poor.team_id = "poor";
    poor.entries = {{"r1", "WGPu", 10.0},
                    {"r2", "HEU", 11.0},
                    {"r3", "NO_SOURCE", std::nullopt},
                    {"r4", "HEU", 3.0}};
    EvalFixture fx_good(key, good);
    EvalFixture fx_poor(key, poor);
    std::map<std::string, std::vector<Evaluation>> by_team{{"poor", fx_poor.evals},
                                                           {"good", fx_good.evals}};
    auto rows = outcome_by_source(by_team);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].team_id == "good");  // 4/4 correct vs 1/4
    CHECK(rows[2].team_id == "poor");

    for (const auto& row : rows) {
        if (row.team_id == "poor" && row.category == "WGPu") {
            CHECK(row.n == 2);
            CHECK(row.prop_i == doctest::Approx(0.5));
            CHECK(row.prop_d == doctest::Approx(0.5));
            CHECK(row.prop_x == doctest::Approx(0.0));
        }
        if (row.team_id == "poor" && row.category == "HEU") {
            CHECK(row.prop_x == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("outcome_by_source rejects mismatched coverage") {
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0), run("r2", "HEU", 11.0)};
    EvalFixture fx(key, fixtures::perfect_submission(key));
    auto partial = fx.evals;
    partial.pop_back();
    std::map<std::string, std::vector<Evaluation>> by_team{{"full", fx.evals},
                                                           {"partial", partial}};
    CHECK_THROWS_AS(outcome_by_source(by_team), ValidationError);
}

TEST_CASE("scatter export: filter semantics and record count") {
    auto space = fixtures::make_space();
    std::vector<RunRecord> key = {
        run("r1", "WGPu", 10.0, Split::Public, fixtures::values(2.0, 3.0, "1", "b1")),
        run("r2", "WGPu", 12.0, Split::Public, fixtures::values(5.0, 7.0, "0", "b2")),
        run("r3", "HEU", 14.0, Split::Private, fixtures::values(6.0, 9.0, "1", "b1")),
    };
    EvalFixture fx(key, fixtures::perfect_submission(key));

    ScatterFilter shielded_wgpu;
    shielded_wgpu.category = "WGPu";
    shielded_wgpu.level_equals["shield"] = "1";
    auto records = export_scatter(fx.evals, space, "speed", "snr", shielded_wgpu);
    REQUIRE(records.size() == 1);
    CHECK(records[0].run_id == "r1");
    CHECK(records[0].x == doctest::Approx(3.0));
    CHECK(records[0].y == doctest::Approx(2.0));
    CHECK(records[0].outcome == "I");

    ScatterFilter none;
    none.ranges["snr"] = {7.5, 8.0};
    CHECK(export_scatter(fx.evals, space, "speed", "snr", none).empty());

    ScatterFilter all;
    CHECK(export_scatter(fx.evals, space, "speed", "snr", all).size() == fx.evals.size());

    CHECK_THROWS_AS(export_scatter(fx.evals, space, "nope", "snr", all), ConfigError);
}

TEST_CASE("two-team scatter carries the class pair") {
    auto space = fixtures::make_space();
    std::vector<RunRecord> key = {run("r1", "WGPu", 10.0)};
    Submission hit = fixtures::perfect_submission(key, "hit");
    Submission miss;
    miss.team_id = "miss";
    miss.entries = {{"r1", "NO_SOURCE", std::nullopt}};
    EvalFixture fa(key, hit);
    EvalFixture fb(key, miss);
    auto records = export_scatter_pair(fa.evals, fb.evals, space, "speed", "snr", {});
    REQUIRE(records.size() == 1);
    CHECK(records[0].outcome == "I/X");
}

TEST_CASE("confusion counts reconcile with a naive recount on random submissions") {
    auto categories = fixtures::make_categories();
    std::vector<RunRecord> key;
    Rng rng(4242);
    for (int i = 0; i < 200; ++i) {
        bool source = rng.bernoulli(0.7);
        key.push_back(run("r" + std::to_string(i),
                          source ? categories.names()[rng.below(categories.size())]
                                 : std::string("NO_SOURCE"),
                          source ? std::optional(rng.uniform(0.0, 60.0)) : std::nullopt));
    }
    MockPattern random_pattern{MockPattern::Kind::Random, "", "", 0.0, 1234};
    auto mocks = generate_mock_submissions(key, std::vector{random_pattern}, categories);
    EvalFixture fx(key, mocks[0]);

    auto det = detection_confusion(fx.evals);
    long long naive[2][2] = {};
    for (const auto& ev : fx.evals) {
        int row = ev.run->has_source() ? 0 : 1;
        int col = ev.prediction->claims_source() ? 0 : 1;
        naive[row][col]++;
    }
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) CHECK(det.counts[r][c] == naive[r][c]);

    auto iden = identification_confusion(fx.evals, categories);
    long long iden_total = 0;
    for (std::size_t r = 0; r < iden.row_labels.size(); ++r) {
        iden_total += iden.row_total(r);
        if (iden.row_has_data(r)) {
            double sum = 0.0;
            for (auto& p : iden.proportions[r]) sum += p.value_or(0.0);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(iden_total == naive[0][0] + naive[0][1]);
}
