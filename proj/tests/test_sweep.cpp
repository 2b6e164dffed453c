#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tilelab/sweep.hpp"

using namespace tilelab;

namespace {

SweepConfig small_config() {
    SweepConfig cfg;
    cfg.pattern_spec = "k3";
    cfg.n_values = {12};
    cfg.base = BaseSpec::extremal(Rational(1, 4), 3);
    cfg.c_grid = {Rational(0), Rational(2), Rational(6)};
    cfg.trials = 8;
    cfg.seed = Seed{2024};
    cfg.budget = 40'000;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SweepConfig cfg = small_config();
    Pattern k3 = Pattern::named("k3");
    validate_config(cfg, k3);

    SweepConfig bad = cfg;
    bad.n_values = {10};  // not divisible by 3
    CHECK_THROWS_WITH_AS(validate_config(bad, k3), doctest::Contains("divisible"),
                         std::invalid_argument);
    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(validate_config(bad, k3), std::invalid_argument);
    bad = cfg;
    bad.c_grid = {Rational(2), Rational(1)};
    CHECK_THROWS_WITH_AS(validate_config(bad, k3), doctest::Contains("increasing"),
                         std::invalid_argument);
    bad = cfg;
    bad.c_grid.clear();
    CHECK_THROWS_AS(validate_config(bad, k3), std::invalid_argument);
}

TEST_CASE("sweep reproducibility and tally conservation") {
    SweepConfig cfg = small_config();
    SweepResult r1 = run_threshold_sweep(cfg);
    SweepResult r2 = run_threshold_sweep(cfg);
    REQUIRE(r1.rows.size() == 3);
    for (size_t i = 0; i < r1.rows.size(); ++i) {
        CHECK(r1.rows[i].found == r2.rows[i].found);
        CHECK(r1.rows[i].certified_no == r2.rows[i].certified_no);
        CHECK(r1.rows[i].unknown == r2.rows[i].unknown);
        CHECK(r1.rows[i].p == r2.rows[i].p);
        CHECK(r1.rows[i].found + r1.rows[i].certified_no + r1.rows[i].unknown == cfg.trials);
    }
}

TEST_CASE("triangle-free base with c=0 certifies no") {
    SweepConfig cfg = small_config();
    cfg.c_grid = {Rational(0)};
    SweepResult r = run_threshold_sweep(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].found == 0);
    CHECK(r.rows[0].certified_no == cfg.trials);
    CHECK(r.rows[0].p == 0.0);
}

TEST_CASE("complete base always tiles") {
    SweepConfig cfg = small_config();
    cfg.base = BaseSpec::explicit_graph(Graph::complete(12));
    cfg.c_grid = {Rational(0), Rational(1)};
    SweepResult r = run_threshold_sweep(cfg);
    for (const auto& row : r.rows) CHECK(row.found == cfg.trials);
}

TEST_CASE("per-seed outcomes are monotone in c under the coupling") {
    SweepConfig cfg = small_config();
    cfg.c_grid = {Rational(1, 2), Rational(1), Rational(2), Rational(4)};
    cfg.trials = 12;
    std::map<int, std::vector<TilingStatus>> per_trial;
    auto hook = [&](int, int c_index, int trial, const PerturbedSample&, const TrialOutcome& out) {
        auto& v = per_trial[trial];
        REQUIRE(static_cast<int>(v.size()) == c_index);
        v.push_back(out.status);
    };
    run_threshold_sweep(cfg, hook);
    for (auto& [trial, statuses] : per_trial) {
        bool seen_found = false;
        for (auto st : statuses) {
            if (seen_found) CHECK(st == TilingStatus::Found);
            if (st == TilingStatus::Found) seen_found = true;
        }
    }
}

TEST_CASE("csv schema") {
    SweepConfig cfg = small_config();
    cfg.n_values = {12};
    SweepResult r = run_threshold_sweep(cfg);
    std::string csv = to_csv(r);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,c,p,trials,found,certified_no,unknown,mean_coverage,wall_time_ms");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(cfg.n_values.size() * cfg.c_grid.size()));

    SweepResult empty;
    CHECK(to_csv(empty) == "n,c,p,trials,found,certified_no,unknown,mean_coverage,wall_time_ms\n");
}

TEST_CASE("csv rational formatting") {
    CHECK(csv_rational(Rational(1, 4)) == "0.25");
    CHECK(csv_rational(Rational(2)) == "2");
    CHECK(csv_rational(Rational(1, 3)) == "1/3");
    CHECK(csv_rational(Rational(-3, 4)) == "-0.75");
    CHECK(csv_rational(Rational(8)) == "8");
}

TEST_CASE("json round trip") {
    SweepConfig cfg = small_config();
    SweepResult r = run_threshold_sweep(cfg);
    auto j = to_json(r);
    SweepResult back = sweep_from_json(j);
    CHECK(back == r);
    // re-serialized json is identical
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("emit writes files") {
    SweepConfig cfg = small_config();
    cfg.c_grid = {Rational(1)};
    cfg.trials = 2;
    SweepResult r = run_threshold_sweep(cfg);
    emit(r, EmitFormat::Csv, "sweep_test_out.csv");
    emit(r, EmitFormat::Json, "sweep_test_out.json");
    std::ifstream csv("sweep_test_out.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,c,p,trials,found,certified_no,unknown,mean_coverage,wall_time_ms");
    std::ifstream js("sweep_test_out.json");
    nlohmann::json parsed;
    js >> parsed;
    CHECK(sweep_from_json(parsed) == r);
    std::remove("sweep_test_out.csv");
    std::remove("sweep_test_out.json");
    CHECK_THROWS_AS(emit(r, EmitFormat::Csv, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("extremal demo") {
    auto demo = run_extremal_demo("k3", 12, Rational(1, 4), {Rational(0), Rational(8)}, 6, Seed{9});
    CHECK(demo.epsilon == Rational(1, 4));  // b - a(|H|-1) = 3/4 - 2/4
    CHECK(demo.a == Rational(1, 4));
    CHECK(demo.b == Rational(3, 4));
    REQUIRE(demo.sweep.rows.size() == 2);
    // p = 0: no random edges, bipartite host, certified no; Y coverage zero
    CHECK(demo.sweep.rows[0].certified_no == 6);
    CHECK(demo.demo_rows[0].mean_class_y_coverage == 0.0);
    CHECK(demo.demo_rows[0].trials_meeting_eps == 0);
    // the demo honours the extremal constraint
    CHECK_THROWS_AS(run_extremal_demo("k3", 12, Rational(1, 3), {Rational(1)}, 2, Seed{9}),
                    std::invalid_argument);
}

TEST_CASE("base comparison coupling dominance") {
    auto cmp = run_base_comparison("k3", 12, Rational(1, 4),
                                   {Rational(1, 2), Rational(2), Rational(6)}, 8, Seed{31});
    CHECK(cmp.coupling_violations == 0);
    REQUIRE(cmp.empty_base.rows.size() == 3);
    REQUIRE(cmp.dense_base.rows.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(cmp.empty_base.rows[i].found <= cmp.dense_base.rows[i].found);
        CHECK(cmp.empty_base.rows[i].p == cmp.dense_base.rows[i].p);
        CHECK(cmp.empty_base.rows[i].found + cmp.empty_base.rows[i].certified_no +
                  cmp.empty_base.rows[i].unknown ==
              8);
    }
    CHECK(cmp.empty_base.metadata.base == "empty");
    CHECK(cmp.dense_base.metadata.base == "mindeg:1/4");
}
