#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "specgame/run_config.hpp"

using namespace specgame;

TEST_SUITE_BEGIN("config");

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty object keeps every default") {
    RunConfig cfg = parse_config("{}");
    CHECK(cfg.p_success == 0.95);
    CHECK(cfg.channel.snr_db == 3.0);
    CHECK(cfg.channel.samples_per_frame == 16);
    CHECK(cfg.occupancy.p_occupied == 0.5);
    CHECK(cfg.defender_train.epochs == 50);
    CHECK(cfg.surrogate_train.epochs == 50);
    CHECK(cfg.defender_train.batch_size == 32);
    CHECK(cfg.defender_train.learning_rate == 1e-3);
    CHECK(cfg.n_dataset == 1000);
    CHECK(cfg.n_eval == 10000);
    CHECK(cfg.train_split == 0.8);
    CHECK(cfg.replications == 10);
    CHECK(cfg.attack_cost == 0.3);
    CHECK(cfg.level_cost_c1 == 0.1);
    CHECK(cfg.level_cost_c2 == 0.1);
    CHECK(cfg.reward_kind == RewardKind::throughput);
    CHECK(cfg.fp.rounds == 2000);
    CHECK(cfg.fp.tie_break == TieBreak::stay);
    CHECK(cfg.min_accuracy == 0.95);
    CHECK(cfg.master_seed == 20250815ull);
}

TEST_CASE("overrides land in the right fields") {
    RunConfig cfg = parse_config(R"({
        "channel": {"snr_db": 10.0, "samples_per_frame": 8},
        "occupancy": {"p_occupied": 0.3},
        "defender_train": {"epochs": 7},
        "surrogate_train": {"epochs": 3, "batch_size": 16},
        "grid": {"start": 0.1, "stop": 0.5, "step": 0.2},
        "level_costs": {"c1": 0.25},
        "reward_kind": "success_ratio",
        "fp": {"rounds": 10, "tie_break": "interval-midpoint", "mode": "sampled-action-average",
               "init_belief_defender": 0.2, "init_belief_adversary": 0.9},
        "master_seed": 42
    })");
    CHECK(cfg.channel.snr_db == 10.0);
    CHECK(cfg.channel.samples_per_frame == 8);
    CHECK(cfg.channel.rayleigh_scale == 1.0);  // untouched sibling keeps default
    CHECK(cfg.occupancy.p_occupied == 0.3);
    CHECK(cfg.defender_train.epochs == 7);
    CHECK(cfg.defender_train.batch_size == 32);
    CHECK(cfg.surrogate_train.epochs == 3);
    CHECK(cfg.surrogate_train.batch_size == 16);
    CHECK(cfg.grid_start == 0.1);
    CHECK(cfg.grid_stop == 0.5);
    CHECK(cfg.grid_step == 0.2);
    CHECK(cfg.level_cost_c1 == 0.25);
    CHECK(cfg.level_cost_c2 == 0.1);
    CHECK(cfg.reward_kind == RewardKind::success_ratio);
    CHECK(cfg.fp.rounds == 10);
    CHECK(cfg.fp.tie_break == TieBreak::interval_midpoint);
    CHECK(cfg.fp.mode == FpMode::sampled_action_average);
    CHECK(cfg.fp.init_belief_D == 0.2);
    CHECK(cfg.fp.init_belief_A == 0.9);
    CHECK(cfg.master_seed == 42ull);
}

TEST_CASE("unknown keys are rejected with scoped names") {
    CHECK(parse_error(R"({"bogus": 1})").find("unknown key \"bogus\"") != std::string::npos);
    CHECK(parse_error(R"({"channel": {"bogus": 1}})").find("channel.bogus") !=
          std::string::npos);
    CHECK(parse_error(R"({"fp": {"weird": 2}})").find("fp.weird") != std::string::npos);
    CHECK(parse_error(R"({"grid": {"granularity": 0.1}})").find("grid.granularity") !=
          std::string::npos);
    CHECK(parse_error(R"({"defender_train": {"optimizer": "sgd"}})")
              .find("defender_train.optimizer") != std::string::npos);
}

TEST_CASE("malformed documents are diagnosed") {
    CHECK(parse_error("{not json").find("invalid JSON") != std::string::npos);
    CHECK(parse_error("[1, 2]").find("top level must be an object") != std::string::npos);
    CHECK_THROWS_AS(parse_config(R"({"reward_kind": "profit"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"fp": {"tie_break": "coin"}})"), std::invalid_argument);
}

TEST_CASE("semantic validation") {
    CHECK_THROWS_AS(parse_config(R"({"p_success": 1.5})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"train_split": 1.0})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"step": 0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"start": 0.6, "stop": 0.4}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"defender_train": {"epochs": 0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"replications": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"attack_cost": -0.1})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"occupancy": {"p_occupied": 1.25}})"),
                    std::invalid_argument);
}

TEST_CASE("grid endpoints are exact and the stop knot is kept") {
    RunConfig cfg;
    std::vector<double> g = cfg.grid();
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    for (std::size_t k = 1; k < g.size(); ++k)
        CHECK(g[k] - g[k - 1] == doctest::Approx(0.05).epsilon(1e-9));

    cfg.grid_start = 0.1;
    cfg.grid_stop = 0.35;
    cfg.grid_step = 0.1;  // stop is not on the lattice: last knot stays at 0.3
    g = cfg.grid();
    REQUIRE(g.size() == 3);
    CHECK(g.back() == doctest::Approx(0.3));

    cfg.grid_start = 0.0;
    cfg.grid_stop = 0.2;
    cfg.grid_step = 0.1;
    g = cfg.grid();
    REQUIRE(g.size() == 3);
    CHECK(g.back() == 0.2);
}

TEST_CASE("engagement configs inherit the run settings") {
    RunConfig cfg = parse_config(R"({"n_eval": 500, "n_observe": 200, "master_seed": 9,
                                     "surrogate_train": {"epochs": 4}})");
    EngagementConfig e = cfg.engagement(0.35, true);
    CHECK(e.defense_level == 0.35);
    CHECK(e.attack_on);
    CHECK(e.n_eval == 500);
    CHECK(e.n_observe == 200);
    CHECK(e.master_seed == 9ull);
    CHECK(e.surrogate_train.epochs == 4);
    CHECK(e.ch_defender.snr_db == cfg.channel.snr_db);
    CHECK(e.ch_adversary.snr_db == cfg.channel.snr_db);
    CHECK(e.stream_base == (1ull << 48));
    CHECK(!cfg.engagement(0.0, false).attack_on);
}

TEST_CASE("canonical dump round-trips and hashes stably") {
    RunConfig cfg = parse_config(R"({"master_seed": 77, "n_eval": 123,
                                     "reward_kind": "success_ratio"})");
    std::string text = dump_config(cfg);
    CHECK(text.find("\"master_seed\": 77") != std::string::npos);
    RunConfig back = parse_config(text);
    CHECK(dump_config(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));

    RunConfig other = cfg;
    other.n_eval = 124;
    CHECK(config_hash(other) != config_hash(cfg));

    // Keys are emitted in sorted order, so the dump is canonical.
    CHECK(text.find("attack_cost") < text.find("channel"));
    CHECK(text.find("channel") < text.find("master_seed"));
}

TEST_CASE("config files load from disk") {
    const std::string path = "run_config_test.json";
    {
        std::ofstream out(path);
        out << R"({"n_dataset": 64, "master_seed": 5})";
    }
    RunConfig cfg = load_config(path);
    CHECK(cfg.n_dataset == 64);
    CHECK(cfg.master_seed == 5ull);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config("no_such_config.json"), std::runtime_error);
}

TEST_CASE("defender training follows the stream layout") {
    RunConfig cfg = parse_config(R"({
        "channel": {"samples_per_frame": 8},
        "n_dataset": 60,
        "defender_train": {"epochs": 2, "batch_size": 16},
        "master_seed": 13
    })");
    DefenderBundle a = train_defender(cfg);
    CHECK(a.model.samples == 8);
    CHECK(a.test_accuracy >= 0.0);
    CHECK(a.test_accuracy <= 1.0);
    CHECK(a.model.train_accuracy == a.test_accuracy);
    CHECK(a.model.train_seed == 13ull);

    DefenderBundle b = train_defender(cfg);
    CHECK(a.model.params == b.model.params);
    CHECK(a.test_accuracy == b.test_accuracy);

    cfg.master_seed = 14;
    DefenderBundle c = train_defender(cfg);
    CHECK(a.model.params != c.model.params);
}

TEST_SUITE_END();
