#include <doctest.h>

#include "shapelab/config.hpp"

using namespace shapelab;

namespace {

const char* kSolveConfig = R"({
  "experiment": "solve",
  "seed": 3,
  "output_dir": "out",
  "plant": {"type": "pendulum", "dt": 0.05, "torque_limit": 2.0},
  "grid": {
    "dims": [
      {"min": -3.141592653589793, "max": 3.141592653589793, "count": 21, "periodic": true},
      {"min": -8.0, "max": 8.0, "count": 21}
    ],
    "action": {"min": -2.0, "max": 2.0, "count": 5},
    "interp": "multilinear"
  },
  "rewards": {
    "base": "pendulum_sparse",
    "terms": [
      {"potential": {"variant": "energy_error", "target_multiplier": 1.0},
       "weight": -1.0, "mode": "PBRS"}
    ]
  },
  "solver": {"gamma": 0.95, "tol": 1e-9, "max_iter": 50000, "tie_eps": 1e-6}
})";

}  // namespace

TEST_CASE("config parses and terms inherit the solver discount") {
    const ExperimentConfig cfg = parse_config(kSolveConfig, "test");
    CHECK(cfg.experiment == ExperimentKind::solve);
    CHECK(cfg.seed == 3);
    CHECK(cfg.is_pendulum());
    CHECK(cfg.grid.dims[0].periodic);
    CHECK(cfg.solver.gamma == 0.95);
    REQUIRE(cfg.rewards.terms.size() == 1);
    // pbrs_gamma omitted: defaults to the solver discount.
    CHECK(cfg.rewards.terms[0].pbrs_gamma == 0.95);
    CHECK(cfg.rewards.terms[0].weight == -1.0);
}

TEST_CASE("config round trips through its canonical serialization") {
    const ExperimentConfig cfg = parse_config(kSolveConfig, "test");
    const std::string text = serialize_config(cfg);
    const ExperimentConfig again = parse_config(text, "roundtrip");
    CHECK(serialize_config(again) == text);
}

TEST_CASE("reward spec round trips standalone") {
    const char* text = R"({
      "base": "table",
      "base_table": [0.0, 1.5, -2.0],
      "base_at_arrival": false,
      "terms": [
        {"potential": {"variant": "squared_exponential", "center": [0.0, 0.0], "sigma": 0.5},
         "weight": 2.0, "mode": "DRS"},
        {"potential": {"variant": "constant", "value": 3.0},
         "weight": 1.0, "mode": "PBRS", "pbrs_gamma": 1.0}
      ]
    })";
    const RewardSpec spec = parse_reward_spec(text, 0.9);
    CHECK(spec.base == BaseReward::table);
    CHECK_FALSE(spec.base_at_arrival);
    REQUIRE(spec.terms.size() == 2);
    CHECK(spec.terms[0].mode == ShapingMode::drs);
    CHECK(spec.terms[1].pbrs_gamma == 1.0);
    const std::string out = serialize_reward_spec(spec);
    const RewardSpec again = parse_reward_spec(out, 0.9);
    CHECK(serialize_reward_spec(again) == out);
}

TEST_CASE("config errors carry the offending path") {
    // Bad solver discount.
    std::string bad = kSolveConfig;
    bad.replace(bad.find("0.95"), 4, "1.10");
    CHECK_THROWS_WITH_AS(parse_config(bad, "test"), doctest::Contains("/solver/gamma"),
                         ConfigError);

    // Unknown potential variant.
    std::string unknown = kSolveConfig;
    unknown.replace(unknown.find("energy_error"), 12, "energy_wrong");
    CHECK_THROWS_WITH_AS(parse_config(unknown, "test"), doctest::Contains("variant"),
                         ConfigError);

    // Malformed JSON syntax.
    CHECK_THROWS_AS(parse_config("{", "test"), ConfigError);
}

TEST_CASE("experiment-specific validation") {
    // distribution without a seed is rejected.
    std::string dist = kSolveConfig;
    dist.replace(dist.find("\"solve\""), 7, "\"distribution\"");
    dist.replace(dist.find("\"seed\": 3,"), 10, "");
    CHECK_THROWS_WITH_AS(parse_config(dist, "test"), doctest::Contains("seed"), ConfigError);

    // compare requires candidate_rewards.
    std::string cmp = kSolveConfig;
    cmp.replace(cmp.find("\"solve\""), 7, "\"compare\"");
    CHECK_THROWS_WITH_AS(parse_config(cmp, "test"), doctest::Contains("compare"), ConfigError);

    // pendulum_sparse needs a pendulum plant.
    const char* bad_base = R"({
      "experiment": "solve",
      "plant": {"type": "gridworld", "width": 3, "height": 3, "goal": [2, 2]},
      "rewards": {"base": "pendulum_sparse", "terms": []}
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad_base, "test"), doctest::Contains("/rewards/base"),
                         ConfigError);

    // action grid beyond the torque limit.
    std::string wide = kSolveConfig;
    wide.replace(wide.find("-2.0, \"max\": 2.0"), 16, "-4.0, \"max\": 4.0");
    CHECK_THROWS_WITH_AS(parse_config(wide, "test"), doctest::Contains("/grid/action"),
                         ConfigError);
}

TEST_CASE("gridworld plant parses") {
    const char* text = R"({
      "experiment": "invariance",
      "plant": {"type": "gridworld", "width": 4, "height": 3, "goal": [3, 2],
                "goal_reward": 2.0, "step_reward": -0.1},
      "rewards": {"base": "gridworld_native",
                  "terms": [{"potential": {"variant": "constant", "value": 1.0},
                             "weight": 1.0, "mode": "PBRS"}]}
    })";
    const ExperimentConfig cfg = parse_config(text, "test");
    CHECK_FALSE(cfg.is_pendulum());
    CHECK(cfg.gridworld().width == 4);
    CHECK(cfg.gridworld().goal_y == 2);
    CHECK(cfg.gridworld().step_reward == -0.1);
    const std::string out = serialize_config(cfg);
    CHECK(serialize_config(parse_config(out, "rt")) == out);
}
