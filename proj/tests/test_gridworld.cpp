#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "shapelab/gridworld.hpp"
#include "shapelab/solver.hpp"
#include "support.hpp"

using namespace shapelab;

TEST_CASE("2x2 gridworld has normalized transition rows") {
    GridworldSpec spec{2, 2, 1, 1, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    CHECK(mdp.n_states() == 4);
    CHECK(mdp.n_actions() == 4);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 4; ++a) {
            double sum = 0.0;
            for (const Transition& t : mdp.row(s, a)) sum += t.prob;
            CHECK(sum == 1.0);
        }
}

TEST_CASE("moving toward the goal is deterministic and rewarded") {
    GridworldSpec spec{3, 3, 2, 2, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    const int adjacent = spec.state_index(1, 2);
    const int goal = spec.state_index(2, 2);
    const auto row = mdp.row(adjacent, kEast);
    REQUIRE(row.size() == 1);
    CHECK(row[0].next == goal);
    CHECK(row[0].prob == 1.0);
    CHECK(row[0].reward == 1.0);
    CHECK(mdp.terminal(goal));
    CHECK_FALSE(mdp.terminal(adjacent));
}

TEST_CASE("edge moves are self-transitions") {
    GridworldSpec spec{3, 3, 2, 2, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    const int corner = spec.state_index(0, 0);
    CHECK(mdp.row(corner, kNorth)[0].next == corner);
    CHECK(mdp.row(corner, kWest)[0].next == corner);
    CHECK(mdp.row(corner, kEast)[0].next == spec.state_index(1, 0));
}

TEST_CASE("optimal corner value on a 3x3 grid is gamma^(d-1)") {
    // Start corner (0,0), goal (2,2): d = 4 moves, reward collected on the
    // 4th transition, so V = gamma^3 * goal_reward.
    GridworldSpec spec{3, 3, 2, 2, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    SolveOptions opts;
    opts.gamma = 0.9;
    opts.tol = 1e-12;
    const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
    CHECK(report.converged);
    const auto v = state_values(q);
    CHECK(v[static_cast<std::size_t>(spec.state_index(0, 0))] ==
          doctest::Approx(std::pow(0.9, 3)).epsilon(1e-9));
    CHECK(v[static_cast<std::size_t>(spec.state_index(2, 2))] == doctest::Approx(0.0));
    CHECK(v[static_cast<std::size_t>(spec.state_index(1, 2))] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gridworld spec validation") {
    CHECK_THROWS_AS(build_gridworld({1, 3, 0, 0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_gridworld({3, 3, 3, 0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_gridworld({3, 3, 0, -1, 1.0, 0.0}), std::invalid_argument);
}
