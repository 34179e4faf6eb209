#pragma once

// Shared helpers for the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "shapelab/gridworld.hpp"
#include "shapelab/mdp.hpp"
#include "shapelab/shaping.hpp"

namespace shapelab::testing {

/// Random MDP with dense-ish rows, general r(s, a, s') rewards in [-1, 1],
/// and no terminal states. Deterministic in the seed.
inline TabularMDP random_mdp(std::uint64_t seed, int n_states, int n_actions,
                             int branch = 3) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_real_distribution<double> reward(-1.0, 1.0);
    MdpBuilder b(n_states, n_actions, 1);
    for (int s = 0; s < n_states; ++s) {
        const double c[1] = {static_cast<double>(s)};
        b.set_coords(s, c);
        for (int a = 0; a < n_actions; ++a) {
            // Choose `branch` distinct successors by shuffling.
            std::vector<int> order(static_cast<std::size_t>(n_states));
            for (int i = 0; i < n_states; ++i) order[static_cast<std::size_t>(i)] = i;
            std::shuffle(order.begin(), order.end(), eng);
            std::vector<Transition> row;
            double total = 0.0;
            for (int k = 0; k < branch && k < n_states; ++k) {
                const double w = unit(eng);
                row.push_back({order[static_cast<std::size_t>(k)], w, reward(eng)});
                total += w;
            }
            for (Transition& t : row) t.prob /= total;
            b.set_row(s, a, std::move(row));
        }
    }
    return b.build();
}

/// Random per-state potential table in [-scale, scale].
inline TablePotential random_table_potential(std::uint64_t seed, int n_states,
                                             double scale = 5.0) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    TablePotential t;
    t.values.resize(static_cast<std::size_t>(n_states));
    for (double& v : t.values) v = dist(eng);
    return t;
}

/// Rewards = the MDP's own stored transition rewards, no shaping.
inline RewardSpec native_rewards() {
    RewardSpec spec;
    spec.base = BaseReward::gridworld_native;
    return spec;
}

/// Negative Manhattan distance to the goal, the usual progress potential.
inline TablePotential manhattan_potential(const GridworldSpec& g) {
    TablePotential t;
    t.values.resize(static_cast<std::size_t>(g.n_states()));
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            t.values[static_cast<std::size_t>(g.state_index(x, y))] =
                -static_cast<double>(std::abs(x - g.goal_x) + std::abs(y - g.goal_y));
    return t;
}

}  // namespace shapelab::testing
