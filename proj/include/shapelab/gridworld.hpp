#pragma once

#include "shapelab/mdp.hpp"

namespace shapelab {

/// Deterministic rectangular gridworld used as a brute-force-checkable
/// oracle environment.
struct GridworldSpec {
    int width = 2;
    int height = 2;
    int goal_x = 1;
    int goal_y = 1;
    double goal_reward = 1.0;
    double step_reward = 0.0;

    void validate() const;
    int state_index(int x, int y) const { return y * width + x; }
    int n_states() const { return width * height; }
};

/// Gridworld actions, in index order.
enum GridAction : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

/// Builds the 4-action MDP: moves off the edge are self-transitions, the
/// goal cell is absorbing (zero reward once reached), and the native reward
/// is goal_reward on entering the goal and step_reward otherwise. State
/// coordinates are (x, y).
TabularMDP build_gridworld(const GridworldSpec& spec);

}  // namespace shapelab
