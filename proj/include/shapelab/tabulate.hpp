#pragma once

#include <string>

#include "shapelab/grid.hpp"
#include "shapelab/mdp.hpp"
#include "shapelab/pendulum.hpp"

namespace shapelab {

/// How a continuous successor state is mapped back onto the grid.
enum class InterpMode {
    multilinear,  // stochastic transition row from the cell's corner weights
    nearest,      // deterministic: highest-weight node, ties to lowest index
};

const char* to_string(InterpMode mode);
InterpMode interp_mode_from_string(const std::string& s);

/// Discretizes the pendulum into a finite MDP. For each grid state and
/// torque, one dt step is integrated from the node coordinates, theta_dot is
/// clamped into the grid bounds, and the interpolation weights of the
/// successor become the transition row. No terminal states. The build is
/// parallel over states and bit-identical for any worker count.
TabularMDP tabulate_pendulum(const PendulumParams& p, const GridSpec& spec, InterpMode mode,
                             int jobs = 1);

/// Content hash of (params, spec, mode); names the on-disk cache entry.
std::string mdp_cache_key(const PendulumParams& p, const GridSpec& spec, InterpMode mode);

/// Default grid for the swing-up experiments: theta 101 nodes on [-pi, pi)
/// periodic, theta_dot 101 nodes on [-8, 8], torque 21 actions on [-2, 2].
GridSpec default_pendulum_grid();

}  // namespace shapelab
