#include "shapelab/gridworld.hpp"

#include <array>
#include <stdexcept>

namespace shapelab {

void GridworldSpec::validate() const {
    if (width < 2 || height < 2)
        throw std::invalid_argument("gridworld: width and height must be >= 2");
    if (goal_x < 0 || goal_x >= width || goal_y < 0 || goal_y >= height)
        throw std::invalid_argument("gridworld: goal outside the grid");
}

TabularMDP build_gridworld(const GridworldSpec& spec) {
    spec.validate();
    const int goal = spec.state_index(spec.goal_x, spec.goal_y);
    MdpBuilder b(spec.n_states(), 4, 2);

    constexpr std::array<int, 4> dx = {0, 1, 0, -1};   // N, E, S, W
    constexpr std::array<int, 4> dy = {-1, 0, 1, 0};

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const int s = spec.state_index(x, y);
            const double c[2] = {static_cast<double>(x), static_cast<double>(y)};
            b.set_coords(s, c);
            if (s == goal) {
                b.set_terminal(s);
                for (int a = 0; a < 4; ++a) b.set_row(s, a, {{s, 1.0, 0.0}});
                continue;
            }
            for (int a = 0; a < 4; ++a) {
                int nx = x + dx[a], ny = y + dy[a];
                int next = s;  // off-edge moves stay put
                if (nx >= 0 && nx < spec.width && ny >= 0 && ny < spec.height)
                    next = spec.state_index(nx, ny);
                const double r = (next == goal) ? spec.goal_reward : spec.step_reward;
                b.set_row(s, a, {{next, 1.0, r}});
            }
        }
    }
    return b.build();
}

}  // namespace shapelab
