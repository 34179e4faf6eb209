#include "shapelab/tabulate.hpp"

#include <array>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "shapelab/parallel.hpp"
#include "shapelab/text.hpp"

namespace shapelab {

const char* to_string(InterpMode mode) {
    return mode == InterpMode::multilinear ? "multilinear" : "nearest";
}

InterpMode interp_mode_from_string(const std::string& s) {
    if (s == "multilinear") return InterpMode::multilinear;
    if (s == "nearest") return InterpMode::nearest;
    throw std::invalid_argument("unknown interpolation mode: " + s);
}

GridSpec default_pendulum_grid() {
    GridSpec spec;
    spec.dims = {{-std::numbers::pi, std::numbers::pi, 101, true}, {-8.0, 8.0, 101, false}};
    spec.action = {-2.0, 2.0, 21};
    return spec;
}

TabularMDP tabulate_pendulum(const PendulumParams& p, const GridSpec& spec, InterpMode mode,
                             int jobs) {
    p.validate();
    spec.validate();
    if (spec.dims.size() != 2)
        throw std::invalid_argument("tabulate_pendulum: grid must be (theta, theta_dot)");

    const Grid grid(spec.dims, spec.state_cap);
    const std::int64_t n_states = grid.size();
    const int n_actions = spec.action.count;
    const std::vector<double> torques = spec.action.torques();

    // Rows are staged per state so workers never share a slot.
    std::vector<std::vector<std::vector<Transition>>> staged(
        static_cast<std::size_t>(n_states));
    std::vector<std::array<double, 2>> coords(static_cast<std::size_t>(n_states));

    parallel_for(n_states, jobs, [&](std::int64_t s) {
        double c[2];
        grid.coords(s, c);
        coords[static_cast<std::size_t>(s)] = {c[0], c[1]};
        auto& rows = staged[static_cast<std::size_t>(s)];
        rows.resize(static_cast<std::size_t>(n_actions));
        for (int a = 0; a < n_actions; ++a) {
            PendState next = step_pendulum({c[0], c[1]}, torques[static_cast<std::size_t>(a)], p);
            next.theta_dot = grid.clamp(1, next.theta_dot);
            const double point[2] = {next.theta, next.theta_dot};
            auto weights = grid.interp_weights(point);
            std::vector<Transition>& row = rows[static_cast<std::size_t>(a)];
            if (mode == InterpMode::nearest) {
                std::int64_t best = weights[0].first;
                double best_w = weights[0].second;
                for (const auto& [idx, w] : weights) {
                    if (w > best_w || (w == best_w && idx < best)) {
                        best = idx;
                        best_w = w;
                    }
                }
                row = {{static_cast<std::int32_t>(best), 1.0, 0.0}};
            } else {
                row.reserve(weights.size());
                for (const auto& [idx, w] : weights)
                    row.push_back({static_cast<std::int32_t>(idx), w, 0.0});
            }
        }
    });

    MdpBuilder b(static_cast<int>(n_states), n_actions, 2);
    b.set_plant(p);
    for (std::int64_t s = 0; s < n_states; ++s) {
        b.set_coords(static_cast<int>(s), coords[static_cast<std::size_t>(s)]);
        for (int a = 0; a < n_actions; ++a)
            b.set_row(static_cast<int>(s), a, std::move(staged[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]));
    }
    return b.build();
}

std::string mdp_cache_key(const PendulumParams& p, const GridSpec& spec, InterpMode mode) {
    std::string s = "pendulum.v1|";
    for (double v : {p.mass, p.gravity, p.length, p.dt, p.torque_limit, p.damping})
        s += dtos(v) + "|";
    for (const GridDim& d : spec.dims) {
        s += dtos(d.lo) + "," + dtos(d.hi) + "," + std::to_string(d.count) + "," +
             (d.periodic ? "p" : "c") + "|";
    }
    s += dtos(spec.action.lo) + "," + dtos(spec.action.hi) + "," +
         std::to_string(spec.action.count) + "|";
    s += to_string(mode);
    return to_hex(fnv1a64(s));
}

}  // namespace shapelab
