#include <cmath>
#include <limits>
#include <stdexcept>
#include <numbers>
#include <random>

#include <doctest.h>

#include "shapelab/rng.hpp"
#include "shapelab/shaping.hpp"
#include "shapelab/tabulate.hpp"
#include "support.hpp"

using namespace shapelab;

namespace {

constexpr double kPi = std::numbers::pi;

TabularMDP coarse_pendulum() {
    GridSpec spec;
    spec.dims = {{-kPi, kPi, 4, true}, {-8.0, 8.0, 5, false}};
    spec.action = {-2.0, 2.0, 3};
    return tabulate_pendulum(PendulumParams{}, spec, InterpMode::multilinear);
}

}  // namespace

TEST_CASE("sparse swing-up reward and its boundary") {
    CHECK(sparse_pendulum_reward({0.04, 0.09}) == 10.0);
    CHECK(sparse_pendulum_reward({0.05, 0.1}) == 10.0);
    CHECK(sparse_pendulum_reward({-0.05, -0.1}) == 10.0);
    CHECK(sparse_pendulum_reward({-kPi, 0.0}) == 0.0);
    CHECK(sparse_pendulum_reward({0.051, 0.0}) == 0.0);
    CHECK(sparse_pendulum_reward({0.0, 0.11}) == 0.0);
}

TEST_CASE("energy-error potential at upright rest") {
    const PendulumParams p;
    const double upright[2] = {0.0, 0.0};
    CHECK(potential_value(EnergyErrorPotential{1.0}, upright, &p) == 0.0);
    CHECK(potential_value(EnergyErrorPotential{2.0}, upright, &p) ==
          doctest::Approx(9.81 * 9.81).epsilon(1e-15));
}

TEST_CASE("squared-exponential potential is 1 at its center") {
    SquaredExponentialPotential q;
    q.center = {0.3, -1.2};
    q.sigma = 0.5;
    const double at_center[2] = {0.3, -1.2};
    CHECK(potential_value(PotentialFn{q}, at_center, nullptr) == 1.0);
    const double off[2] = {1.3, -1.2};
    CHECK(potential_value(PotentialFn{q}, off, nullptr) ==
          doctest::Approx(std::exp(-1.0 / 0.5)).epsilon(1e-15));
}

TEST_CASE("table potential needs an index and checks range") {
    const TabularMDP mdp = testing::random_mdp(3, 4, 2);
    TablePotential t{{1.0, 2.0, 3.0, 4.0}};
    CHECK(potential_value(PotentialFn{t}, mdp, 2) == 3.0);
    CHECK_THROWS_AS(potential_value(PotentialFn{t}, mdp, 4), std::out_of_range);
    const double coords[1] = {0.0};
    CHECK_THROWS_AS(potential_value(PotentialFn{t}, coords, nullptr), std::domain_error);
    TablePotential wrong{{1.0, 2.0}};
    CHECK_THROWS_AS(potential_value(PotentialFn{wrong}, mdp, 0), std::domain_error);
}

TEST_CASE("shaping term arithmetic") {
    const TabularMDP mdp = testing::random_mdp(5, 4, 2);
    TablePotential t{{2.0, 5.0, 2.0, 2.0}};
    // Potential unchanged across the step: the PBRS term vanishes at
    // pbrs_gamma = 1.
    CHECK(shaping_reward({PotentialFn{t}, 1.0, ShapingMode::pbrs, 1.0}, mdp, 0, 2) == 0.0);
    CHECK(shaping_reward({PotentialFn{t}, 1.0, ShapingMode::pbrs, 0.99}, mdp, 0, 1) ==
          doctest::Approx(0.99 * 5.0 - 2.0).epsilon(1e-15));
    TablePotential t3{{3.0, 3.0}};
    CHECK(shaping_reward({PotentialFn{t3}, -2.0, ShapingMode::drs, 1.0},
                         testing::random_mdp(9, 2, 2), 0, 1) == -6.0);
}

TEST_CASE("pbrs equals the discounted difference of the drs values") {
    const TabularMDP mdp = testing::random_mdp(17, 6, 2);
    const TablePotential phi = testing::random_table_potential(21, 6);
    const double gamma = 0.9;
    const ShapingTerm drs{PotentialFn{phi}, 1.7, ShapingMode::drs, 1.0};
    const ShapingTerm pbrs{PotentialFn{phi}, 1.7, ShapingMode::pbrs, gamma};
    for (int s = 0; s < 6; ++s)
        for (int next = 0; next < 6; ++next) {
            const double p = shaping_reward(pbrs, mdp, s, next);
            const double r_here = shaping_reward(drs, mdp, s, next);
            const double r_next = shaping_reward(drs, mdp, next, s);
            REQUIRE(std::abs(p - (gamma * r_next - r_here)) <= 1e-12);
        }
}

TEST_CASE("total reward composes base and ordered terms") {
    const TabularMDP mdp = coarse_pendulum();
    RewardSpec spec;
    spec.base = BaseReward::pendulum_sparse;
    // Empty terms: base reward alone. The upright node (theta = 0,
    // theta_dot = 0) is state 2*5 + 2.
    const int upright = 12;
    CHECK(total_reward(spec, mdp, upright, 0, upright) == 10.0);

    // A zero-weight term changes nothing.
    spec.terms.push_back({EnergyErrorPotential{1.0}, 0.0, ShapingMode::pbrs, 0.97});
    CHECK(total_reward(spec, mdp, upright, 0, upright) == 10.0);
}

TEST_CASE("hanging-rest energy penalty") {
    const TabularMDP mdp = coarse_pendulum();
    RewardSpec spec;
    spec.base = BaseReward::table;
    spec.base_table.assign(static_cast<std::size_t>(mdp.n_states()), 0.0);
    spec.terms.push_back({EnergyErrorPotential{1.0}, -1.0, ShapingMode::drs, 1.0});
    // theta node 0 is exactly -pi, theta_dot node 2 is 0: E = -9.81 and the
    // squared error from +9.81 is 19.62^2.
    const int hanging = 0 * 5 + 2;
    CHECK(mdp.coords(hanging)[0] == doctest::Approx(-kPi));
    CHECK(total_reward(spec, mdp, hanging, 0, hanging) ==
          doctest::Approx(-(19.62 * 19.62)).epsilon(1e-12));
}

TEST_CASE("base reward can be evaluated at departure instead of arrival") {
    const TabularMDP mdp = coarse_pendulum();
    RewardSpec spec;
    spec.base = BaseReward::pendulum_sparse;
    const int upright = 12, hanging = 2;
    spec.base_at_arrival = true;
    CHECK(total_reward(spec, mdp, hanging, 0, upright) == 10.0);
    CHECK(total_reward(spec, mdp, upright, 0, hanging) == 0.0);
    spec.base_at_arrival = false;
    CHECK(total_reward(spec, mdp, hanging, 0, upright) == 0.0);
    CHECK(total_reward(spec, mdp, upright, 0, hanging) == 10.0);
}

TEST_CASE("discounted pbrs terms telescope along trajectories") {
    const int n = 9;
    const TabularMDP mdp = testing::random_mdp(31, n, 3);
    const TablePotential phi = testing::random_table_potential(32, n);
    const double gamma = 0.93;
    const ShapingTerm term{PotentialFn{phi}, 1.0, ShapingMode::pbrs, gamma};

    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        // Random 50-step trajectory through the MDP.
        std::vector<int> states{rng.uniform_int(n)};
        for (int k = 0; k < 50; ++k) {
            const auto row = mdp.row(states.back(), rng.uniform_int(3));
            states.push_back(row[static_cast<std::size_t>(rng.sample(row))].next);
        }
        double discounted = 0.0, undiscounted = 0.0, g = 1.0;
        ShapingTerm undisc = term;
        undisc.pbrs_gamma = 1.0;
        for (std::size_t k = 0; k + 1 < states.size(); ++k) {
            discounted += g * shaping_reward(term, mdp, states[k], states[k + 1]);
            undiscounted += shaping_reward(undisc, mdp, states[k], states[k + 1]);
            g *= gamma;
        }
        const double phi_first = phi.values[static_cast<std::size_t>(states.front())];
        const double phi_last = phi.values[static_cast<std::size_t>(states.back())];
        // g is now gamma^(T+1) for the T+1 transitions taken.
        REQUIRE(std::abs(discounted - (g * phi_last - phi_first)) <= 1e-10);
        REQUIRE(std::abs(undiscounted - (phi_last - phi_first)) <= 1e-12);
    }
}

TEST_CASE("expected rewards flag non-finite rewards with the triple") {
    const TabularMDP mdp = testing::random_mdp(41, 3, 2);
    RewardSpec spec = testing::native_rewards();
    TablePotential bad{{0.0, std::numeric_limits<double>::infinity(), 0.0}};
    spec.terms.push_back({PotentialFn{bad}, 1.0, ShapingMode::drs, 1.0});
    CHECK_THROWS_WITH_AS(static_cast<void>(expected_rewards(spec, mdp)),
                         doctest::Contains("non-finite reward"), std::domain_error);
}
