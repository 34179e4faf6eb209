#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstring>

#include <doctest.h>

#include "shapelab/analysis.hpp"
#include "shapelab/gridworld.hpp"
#include "shapelab/solver.hpp"
#include "support.hpp"

using namespace shapelab;

namespace {

TabularMDP single_loop(double reward) {
    MdpBuilder b(1, 1, 1);
    const double c[1] = {0.0};
    b.set_coords(0, c);
    b.set_row(0, 0, {{0, 1.0, reward}});
    return b.build();
}

}  // namespace

TEST_CASE("absorbing unit reward converges to the geometric series") {
    const TabularMDP mdp = single_loop(1.0);
    SolveOptions opts;
    opts.gamma = 0.9;
    opts.tol = 1e-12;
    const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
    CHECK(report.converged);
    CHECK(q.at(0, 0) == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("gamma zero yields the expected one-step reward in one sweep") {
    const TabularMDP mdp = testing::random_mdp(13, 6, 3);
    SolveOptions opts;
    opts.gamma = 0.0;
    opts.tol = 1e-13;
    const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
    CHECK(report.converged);
    CHECK(report.iterations <= 2);
    const auto rbar = expected_rewards(testing::native_rewards(), mdp);
    for (std::size_t i = 0; i < rbar.size(); ++i) REQUIRE(q.values[i] == rbar[i]);
}

TEST_CASE("value iteration matches the exhaustive policy oracle") {
    for (std::uint64_t seed = 100; seed < 106; ++seed) {
        const TabularMDP mdp = testing::random_mdp(seed, 5, 3);
        const RewardSpec rewards = testing::native_rewards();
        SolveOptions opts;
        opts.gamma = 0.9;
        opts.tol = 1e-10;
        const auto [q, report] = q_value_iteration(mdp, rewards, opts);
        REQUIRE(report.converged);
        const auto v = state_values(q);
        const BruteForceResult oracle = brute_force_solve(mdp, rewards, 0.9);
        for (int s = 0; s < 5; ++s)
            REQUIRE(std::abs(v[static_cast<std::size_t>(s)] -
                             oracle.v[static_cast<std::size_t>(s)]) <= 1e-6);
    }
}

TEST_CASE("residuals contract monotonically after the first sweep") {
    for (std::uint64_t seed = 200; seed < 210; ++seed) {
        const TabularMDP mdp = testing::random_mdp(seed, 7, 3);
        SolveOptions opts;
        opts.gamma = 0.9;
        opts.tol = 1e-9;
        const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
        REQUIRE(report.converged);
        for (std::size_t i = 1; i + 1 < report.residual_history.size(); ++i)
            REQUIRE(report.residual_history[i + 1] <= report.residual_history[i] + 1e-13);
    }
}

TEST_CASE("non-finite rewards abort with the offending triple") {
    const TabularMDP mdp = testing::random_mdp(17, 3, 2);
    RewardSpec spec = testing::native_rewards();
    TablePotential nan_table{{0.0, 0.0, std::numeric_limits<double>::quiet_NaN()}};
    spec.terms.push_back({PotentialFn{nan_table}, 1.0, ShapingMode::drs, 1.0});
    SolveOptions opts;
    CHECK_THROWS_AS(q_value_iteration(mdp, spec, opts), std::domain_error);
}

TEST_CASE("policy evaluation of an absorbing zero-reward MDP is zero") {
    const TabularMDP mdp = single_loop(0.0);
    const int greedy[1] = {0};
    const auto v = policy_evaluation(mdp, testing::native_rewards(), greedy, 0.9);
    CHECK(v[0] == 0.0);
}

TEST_CASE("policy evaluation solves the two-state cycle exactly") {
    // 0 -> 1 pays 1, 1 -> 0 pays 0; with gamma = 1/2 the linear system
    // V0 = 1 + V1/2, V1 = V0/2 gives V = (4/3, 2/3).
    MdpBuilder b(2, 1, 1);
    const double c0[1] = {0.0}, c1[1] = {1.0};
    b.set_coords(0, c0);
    b.set_coords(1, c1);
    b.set_row(0, 0, {{1, 1.0, 1.0}});
    b.set_row(1, 0, {{0, 1.0, 0.0}});
    const TabularMDP mdp = b.build();
    const int greedy[2] = {0, 0};
    const auto v = policy_evaluation(mdp, testing::native_rewards(), greedy, 0.5, 1e-12);
    CHECK(v[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(v[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("greedy policy evaluation agrees with the Q-table maximum") {
    const TabularMDP mdp = testing::random_mdp(23, 8, 3);
    SolveOptions opts;
    opts.gamma = 0.9;
    opts.tol = 1e-10;
    const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
    const Policy pi = extract_policy(q, 0.0);
    const auto v_pi = policy_evaluation(mdp, testing::native_rewards(), pi.greedy, 0.9);
    const auto v = state_values(q);
    for (int s = 0; s < 8; ++s)
        REQUIRE(std::abs(v[static_cast<std::size_t>(s)] - v_pi[static_cast<std::size_t>(s)]) <=
                1e-6);
}

TEST_CASE("policy extraction picks lowest-index argmax and tie sets") {
    QTable q(3, 3, 0.9);
    q.values = {1.0, 3.0, 3.0,   // ties at exact equality
                5.0, 4.0, 3.0,   // wide tie_eps pulls in runner-up
                2.0, 2.0, 2.0};  // uniform row
    {
        const Policy p = extract_policy(q, 0.0);
        CHECK(p.greedy[0] == 1);
        CHECK(p.tie_sets[0] == std::vector<int>{1, 2});
    }
    {
        QTable q2(1, 3, 0.9);
        q2.values = {5.0, 4.0, 3.0};
        const Policy p = extract_policy(q2, 1.0);
        CHECK(p.greedy[0] == 0);
        CHECK(p.tie_sets[0] == std::vector<int>{0, 1});
    }
    {
        const Policy p = extract_policy(q, 0.5);
        CHECK(p.tie_sets[2] == std::vector<int>{0, 1, 2});
        CHECK(p.greedy[2] == 0);
    }
    CHECK_THROWS_AS(extract_policy(q, -1.0), std::invalid_argument);
}

TEST_CASE("advantage rows peak at zero and ignore per-state offsets") {
    QTable q(2, 2, 0.9);
    q.values = {1.0, 3.0, 2.0, 2.0};
    const auto a = advantage(q);
    CHECK(a[0] == -2.0);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == 0.0);

    QTable shifted = q;
    shifted.values[0] += 7.5;
    shifted.values[1] += 7.5;
    const auto a2 = advantage(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a2[i] == a[i]);
}

TEST_CASE("q-learning with alpha 1 and gamma 0 learns a reward in one visit") {
    const TabularMDP mdp = single_loop(3.5);
    const QLearnResult res = tabular_q_learning(mdp, testing::native_rewards(),
                                                QTable(1, 1, 0.0), 1, 1.0, 0.0, 9);
    CHECK(res.q.at(0, 0) == 3.5);
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].reward == 3.5);
}

TEST_CASE("q-learning runs are bit-identical for equal seeds") {
    GridworldSpec spec{4, 4, 3, 3, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    const auto a = tabular_q_learning(mdp, testing::native_rewards(), QTable(16, 4, 0.9), 3000,
                                      0.5, 0.2, 42);
    const auto b = tabular_q_learning(mdp, testing::native_rewards(), QTable(16, 4, 0.9), 3000,
                                      0.5, 0.2, 42);
    REQUIRE(a.q.values.size() == b.q.values.size());
    CHECK(std::memcmp(a.q.values.data(), b.q.values.data(),
                      a.q.values.size() * sizeof(double)) == 0);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        REQUIRE(a.trace[i].s == b.trace[i].s);
        REQUIRE(a.trace[i].a == b.trace[i].a);
        REQUIRE(a.trace[i].next == b.trace[i].next);
    }
    // A different seed takes a different trajectory.
    const auto c = tabular_q_learning(mdp, testing::native_rewards(), QTable(16, 4, 0.9), 3000,
                                      0.5, 0.2, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.trace.size() && !any_diff; ++i)
        any_diff = a.trace[i].s != c.trace[i].s || a.trace[i].a != c.trace[i].a ||
                   a.trace[i].next != c.trace[i].next;
    CHECK(any_diff);
}

TEST_CASE("shaped learning equals potential-initialized learning step by step") {
    // 3x3 gridworld, Manhattan-distance potential: Q-learning on the
    // PBRS-shaped reward from zero init must track Q-learning on the base
    // reward initialized with the potential, on the identical random stream.
    GridworldSpec spec{3, 3, 2, 2, 1.0, 0.0};
    const TabularMDP mdp = build_gridworld(spec);
    const TablePotential phi = testing::manhattan_potential(spec);
    const double gamma = 0.9;

    RewardSpec shaped = testing::native_rewards();
    shaped.terms.push_back({PotentialFn{phi}, 1.0, ShapingMode::pbrs, gamma});

    QTable shaped_init(9, 4, gamma, 0.0);
    QTable base_init(9, 4, gamma);
    for (int s = 0; s < 9; ++s)
        for (int a = 0; a < 4; ++a)
            base_init.at(s, a) = phi.values[static_cast<std::size_t>(s)];

    QLearner shaped_run(mdp, shaped, shaped_init, 0.5, 0.3, 77);
    const RewardSpec base = testing::native_rewards();
    QLearner base_run(mdp, base, base_init, 0.5, 0.3, 77);

    for (int k = 0; k < 2000; ++k) {
        const auto sa = shaped_run.step();
        const auto sb = base_run.step();
        REQUIRE(sa.s == sb.s);
        REQUIRE(sa.a == sb.a);
        REQUIRE(sa.next == sb.next);
        for (int s = 0; s < 9; ++s)
            for (int a = 0; a < 4; ++a)
                REQUIRE(std::abs(base_run.q().at(s, a) - phi.values[static_cast<std::size_t>(s)] -
                                 shaped_run.q().at(s, a)) <= 1e-10);
    }
}

TEST_CASE("q_init override changes the starting point of value iteration") {
    const TabularMDP mdp = single_loop(1.0);
    SolveOptions opts;
    opts.gamma = 0.9;
    opts.tol = 1e-12;
    opts.q_init = std::vector<double>{10.0};  // already the fixed point
    const auto [q, report] = q_value_iteration(mdp, testing::native_rewards(), opts);
    CHECK(report.iterations == 1);
    CHECK(report.converged);
    CHECK(q.at(0, 0) == doctest::Approx(10.0));
}
