#include "shapelab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "shapelab/parallel.hpp"

namespace shapelab {

std::vector<double> state_values(const QTable& q) {
    std::vector<double> v(static_cast<std::size_t>(q.n_states));
    for (int s = 0; s < q.n_states; ++s) {
        const auto row = q.row(s);
        v[static_cast<std::size_t>(s)] = *std::max_element(row.begin(), row.end());
    }
    return v;
}

Policy extract_policy(const QTable& q, double tie_eps) {
    if (tie_eps < 0.0) throw std::invalid_argument("extract_policy: tie_eps must be >= 0");
    Policy p;
    p.tie_eps = tie_eps;
    p.greedy.resize(static_cast<std::size_t>(q.n_states));
    p.tie_sets.resize(static_cast<std::size_t>(q.n_states));
    for (int s = 0; s < q.n_states; ++s) {
        const auto row = q.row(s);
        int best = 0;
        for (int a = 1; a < q.n_actions; ++a)
            if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
        p.greedy[static_cast<std::size_t>(s)] = best;
        auto& ties = p.tie_sets[static_cast<std::size_t>(s)];
        const double cutoff = row[static_cast<std::size_t>(best)] - tie_eps;
        for (int a = 0; a < q.n_actions; ++a)
            if (row[static_cast<std::size_t>(a)] >= cutoff) ties.push_back(a);
    }
    return p;
}

std::vector<double> advantage(const QTable& q) {
    std::vector<double> adv(q.values.size());
    for (int s = 0; s < q.n_states; ++s) {
        const auto row = q.row(s);
        const double vmax = *std::max_element(row.begin(), row.end());
        for (int a = 0; a < q.n_actions; ++a)
            adv[static_cast<std::size_t>(s) * q.n_actions + a] =
                row[static_cast<std::size_t>(a)] - vmax;
    }
    return adv;
}

std::pair<QTable, SolveReport> q_value_iteration(const TabularMDP& mdp, const RewardSpec& rewards,
                                                 const SolveOptions& opts) {
    if (!(opts.gamma >= 0.0 && opts.gamma < 1.0))
        throw std::invalid_argument("q_value_iteration: gamma must be in [0, 1)");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("q_value_iteration: tol must be > 0");
    if (opts.max_iter < 1) throw std::invalid_argument("q_value_iteration: max_iter must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    const int n_states = mdp.n_states();
    const int n_actions = mdp.n_actions();
    const std::size_t n_sa = static_cast<std::size_t>(n_states) * n_actions;
    const std::vector<double> rbar = expected_rewards(rewards, mdp, opts.jobs);

    QTable q(n_states, n_actions, opts.gamma);
    if (opts.q_init) {
        if (opts.q_init->size() != n_sa)
            throw std::invalid_argument("q_value_iteration: q_init size mismatch");
        q.values = *opts.q_init;
    }
    std::vector<double> v = state_values(q);
    std::vector<double> q_next(n_sa), v_next(static_cast<std::size_t>(n_states));
    std::vector<double> worker_residual;

    SolveReport report;
    report.tolerance = opts.tol;
    const int workers = std::max(1, opts.jobs);
    worker_residual.assign(static_cast<std::size_t>(n_states), 0.0);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        parallel_for(n_states, workers, [&](std::int64_t si) {
            const int s = static_cast<int>(si);
            double res = 0.0;
            double vmax = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < n_actions; ++a) {
                const std::size_t sa = static_cast<std::size_t>(s) * n_actions + a;
                double acc = 0.0;
                for (const Transition& e : mdp.row(s, a))
                    acc += e.prob * v[static_cast<std::size_t>(e.next)];
                const double qv = rbar[sa] + opts.gamma * acc;
                res = std::max(res, std::abs(qv - q.values[sa]));
                q_next[sa] = qv;
                vmax = std::max(vmax, qv);
            }
            v_next[static_cast<std::size_t>(s)] = vmax;
            worker_residual[static_cast<std::size_t>(s)] = res;
        });
        const double residual =
            *std::max_element(worker_residual.begin(), worker_residual.end());
        report.residual_history.push_back(residual);
        q.values.swap(q_next);
        v.swap(v_next);
        report.iterations = iter + 1;
        if (residual < opts.tol) {
            report.converged = true;
            break;
        }
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(q), std::move(report)};
}

std::vector<double> policy_evaluation(const TabularMDP& mdp, const RewardSpec& rewards,
                                      std::span<const int> greedy, double gamma, double tol,
                                      int max_iter) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("policy_evaluation: gamma must be in [0, 1)");
    if (greedy.size() != static_cast<std::size_t>(mdp.n_states()))
        throw std::invalid_argument("policy_evaluation: policy size mismatch");

    const int n_states = mdp.n_states();
    const std::vector<double> rbar = expected_rewards(rewards, mdp);
    std::vector<double> v(static_cast<std::size_t>(n_states), 0.0);
    std::vector<double> v_next(static_cast<std::size_t>(n_states));
    for (int iter = 0; iter < max_iter; ++iter) {
        double residual = 0.0;
        for (int s = 0; s < n_states; ++s) {
            const int a = greedy[static_cast<std::size_t>(s)];
            double acc = 0.0;
            for (const Transition& e : mdp.row(s, a))
                acc += e.prob * v[static_cast<std::size_t>(e.next)];
            const double nv = rbar[static_cast<std::size_t>(s) * mdp.n_actions() + a] + gamma * acc;
            residual = std::max(residual, std::abs(nv - v[static_cast<std::size_t>(s)]));
            v_next[static_cast<std::size_t>(s)] = nv;
        }
        v.swap(v_next);
        if (residual < tol) return v;
    }
    throw std::runtime_error("policy_evaluation: no convergence within max_iter");
}

QLearner::QLearner(const TabularMDP& mdp, const RewardSpec& rewards, QTable q_init, double alpha,
                   double epsilon, std::uint64_t seed)
    : mdp_(mdp), rewards_(rewards), q_(std::move(q_init)), alpha_(alpha), epsilon_(epsilon),
      rng_(seed) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("q_learning: alpha must be in (0, 1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("q_learning: epsilon must be in [0, 1]");
    if (q_.n_states != mdp.n_states() || q_.n_actions != mdp.n_actions())
        throw std::invalid_argument("q_learning: q_init shape mismatch");
    state_ = reset_state();
}

int QLearner::reset_state() {
    // Uniform over non-terminal states; rejection keeps the stream identical
    // for runs on the same MDP.
    for (;;) {
        const int s = rng_.uniform_int(mdp_.n_states());
        if (!mdp_.terminal(s)) return s;
    }
}

int QLearner::greedy_action(int s) const {
    // Lowest index within a small tolerance of the row maximum. The
    // tolerance keeps tie-breaking invariant under per-state offsets of the
    // Q-table, which the shaping/initialization equivalence depends on:
    // exact ties in one run may be split at rounding level in the other.
    constexpr double kTieTol = 1e-9;
    const auto row = q_.row(s);
    double vmax = row[0];
    for (int a = 1; a < q_.n_actions; ++a)
        vmax = std::max(vmax, row[static_cast<std::size_t>(a)]);
    for (int a = 0; a < q_.n_actions; ++a)
        if (row[static_cast<std::size_t>(a)] >= vmax - kTieTol) return a;
    return 0;
}

QLearner::StepRecord QLearner::step() {
    if (mdp_.terminal(state_)) state_ = reset_state();
    const int s = state_;
    const int a =
        (rng_.uniform01() < epsilon_) ? rng_.uniform_int(q_.n_actions) : greedy_action(s);
    const auto row = mdp_.row(s, a);
    const int next = row[static_cast<std::size_t>(rng_.sample(row))].next;
    const double r = total_reward(rewards_, mdp_, s, a, next);

    const auto next_row = q_.row(next);
    const double bootstrap = *std::max_element(next_row.begin(), next_row.end());
    double& qsa = q_.at(s, a);
    qsa += alpha_ * (r + q_.gamma * bootstrap - qsa);

    state_ = next;
    return {s, a, next, r};
}

QLearnResult tabular_q_learning(const TabularMDP& mdp, const RewardSpec& rewards, QTable q_init,
                                int steps, double alpha, double epsilon, std::uint64_t seed) {
    QLearner learner(mdp, rewards, std::move(q_init), alpha, epsilon, seed);
    QLearnResult out;
    out.trace.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) out.trace.push_back(learner.step());
    out.q = learner.q();
    return out;
}

}  // namespace shapelab
