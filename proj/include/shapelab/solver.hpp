#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapelab/mdp.hpp"
#include "shapelab/rng.hpp"
#include "shapelab/shaping.hpp"

namespace shapelab {

/// Action-value table, row-major (state major), with the discount it was
/// solved under.
struct QTable {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    std::vector<double> values;  // n_states * n_actions

    QTable() = default;
    QTable(int ns, int na, double g, double fill = 0.0)
        : n_states(ns), n_actions(na), gamma(g),
          values(static_cast<std::size_t>(ns) * na, fill) {}

    double& at(int s, int a) { return values[static_cast<std::size_t>(s) * n_actions + a]; }
    double at(int s, int a) const { return values[static_cast<std::size_t>(s) * n_actions + a]; }
    std::span<const double> row(int s) const {
        return {values.data() + static_cast<std::size_t>(s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }
};

/// Per-state value V(s) = max_a Q(s, a).
std::vector<double> state_values(const QTable& q);

/// Greedy policy with tie sets. greedy[s] is the lowest-index argmax;
/// tie_sets[s] holds every action within tie_eps of the row maximum.
struct Policy {
    std::vector<int> greedy;
    std::vector<std::vector<int>> tie_sets;
    double tie_eps = 0.0;
};

Policy extract_policy(const QTable& q, double tie_eps);

/// Advantage A(s,a) = Q(s,a) - max_a' Q(s,a'); every row maximum is 0.
std::vector<double> advantage(const QTable& q);

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;  // max |dQ| per sweep
    bool converged = false;
    double tolerance = 0.0;
    double wall_time_s = 0.0;

    double final_residual() const {
        return residual_history.empty() ? 0.0 : residual_history.back();
    }
};

struct SolveOptions {
    double gamma = 0.97;
    double tol = 1e-8;
    int max_iter = 100000;
    int jobs = 1;
    /// Optional Q_0 override (flattened n_states * n_actions); defaults to 0.
    std::optional<std::vector<double>> q_init;
};

/// Synchronous Bellman-optimality sweeps
///   Q_{t+1}(s,a) = sum_{s'} T(s'|s,a) [ r(s,a,s') + gamma * max_a' Q_t(s',a') ]
/// from Q_0 = 0, stopping when max |dQ| < tol or max_iter is reached.
/// Deterministic and independent of iteration order and worker count.
std::pair<QTable, SolveReport> q_value_iteration(const TabularMDP& mdp, const RewardSpec& rewards,
                                                 const SolveOptions& opts);

/// Iterative evaluation of a fixed policy: V = r_pi + gamma * T_pi V, swept
/// to max |dV| < tol. Throws if max_iter is exhausted first.
std::vector<double> policy_evaluation(const TabularMDP& mdp, const RewardSpec& rewards,
                                      std::span<const int> greedy, double gamma,
                                      double tol = 1e-10, int max_iter = 1000000);

/// One-step tabular Q-learning with epsilon-greedy behavior, included to
/// test the equivalence between potential-based shaping and Q-table
/// initialization. All randomness (episode starts, exploration, transition
/// sampling) comes from one seeded stream, so equal seeds give identical
/// runs. Episodes reset to a uniformly drawn non-terminal state whenever a
/// terminal state is reached.
class QLearner {
public:
    QLearner(const TabularMDP& mdp, const RewardSpec& rewards, QTable q_init, double alpha,
             double epsilon, std::uint64_t seed);

    struct StepRecord {
        int s, a, next;
        double reward;
    };

    /// Acts once from the current state, updates Q, and returns the
    /// transition taken.
    StepRecord step();

    const QTable& q() const { return q_; }
    int state() const { return state_; }

private:
    int reset_state();
    int greedy_action(int s) const;

    const TabularMDP& mdp_;
    const RewardSpec& rewards_;
    QTable q_;
    double alpha_, epsilon_;
    Rng rng_;
    int state_;
};

struct QLearnResult {
    QTable q;
    std::vector<QLearner::StepRecord> trace;
};

QLearnResult tabular_q_learning(const TabularMDP& mdp, const RewardSpec& rewards, QTable q_init,
                                int steps, double alpha, double epsilon, std::uint64_t seed);

}  // namespace shapelab
