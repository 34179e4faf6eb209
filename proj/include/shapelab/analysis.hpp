#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapelab/grid.hpp"
#include "shapelab/mdp.hpp"
#include "shapelab/shaping.hpp"
#include "shapelab/solver.hpp"
#include "shapelab/tabulate.hpp"

namespace shapelab {

/// A solved MDP: Q-table, greedy policy with tie sets, and V = max_a Q.
struct Solution {
    QTable q;
    Policy policy;
    std::vector<double> v;
    SolveReport report;
};

/// q_value_iteration plus policy/value extraction.
Solution solve_mdp(const TabularMDP& mdp, const RewardSpec& rewards, const SolveOptions& opts,
                   double tie_eps);

/// Policy agreement between a reference solution and a candidate.
///   exact_agreement:     fraction of states whose greedy actions match.
///   tie_aware_agreement: fraction where the reference greedy action lies in
///                        the candidate's tie set (>= exact by construction).
///   value_regret:        mean over states of V_ref - V_candidate, both
///                        evaluated under the baseline reward only.
struct AgreementReport {
    double exact_agreement = 0.0;
    double tie_aware_agreement = 0.0;
    double value_regret = 0.0;
    /// Mean per-state value of the candidate's greedy policy under the
    /// baseline reward; the "return" column of sweep results.
    double candidate_return = 0.0;
};

/// reference.v must be the reference's baseline value function. Tie sets are
/// rebuilt from both Q-tables at tie_eps.
AgreementReport compare_policies(const Solution& reference, const Solution& candidate,
                                 const TabularMDP& mdp, const RewardSpec& baseline, double gamma,
                                 double tie_eps);

/// Checks the exact shaping identities for a PBRS term with weight 1 and
/// pbrs_gamma = gamma built from phi:
///   V*_shaped = V*_base - phi,  A_shaped = A_base,  identical tie sets.
struct InvarianceReport {
    double max_value_offset_dev = 0.0;
    double max_advantage_dev = 0.0;
    int tie_set_mismatches = 0;
    double identity_tol = 0.0;

    bool value_offset_ok() const { return max_value_offset_dev <= identity_tol; }
    bool advantage_ok() const { return max_advantage_dev <= identity_tol; }
    bool tie_sets_ok() const { return tie_set_mismatches == 0; }
    bool pass() const { return value_offset_ok() && advantage_ok() && tie_sets_ok(); }
};

InvarianceReport invariance_suite(const TabularMDP& mdp, const RewardSpec& base,
                                  const PotentialFn& phi, double gamma,
                                  double solve_tol = 1e-10, double tie_eps = 1e-6,
                                  double identity_tol = 1e-8, int max_iter = 1000000);

/// One sweep cell: the term template at a weight multiplier in one mode.
struct SweepCell {
    ShapingMode mode = ShapingMode::drs;
    double multiplier = 1.0;
    bool solved = false;
    std::string error;
    AgreementReport agreement;
};

struct SweepResult {
    std::vector<double> multipliers;
    std::vector<SweepCell> cells;  // DRS cells first, then PBRS, multiplier order
};

struct SweepOptions {
    double gamma = 0.97;
    double tol = 1e-8;
    int max_iter = 100000;
    double tie_eps = 1e-6;
    int jobs = 1;
};

/// Solves base + term(weight = multiplier * nominal) for every multiplier in
/// both DRS and PBRS mode and compares each against the base-only solution.
/// Multipliers must include 1. Cells run in parallel; a failed cell is
/// recorded, not fatal.
SweepResult weight_sweep(const TabularMDP& mdp, const RewardSpec& base,
                         const ShapingTerm& term_template, const std::vector<double>& multipliers,
                         const SweepOptions& opts);

/// Per-term statistics of shaping rewards along seeded on-policy rollouts.
struct TermStats {
    std::string label;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::int64_t n_samples = 0;
    std::vector<std::int64_t> histogram;  // kHistogramBins uniform bins on [min, max]
};

struct TermDistribution {
    static constexpr int kHistogramBins = 64;
    std::vector<TermStats> terms;
};

/// Episode start states: uniform over non-terminal states, or a fixed state.
struct StartDistribution {
    std::optional<int> fixed;
};

/// Rolls out n_episodes x horizon steps under the greedy policy, sampling
/// transitions from the MDP rows with the seeded stream, and records every
/// term's per-step shaping reward.
TermDistribution rollout_term_stats(const TabularMDP& mdp, std::span<const int> greedy,
                                    const RewardSpec& rewards, int n_episodes, int horizon,
                                    std::uint64_t seed, const StartDistribution& start = {});

/// Exhaustive oracle: enumerates every deterministic stationary policy
/// (guarded to n_actions^n_states <= 10^6), evaluates each exactly through
/// the linear policy-evaluation system with a dense pivoted solve, and keeps
/// the pointwise best. Independent of the value-iteration code path.
struct BruteForceResult {
    QTable q;
    std::vector<double> v;
};

BruteForceResult brute_force_solve(const TabularMDP& mdp, const RewardSpec& rewards,
                                   double gamma);

/// Steps the continuous plant under the tabulated greedy policy (actions
/// chosen by the interpolation-weighted Q argmax) and returns the first step
/// index at which the target region |theta| <= 0.05, |theta_dot| <= 0.1 is
/// entered, or -1 if it is not reached within max_steps.
int continuous_steps_to_target(const QTable& q, const Grid& grid, const PendulumParams& params,
                               const ActionGrid& actions, PendState start, int max_steps);

}  // namespace shapelab
