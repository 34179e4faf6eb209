#include "shapelab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "shapelab/parallel.hpp"

namespace shapelab {

namespace {

/// Dense Gaussian elimination with partial pivoting; a is n x n row-major
/// and is consumed. Sized for the oracle's small systems.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
                std::abs(a[static_cast<std::size_t>(pivot) * n + col]))
                pivot = r;
        if (pivot != col) {
            for (int c = col; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(col) * n + c],
                          a[static_cast<std::size_t>(pivot) * n + c]);
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
        }
        const double d = a[static_cast<std::size_t>(col) * n + col];
        if (d == 0.0) throw std::runtime_error("singular policy-evaluation system");
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -=
                    f * a[static_cast<std::size_t>(col) * n + c];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            acc -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

double mean(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

Solution solve_mdp(const TabularMDP& mdp, const RewardSpec& rewards, const SolveOptions& opts,
                   double tie_eps) {
    Solution sol;
    auto [q, report] = q_value_iteration(mdp, rewards, opts);
    sol.q = std::move(q);
    sol.report = std::move(report);
    sol.policy = extract_policy(sol.q, tie_eps);
    sol.v = state_values(sol.q);
    return sol;
}

AgreementReport compare_policies(const Solution& reference, const Solution& candidate,
                                 const TabularMDP& mdp, const RewardSpec& baseline, double gamma,
                                 double tie_eps) {
    const int n = mdp.n_states();
    if (reference.q.n_states != n || candidate.q.n_states != n ||
        reference.q.n_actions != mdp.n_actions() || candidate.q.n_actions != mdp.n_actions())
        throw std::invalid_argument("compare_policies: solution shape does not match the MDP");
    if (reference.v.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("compare_policies: reference value function missing");

    const Policy ref = extract_policy(reference.q, tie_eps);
    const Policy cand = extract_policy(candidate.q, tie_eps);

    int exact = 0, tie_aware = 0;
    for (int s = 0; s < n; ++s) {
        const int ra = ref.greedy[static_cast<std::size_t>(s)];
        if (cand.greedy[static_cast<std::size_t>(s)] == ra) ++exact;
        const auto& ties = cand.tie_sets[static_cast<std::size_t>(s)];
        if (std::binary_search(ties.begin(), ties.end(), ra)) ++tie_aware;
    }

    const std::vector<double> v_cand =
        policy_evaluation(mdp, baseline, cand.greedy, gamma);
    double regret = 0.0;
    for (int s = 0; s < n; ++s)
        regret += reference.v[static_cast<std::size_t>(s)] - v_cand[static_cast<std::size_t>(s)];

    AgreementReport rep;
    rep.exact_agreement = static_cast<double>(exact) / n;
    rep.tie_aware_agreement = static_cast<double>(tie_aware) / n;
    rep.value_regret = regret / n;
    rep.candidate_return = mean(v_cand);
    return rep;
}

InvarianceReport invariance_suite(const TabularMDP& mdp, const RewardSpec& base,
                                  const PotentialFn& phi, double gamma, double solve_tol,
                                  double tie_eps, double identity_tol, int max_iter) {
    SolveOptions opts;
    opts.gamma = gamma;
    opts.tol = solve_tol;
    opts.max_iter = max_iter;

    RewardSpec shaped = base;
    shaped.terms.push_back({phi, 1.0, ShapingMode::pbrs, gamma});

    const Solution base_sol = solve_mdp(mdp, base, opts, tie_eps);
    const Solution shaped_sol = solve_mdp(mdp, shaped, opts, tie_eps);

    InvarianceReport rep;
    rep.identity_tol = identity_tol;
    for (int s = 0; s < mdp.n_states(); ++s) {
        const double p = potential_value(phi, mdp, s);
        rep.max_value_offset_dev =
            std::max(rep.max_value_offset_dev,
                     std::abs(shaped_sol.v[static_cast<std::size_t>(s)] + p -
                              base_sol.v[static_cast<std::size_t>(s)]));
    }
    const std::vector<double> adv_base = advantage(base_sol.q);
    const std::vector<double> adv_shaped = advantage(shaped_sol.q);
    for (std::size_t i = 0; i < adv_base.size(); ++i)
        rep.max_advantage_dev = std::max(rep.max_advantage_dev,
                                         std::abs(adv_shaped[i] - adv_base[i]));
    for (int s = 0; s < mdp.n_states(); ++s)
        if (base_sol.policy.tie_sets[static_cast<std::size_t>(s)] !=
            shaped_sol.policy.tie_sets[static_cast<std::size_t>(s)])
            ++rep.tie_set_mismatches;
    return rep;
}

SweepResult weight_sweep(const TabularMDP& mdp, const RewardSpec& base,
                         const ShapingTerm& term_template, const std::vector<double>& multipliers,
                         const SweepOptions& opts) {
    if (std::find(multipliers.begin(), multipliers.end(), 1.0) == multipliers.end())
        throw std::invalid_argument("weight_sweep: multipliers must include 1");

    SolveOptions solve_opts;
    solve_opts.gamma = opts.gamma;
    solve_opts.tol = opts.tol;
    solve_opts.max_iter = opts.max_iter;

    const Solution base_sol = solve_mdp(mdp, base, solve_opts, opts.tie_eps);

    SweepResult result;
    result.multipliers = multipliers;
    const std::size_t n_cells = 2 * multipliers.size();
    result.cells.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        SweepCell& cell = result.cells[i];
        cell.mode = i < multipliers.size() ? ShapingMode::drs : ShapingMode::pbrs;
        cell.multiplier = multipliers[i % multipliers.size()];
    }

    parallel_for(static_cast<std::int64_t>(n_cells), opts.jobs, [&](std::int64_t i) {
        SweepCell& cell = result.cells[static_cast<std::size_t>(i)];
        try {
            ShapingTerm term = term_template;
            term.mode = cell.mode;
            term.weight = term_template.weight * cell.multiplier;
            RewardSpec shaped = base;
            shaped.terms.push_back(term);
            const Solution sol = solve_mdp(mdp, shaped, solve_opts, opts.tie_eps);
            cell.agreement =
                compare_policies(base_sol, sol, mdp, base, opts.gamma, opts.tie_eps);
            cell.solved = true;
        } catch (const std::exception& e) {
            cell.solved = false;
            cell.error = e.what();
        }
    });
    return result;
}

TermDistribution rollout_term_stats(const TabularMDP& mdp, std::span<const int> greedy,
                                    const RewardSpec& rewards, int n_episodes, int horizon,
                                    std::uint64_t seed, const StartDistribution& start) {
    if (greedy.size() != static_cast<std::size_t>(mdp.n_states()))
        throw std::invalid_argument("rollout_term_stats: policy size mismatch");
    if (start.fixed) mdp.check_state(*start.fixed);

    const std::size_t n_terms = rewards.terms.size();
    const std::int64_t total = static_cast<std::int64_t>(n_episodes) * horizon;
    std::vector<std::vector<double>> samples(n_terms);
    for (auto& s : samples) s.reserve(static_cast<std::size_t>(total));

    Rng rng(seed);
    for (int ep = 0; ep < n_episodes; ++ep) {
        int s;
        if (start.fixed) {
            s = *start.fixed;
        } else {
            do {
                s = rng.uniform_int(mdp.n_states());
            } while (mdp.terminal(s));
        }
        for (int k = 0; k < horizon; ++k) {
            const int a = greedy[static_cast<std::size_t>(s)];
            const auto row = mdp.row(s, a);
            const int next = row[static_cast<std::size_t>(rng.sample(row))].next;
            for (std::size_t t = 0; t < n_terms; ++t)
                samples[t].push_back(shaping_reward(rewards.terms[t], mdp, s, next));
            s = next;
        }
    }

    TermDistribution dist;
    dist.terms.resize(n_terms);
    for (std::size_t t = 0; t < n_terms; ++t) {
        TermStats& st = dist.terms[t];
        const auto& xs = samples[t];
        st.label = std::string(to_string(rewards.terms[t].mode)) + ":" +
                   potential_variant_name(rewards.terms[t].potential);
        st.n_samples = static_cast<std::int64_t>(xs.size());
        st.mean = mean(xs);
        double var = 0.0;
        st.min = xs.empty() ? 0.0 : xs[0];
        st.max = st.min;
        for (double x : xs) {
            var += (x - st.mean) * (x - st.mean);
            st.min = std::min(st.min, x);
            st.max = std::max(st.max, x);
        }
        st.stddev = xs.empty() ? 0.0 : std::sqrt(var / static_cast<double>(xs.size()));
        st.histogram.assign(TermDistribution::kHistogramBins, 0);
        const double span = st.max - st.min;
        for (double x : xs) {
            int bin = 0;
            if (span > 0.0)
                bin = std::min(TermDistribution::kHistogramBins - 1,
                               static_cast<int>((x - st.min) / span *
                                                TermDistribution::kHistogramBins));
            ++st.histogram[static_cast<std::size_t>(bin)];
        }
    }
    return dist;
}

BruteForceResult brute_force_solve(const TabularMDP& mdp, const RewardSpec& rewards,
                                   double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("brute_force_solve: gamma must be in [0, 1)");
    const int n = mdp.n_states();
    const int na = mdp.n_actions();
    constexpr std::int64_t kGuard = 1000000;
    std::int64_t n_policies = 1;
    for (int s = 0; s < n; ++s) {
        n_policies *= na;
        if (n_policies > kGuard)
            throw std::invalid_argument("brute_force_solve: " + std::to_string(na) + "^" +
                                        std::to_string(n) + " policies exceeds guard of " +
                                        std::to_string(kGuard));
    }

    // Reward expectations computed directly from total_reward; only the MDP
    // and reward contracts are shared with the iterative solver.
    std::vector<double> rbar(static_cast<std::size_t>(n) * na, 0.0);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < na; ++a) {
            double acc = 0.0;
            for (const Transition& e : mdp.row(s, a))
                acc += e.prob * total_reward(rewards, mdp, s, a, e.next);
            rbar[static_cast<std::size_t>(s) * na + a] = acc;
        }

    std::vector<double> best_v(static_cast<std::size_t>(n),
                               -std::numeric_limits<double>::infinity());
    std::vector<int> pi(static_cast<std::size_t>(n));
    for (std::int64_t id = 0; id < n_policies; ++id) {
        std::int64_t rem = id;
        for (int s = 0; s < n; ++s) {
            pi[static_cast<std::size_t>(s)] = static_cast<int>(rem % na);
            rem /= na;
        }
        // (I - gamma * T_pi) V = r_pi
        std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> b(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
            a[static_cast<std::size_t>(s) * n + s] = 1.0;
            for (const Transition& e : mdp.row(s, pi[static_cast<std::size_t>(s)]))
                a[static_cast<std::size_t>(s) * n + e.next] -= gamma * e.prob;
            b[static_cast<std::size_t>(s)] =
                rbar[static_cast<std::size_t>(s) * na + pi[static_cast<std::size_t>(s)]];
        }
        const std::vector<double> v = solve_dense(std::move(a), std::move(b), n);
        for (int s = 0; s < n; ++s)
            best_v[static_cast<std::size_t>(s)] =
                std::max(best_v[static_cast<std::size_t>(s)], v[static_cast<std::size_t>(s)]);
    }

    BruteForceResult out;
    out.v = best_v;
    out.q = QTable(n, na, gamma);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < na; ++a) {
            double acc = 0.0;
            for (const Transition& e : mdp.row(s, a))
                acc += e.prob * best_v[static_cast<std::size_t>(e.next)];
            out.q.at(s, a) = rbar[static_cast<std::size_t>(s) * na + a] + gamma * acc;
        }
    return out;
}

int continuous_steps_to_target(const QTable& q, const Grid& grid, const PendulumParams& params,
                               const ActionGrid& actions, PendState start, int max_steps) {
    if (grid.dim() != 2 || grid.size() != q.n_states || actions.count != q.n_actions)
        throw std::invalid_argument("continuous_steps_to_target: grid/QTable mismatch");
    const std::vector<double> torques = actions.torques();
    PendState s = start;
    for (int k = 0; k <= max_steps; ++k) {
        if (std::abs(s.theta) <= 0.05 && std::abs(s.theta_dot) <= 0.1) return k;
        if (k == max_steps) break;
        const double point[2] = {s.theta, grid.clamp(1, s.theta_dot)};
        const auto weights = grid.interp_weights(point);
        int best = 0;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < q.n_actions; ++a) {
            double qa = 0.0;
            for (const auto& [idx, w] : weights) qa += w * q.at(static_cast<int>(idx), a);
            if (qa > best_q) {
                best_q = qa;
                best = a;
            }
        }
        s = step_pendulum(s, torques[static_cast<std::size_t>(best)], params);
    }
    return -1;
}

}  // namespace shapelab
