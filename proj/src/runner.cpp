#include "shapelab/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "shapelab/analysis.hpp"
#include "shapelab/artifacts.hpp"
#include "shapelab/text.hpp"

namespace shapelab {

namespace {

std::string term_label(std::size_t index, const ShapingTerm& term) {
    std::string label = std::to_string(index) + ":" + potential_variant_name(term.potential);
    if (const auto* e = std::get_if<EnergyErrorPotential>(&term.potential))
        label += "_k" + dtos(e->target_multiplier);
    return label;
}

RewardSpec base_only(const RewardSpec& rewards) {
    RewardSpec base = rewards;
    base.terms.clear();
    return base;
}

struct Context {
    ExperimentConfig cfg;
    RunOptions opts;
    TabularMDP mdp;
    Grid grid{std::vector<GridDim>{{0.0, 1.0, 2, false}}};
    std::uint64_t seed = 0;
    std::vector<std::string> coord_names;
};

void build_mdp(Context& ctx) {
    if (!ctx.cfg.is_pendulum()) {
        ctx.mdp = build_gridworld(ctx.cfg.gridworld());
        ctx.coord_names = {"x", "y"};
        return;
    }
    ctx.grid = Grid(ctx.cfg.grid.dims, ctx.cfg.grid.state_cap);
    ctx.coord_names = {"theta", "theta_dot"};

    std::string cache_dir;
    if (ctx.opts.cache_override) {
        cache_dir = *ctx.opts.cache_override;
    } else if (const char* env = std::getenv("SHAPELAB_CACHE")) {
        cache_dir = env;
    } else {
        cache_dir = ctx.cfg.output_dir + "/cache";
    }
    const std::string key = mdp_cache_key(ctx.cfg.pendulum(), ctx.cfg.grid, ctx.cfg.interp);
    const std::string path = cache_dir + "/" + key + ".mdp";
    if (std::filesystem::exists(path)) {
        ctx.mdp = TabularMDP::load_binary(path);
        return;
    }
    ctx.mdp = tabulate_pendulum(ctx.cfg.pendulum(), ctx.cfg.grid, ctx.cfg.interp, ctx.opts.jobs);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) ctx.mdp.save_binary(path);
}

SolveOptions solve_options(const Context& ctx) {
    SolveOptions o;
    o.gamma = ctx.cfg.solver.gamma;
    o.tol = ctx.cfg.solver.tol;
    o.max_iter = ctx.cfg.solver.max_iter;
    o.jobs = ctx.opts.jobs;
    return o;
}

void export_pendulum_grids(const Context& ctx, ArtifactWriter& out, const Solution& sol) {
    const auto values = grid_quantity_values(GridQuantity::value, ctx.mdp, sol, ctx.cfg.rewards);
    out.write_text("value.csv", grid_matrix_csv(ctx.grid, values));
    std::vector<int> actions(sol.policy.greedy.begin(), sol.policy.greedy.end());
    out.write_text("policy.csv", grid_matrix_csv_int(ctx.grid, actions));
    out.write_text("reward_field.csv",
                   grid_matrix_csv(ctx.grid, grid_quantity_values(GridQuantity::reward_field,
                                                                  ctx.mdp, sol, ctx.cfg.rewards)));
    if (!ctx.cfg.rewards.terms.empty())
        out.write_text("potential.csv",
                       grid_matrix_csv(ctx.grid, grid_quantity_values(GridQuantity::potential,
                                                                      ctx.mdp, sol,
                                                                      ctx.cfg.rewards)));
}

void export_gridworld_grids(const Context& ctx, ArtifactWriter& out, const Solution& sol) {
    // Reuse the matrix writer through a (x, y) grid over cell centers.
    const GridworldSpec& g = ctx.cfg.gridworld();
    Grid grid({{0.0, static_cast<double>(g.width - 1), g.width, false},
               {0.0, static_cast<double>(g.height - 1), g.height, false}});
    // Gridworld state index is y * width + x, i.e. the second coordinate is
    // the slow one; transpose into the writer's layout.
    std::vector<double> v(sol.v.size());
    std::vector<int> a(sol.v.size());
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            v[static_cast<std::size_t>(x) * g.height + y] =
                sol.v[static_cast<std::size_t>(y) * g.width + x];
            a[static_cast<std::size_t>(x) * g.height + y] =
                sol.policy.greedy[static_cast<std::size_t>(y) * g.width + x];
        }
    out.write_text("value.csv", grid_matrix_csv(grid, v));
    out.write_text("policy.csv", grid_matrix_csv_int(grid, a));
}

int resolve_start_state(const Context& ctx) {
    switch (ctx.cfg.distribution.start) {
        case StartKind::fixed:
            ctx.mdp.check_state(ctx.cfg.distribution.start_state);
            return ctx.cfg.distribution.start_state;
        case StartKind::hanging: {
            const double hang[2] = {-std::numbers::pi, 0.0};
            return static_cast<int>(ctx.grid.nearest(hang));
        }
        case StartKind::uniform:
            return -1;
    }
    return -1;
}

RunStatus run_solve(Context& ctx, ArtifactWriter& out, ManifestInfo& manifest) {
    const Solution sol = solve_mdp(ctx.mdp, ctx.cfg.rewards, solve_options(ctx),
                                   ctx.cfg.solver.tie_eps);
    manifest.solves.push_back(sol.report);
    manifest.converged = sol.report.converged;
    if (ctx.cfg.is_pendulum()) {
        export_pendulum_grids(ctx, out, sol);
    } else {
        export_gridworld_grids(ctx, out, sol);
    }
    out.write_text("solution.csv", solution_csv(ctx.mdp, sol, ctx.coord_names));
    out.write_text("qtable.json", qtable_json(sol.q));
    if (!sol.report.converged)
        return {kExitNoConvergence, "solver did not converge within max_iter"};
    return {};
}

RunStatus run_compare(Context& ctx, ArtifactWriter& out, ManifestInfo& manifest) {
    const SolveOptions opts = solve_options(ctx);
    Solution ref = solve_mdp(ctx.mdp, ctx.cfg.rewards, opts, ctx.cfg.solver.tie_eps);
    const Solution cand =
        solve_mdp(ctx.mdp, ctx.cfg.compare->candidate, opts, ctx.cfg.solver.tie_eps);
    manifest.solves.push_back(ref.report);
    manifest.solves.push_back(cand.report);
    manifest.converged = ref.report.converged && cand.report.converged;

    // Agreement is scored against accumulated baseline rewards (the shared
    // base term), not the shaped totals.
    const RewardSpec baseline = base_only(ctx.cfg.rewards);
    ref.v = policy_evaluation(ctx.mdp, baseline, ref.policy.greedy, ctx.cfg.solver.gamma);
    const AgreementReport rep = compare_policies(ref, cand, ctx.mdp, baseline,
                                                 ctx.cfg.solver.gamma, ctx.cfg.solver.tie_eps);
    out.write_text("agreement.json", agreement_json(rep));
    if (!manifest.converged) return {kExitNoConvergence, "a compare solve did not converge"};
    return {};
}

RunStatus run_sweep(Context& ctx, ArtifactWriter& out, ManifestInfo& manifest) {
    SweepOptions opts;
    opts.gamma = ctx.cfg.solver.gamma;
    opts.tol = ctx.cfg.solver.tol;
    opts.max_iter = ctx.cfg.solver.max_iter;
    opts.tie_eps = ctx.cfg.solver.tie_eps;
    opts.jobs = ctx.opts.jobs;

    const RewardSpec base = base_only(ctx.cfg.rewards);
    std::vector<std::string> labels;
    std::vector<SweepResult> sweeps;
    bool all_ok = true;
    for (std::size_t t = 0; t < ctx.cfg.rewards.terms.size(); ++t) {
        labels.push_back(term_label(t, ctx.cfg.rewards.terms[t]));
        sweeps.push_back(weight_sweep(ctx.mdp, base, ctx.cfg.rewards.terms[t],
                                      ctx.cfg.sweep.multipliers, opts));
        for (const SweepCell& cell : sweeps.back().cells) all_ok = all_ok && cell.solved;
    }
    out.write_text("sweep.csv", sweep_csv(labels, sweeps));
    out.write_text("sweep.json", sweep_result_json(labels, sweeps));
    manifest.converged = all_ok;
    if (!all_ok) return {kExitNoConvergence, "one or more sweep cells failed"};
    return {};
}

RunStatus run_distribution(Context& ctx, ArtifactWriter& out, ManifestInfo& manifest) {
    const Solution sol = solve_mdp(ctx.mdp, ctx.cfg.rewards, solve_options(ctx),
                                   ctx.cfg.solver.tie_eps);
    manifest.solves.push_back(sol.report);
    manifest.converged = sol.report.converged;

    RewardSpec recorded = ctx.cfg.rewards;
    if (!ctx.cfg.distribution.record_terms.empty())
        recorded.terms = ctx.cfg.distribution.record_terms;

    StartDistribution start;
    const int fixed = resolve_start_state(ctx);
    if (fixed >= 0) start.fixed = fixed;
    const TermDistribution dist =
        rollout_term_stats(ctx.mdp, sol.policy.greedy, recorded, ctx.cfg.distribution.episodes,
                           ctx.cfg.distribution.horizon, ctx.seed, start);
    out.write_text("distribution.json", distribution_json(dist));
    if (!sol.report.converged)
        return {kExitNoConvergence, "solver did not converge within max_iter"};
    return {};
}

RunStatus run_invariance(Context& ctx, ArtifactWriter& out, ManifestInfo& manifest) {
    const RewardSpec base = base_only(ctx.cfg.rewards);
    const InvarianceReport rep = invariance_suite(
        ctx.mdp, base, ctx.cfg.rewards.terms[0].potential, ctx.cfg.solver.gamma,
        ctx.cfg.solver.tol, ctx.cfg.solver.tie_eps, ctx.cfg.invariance.identity_tol,
        ctx.cfg.solver.max_iter);
    out.write_text("invariance.json", invariance_json(rep));
    manifest.converged = true;
    return {};
}

}  // namespace

RunStatus run_experiment(ExperimentConfig cfg, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (opts.out_override) cfg.output_dir = *opts.out_override;
        if (opts.seed_override) cfg.seed = *opts.seed_override;
        if (cfg.output_dir.empty())
            throw ConfigError("/output_dir: missing (set in the config or pass --out)");
        cfg.validate();

        Context ctx;
        ctx.cfg = std::move(cfg);
        ctx.opts = opts;
        ctx.seed = ctx.cfg.seed.value_or(0);
        build_mdp(ctx);

        ArtifactWriter out(ctx.cfg.output_dir);
        ManifestInfo manifest;
        manifest.config = &ctx.cfg;

        RunStatus status;
        switch (ctx.cfg.experiment) {
            case ExperimentKind::solve: status = run_solve(ctx, out, manifest); break;
            case ExperimentKind::sweep: status = run_sweep(ctx, out, manifest); break;
            case ExperimentKind::compare: status = run_compare(ctx, out, manifest); break;
            case ExperimentKind::distribution:
                status = run_distribution(ctx, out, manifest);
                break;
            case ExperimentKind::invariance: status = run_invariance(ctx, out, manifest); break;
        }

        manifest.artifacts = out.artifacts();
        manifest.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.write_text("manifest.json", manifest_json(manifest));
        return status;
    } catch (const ConfigError& e) {
        return {kExitConfig, e.what()};
    } catch (const IoError& e) {
        return {kExitIo, e.what()};
    } catch (const std::invalid_argument& e) {
        return {kExitConfig, e.what()};
    } catch (const std::exception& e) {
        return {kExitIo, e.what()};
    }
}

}  // namespace shapelab
