#include "shapelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace shapelab {

using detail::json;

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::compare: return "compare";
        case ExperimentKind::distribution: return "distribution";
        case ExperimentKind::invariance: return "invariance";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "solve") return ExperimentKind::solve;
    if (s == "sweep") return ExperimentKind::sweep;
    if (s == "compare") return ExperimentKind::compare;
    if (s == "distribution") return ExperimentKind::distribution;
    if (s == "invariance") return ExperimentKind::invariance;
    throw ConfigError("unknown experiment: " + s);
}

namespace detail {

json to_json(const PotentialFn& phi) {
    json j;
    if (const auto* e = std::get_if<EnergyErrorPotential>(&phi)) {
        j["variant"] = "energy_error";
        j["target_multiplier"] = e->target_multiplier;
    } else if (const auto* q = std::get_if<SquaredExponentialPotential>(&phi)) {
        j["variant"] = "squared_exponential";
        j["center"] = q->center;
        j["sigma"] = q->sigma;
    } else if (const auto* t = std::get_if<TablePotential>(&phi)) {
        j["variant"] = "table";
        j["values"] = t->values;
    } else {
        j["variant"] = "constant";
        j["value"] = std::get<ConstantPotential>(phi).value;
    }
    return j;
}

PotentialFn potential_from_json(const json& j, const std::string& where) {
    const std::string variant = need_str(j, "variant", where);
    if (variant == "energy_error") {
        return EnergyErrorPotential{opt_num(j, "target_multiplier", where, 1.0)};
    }
    if (variant == "squared_exponential") {
        SquaredExponentialPotential q;
        q.center = num_array(need(j, "center", where), where + "/center");
        q.sigma = need_num(j, "sigma", where);
        if (!(q.sigma > 0.0)) fail(where + "/sigma", "must be > 0");
        return q;
    }
    if (variant == "table") {
        return TablePotential{num_array(need(j, "values", where), where + "/values")};
    }
    if (variant == "constant") {
        return ConstantPotential{need_num(j, "value", where)};
    }
    fail(where + "/variant", "unknown potential variant '" + variant + "'");
}

json to_json(const ShapingTerm& term) {
    json j;
    j["potential"] = to_json(term.potential);
    j["weight"] = term.weight;
    j["mode"] = to_string(term.mode);
    j["pbrs_gamma"] = term.pbrs_gamma;
    return j;
}

ShapingTerm term_from_json(const json& j, const std::string& where, double default_pbrs_gamma) {
    ShapingTerm t;
    t.potential = potential_from_json(need(j, "potential", where), where + "/potential");
    t.weight = need_num(j, "weight", where);
    const std::string mode = need_str(j, "mode", where);
    try {
        t.mode = shaping_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
        fail(where + "/mode", e.what());
    }
    t.pbrs_gamma = opt_num(j, "pbrs_gamma", where, default_pbrs_gamma);
    if (!(t.pbrs_gamma >= 0.0 && t.pbrs_gamma <= 1.0))
        fail(where + "/pbrs_gamma", "must be in [0, 1]");
    return t;
}

json to_json(const RewardSpec& spec) {
    json j;
    j["base"] = to_string(spec.base);
    if (spec.base == BaseReward::table) j["base_table"] = spec.base_table;
    j["base_at_arrival"] = spec.base_at_arrival;
    j["terms"] = json::array();
    for (const ShapingTerm& t : spec.terms) j["terms"].push_back(to_json(t));
    return j;
}

RewardSpec reward_spec_from_json(const json& j, const std::string& where,
                                 double default_pbrs_gamma) {
    RewardSpec spec;
    const std::string base = need_str(j, "base", where);
    try {
        spec.base = base_reward_from_string(base);
    } catch (const std::invalid_argument& e) {
        fail(where + "/base", e.what());
    }
    if (spec.base == BaseReward::table)
        spec.base_table = num_array(need(j, "base_table", where), where + "/base_table");
    spec.base_at_arrival = opt_bool(j, "base_at_arrival", where, true);
    if (j.contains("terms")) {
        const json& terms = j.at("terms");
        if (!terms.is_array()) fail(where + "/terms", "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i)
            spec.terms.push_back(term_from_json(terms[i], where + "/terms/" + std::to_string(i),
                                                default_pbrs_gamma));
    }
    return spec;
}

json to_json(const GridSpec& spec, InterpMode interp) {
    json j;
    j["dims"] = json::array();
    for (const GridDim& d : spec.dims) {
        json jd;
        jd["min"] = d.lo;
        jd["max"] = d.hi;
        jd["count"] = d.count;
        jd["periodic"] = d.periodic;
        j["dims"].push_back(jd);
    }
    j["action"] = {{"min", spec.action.lo}, {"max", spec.action.hi}, {"count", spec.action.count}};
    j["interp"] = to_string(interp);
    if (spec.state_cap != GridSpec{}.state_cap) j["state_cap"] = spec.state_cap;
    return j;
}

namespace {

GridSpec grid_from_json(const json& j, const std::string& where, InterpMode& interp) {
    GridSpec spec;
    const json& dims = need(j, "dims", where);
    if (!dims.is_array() || dims.empty()) fail(where + "/dims", "expected a non-empty array");
    spec.dims.clear();
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const std::string dw = where + "/dims/" + std::to_string(i);
        GridDim d;
        d.lo = need_num(dims[i], "min", dw);
        d.hi = need_num(dims[i], "max", dw);
        d.count = need_int(dims[i], "count", dw);
        d.periodic = opt_bool(dims[i], "periodic", dw, false);
        spec.dims.push_back(d);
    }
    const json& action = need(j, "action", where);
    spec.action.lo = need_num(action, "min", where + "/action");
    spec.action.hi = need_num(action, "max", where + "/action");
    spec.action.count = need_int(action, "count", where + "/action");
    spec.state_cap = opt_int(j, "state_cap", where, static_cast<int>(GridSpec{}.state_cap));
    if (j.contains("interp")) {
        try {
            interp = interp_mode_from_string(need_str(j, "interp", where));
        } catch (const std::invalid_argument& e) {
            fail(where + "/interp", e.what());
        }
    }
    return spec;
}

json plant_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.is_pendulum()) {
        const PendulumParams& p = cfg.pendulum();
        j["type"] = "pendulum";
        j["mass"] = p.mass;
        j["gravity"] = p.gravity;
        j["length"] = p.length;
        j["dt"] = p.dt;
        j["torque_limit"] = p.torque_limit;
        j["damping"] = p.damping;
    } else {
        const GridworldSpec& g = cfg.gridworld();
        j["type"] = "gridworld";
        j["width"] = g.width;
        j["height"] = g.height;
        j["goal"] = {g.goal_x, g.goal_y};
        j["goal_reward"] = g.goal_reward;
        j["step_reward"] = g.step_reward;
    }
    return j;
}

void plant_from_json(const json& j, const std::string& where, ExperimentConfig& cfg) {
    const std::string type = need_str(j, "type", where);
    if (type == "pendulum") {
        PendulumParams p;
        p.mass = opt_num(j, "mass", where, p.mass);
        p.gravity = opt_num(j, "gravity", where, p.gravity);
        p.length = opt_num(j, "length", where, p.length);
        p.dt = opt_num(j, "dt", where, p.dt);
        p.torque_limit = opt_num(j, "torque_limit", where, p.torque_limit);
        p.damping = opt_num(j, "damping", where, p.damping);
        cfg.plant = p;
    } else if (type == "gridworld") {
        GridworldSpec g;
        g.width = need_int(j, "width", where);
        g.height = need_int(j, "height", where);
        const json& goal = need(j, "goal", where);
        if (!goal.is_array() || goal.size() != 2 || !goal[0].is_number_integer() ||
            !goal[1].is_number_integer())
            fail(where + "/goal", "expected [x, y] integer pair");
        g.goal_x = goal[0].get<int>();
        g.goal_y = goal[1].get<int>();
        g.goal_reward = opt_num(j, "goal_reward", where, g.goal_reward);
        g.step_reward = opt_num(j, "step_reward", where, g.step_reward);
        cfg.plant = g;
    } else {
        fail(where + "/type", "unknown plant type '" + type + "'");
    }
}

const char* to_string(StartKind k) {
    switch (k) {
        case StartKind::uniform: return "uniform";
        case StartKind::hanging: return "hanging";
        case StartKind::fixed: return "fixed";
    }
    return "?";
}

}  // namespace

}  // namespace detail

void ExperimentConfig::validate() const {
    using detail::fail;
    if (is_pendulum()) {
        try {
            pendulum().validate();
        } catch (const std::invalid_argument& e) {
            fail("/plant", e.what());
        }
        try {
            grid.validate();
        } catch (const std::invalid_argument& e) {
            fail("/grid", e.what());
        }
        if (grid.dims.size() != 2) fail("/grid/dims", "pendulum grid must be (theta, theta_dot)");
        if (std::max(std::abs(grid.action.lo), std::abs(grid.action.hi)) >
            pendulum().torque_limit)
            fail("/grid/action", "action grid exceeds the plant torque limit");
    } else {
        try {
            gridworld().validate();
        } catch (const std::invalid_argument& e) {
            fail("/plant", e.what());
        }
        if (rewards.base == BaseReward::pendulum_sparse)
            fail("/rewards/base", "pendulum_sparse requires a pendulum plant");
    }
    try {
        rewards.validate();
    } catch (const std::invalid_argument& e) {
        fail("/rewards", e.what());
    }
    if (!(solver.gamma >= 0.0 && solver.gamma < 1.0)) fail("/solver/gamma", "must be in [0, 1)");
    if (!(solver.tol > 0.0)) fail("/solver/tol", "must be > 0");
    if (solver.max_iter < 1) fail("/solver/max_iter", "must be >= 1");
    if (!(solver.tie_eps >= 0.0)) fail("/solver/tie_eps", "must be >= 0");

    switch (experiment) {
        case ExperimentKind::solve:
            break;
        case ExperimentKind::sweep:
            if (rewards.terms.empty()) fail("/rewards/terms", "sweep needs at least one term");
            if (std::find(sweep.multipliers.begin(), sweep.multipliers.end(), 1.0) ==
                sweep.multipliers.end())
                fail("/sweep/multipliers", "must include the 1x anchor");
            break;
        case ExperimentKind::compare:
            if (!compare) fail("/compare", "missing candidate_rewards");
            break;
        case ExperimentKind::distribution:
            if (!seed) fail("/seed", "distribution experiments sample rollouts and need a seed");
            if (distribution.episodes < 1) fail("/distribution/episodes", "must be >= 1");
            if (distribution.horizon < 1) fail("/distribution/horizon", "must be >= 1");
            if (distribution.start == StartKind::hanging && !is_pendulum())
                fail("/distribution/start", "'hanging' requires a pendulum plant");
            break;
        case ExperimentKind::invariance:
            if (rewards.terms.empty())
                fail("/rewards/terms", "invariance needs a term whose potential is checked");
            break;
    }
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    const std::string root = origin;
    ExperimentConfig cfg;
    if (j.contains("experiment")) {
        cfg.experiment = experiment_kind_from_string(detail::need_str(j, "experiment", root));
        cfg.experiment_explicit = true;
    }
    if (j.contains("seed") && !j.at("seed").is_null()) {
        if (!j.at("seed").is_number_integer()) detail::fail(root + "/seed", "expected an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) cfg.output_dir = detail::need_str(j, "output_dir", root);

    detail::plant_from_json(detail::need(j, "plant", root), root + "/plant", cfg);
    if (cfg.is_pendulum()) {
        cfg.grid = detail::grid_from_json(detail::need(j, "grid", root), root + "/grid",
                                          cfg.interp);
    } else if (j.contains("grid")) {
        detail::fail(root + "/grid", "grid applies only to pendulum plants");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        const std::string where = root + "/solver";
        cfg.solver.gamma = detail::opt_num(s, "gamma", where, cfg.solver.gamma);
        cfg.solver.tol = detail::opt_num(s, "tol", where, cfg.solver.tol);
        cfg.solver.max_iter = detail::opt_int(s, "max_iter", where, cfg.solver.max_iter);
        cfg.solver.tie_eps = detail::opt_num(s, "tie_eps", where, cfg.solver.tie_eps);
        // Checked here (not just in validate) because terms that omit
        // pbrs_gamma inherit this value while parsing.
        if (!(cfg.solver.gamma >= 0.0 && cfg.solver.gamma < 1.0))
            detail::fail(where + "/gamma", "must be in [0, 1)");
    }

    cfg.rewards = detail::reward_spec_from_json(detail::need(j, "rewards", root),
                                                root + "/rewards", cfg.solver.gamma);

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        if (s.contains("multipliers"))
            cfg.sweep.multipliers =
                detail::num_array(s.at("multipliers"), root + "/sweep/multipliers");
    }
    if (j.contains("compare")) {
        CompareConfig c;
        c.candidate = detail::reward_spec_from_json(
            detail::need(j.at("compare"), "candidate_rewards", root + "/compare"),
            root + "/compare/candidate_rewards", cfg.solver.gamma);
        cfg.compare = std::move(c);
    }
    if (j.contains("distribution")) {
        const json& d = j.at("distribution");
        const std::string where = root + "/distribution";
        cfg.distribution.episodes = detail::opt_int(d, "episodes", where, cfg.distribution.episodes);
        cfg.distribution.horizon = detail::opt_int(d, "horizon", where, cfg.distribution.horizon);
        if (d.contains("start")) {
            const json& st = d.at("start");
            if (st.is_string()) {
                const std::string s = st.get<std::string>();
                if (s == "uniform") {
                    cfg.distribution.start = StartKind::uniform;
                } else if (s == "hanging") {
                    cfg.distribution.start = StartKind::hanging;
                } else {
                    detail::fail(where + "/start", "expected 'uniform', 'hanging' or a state index");
                }
            } else if (st.is_number_integer()) {
                cfg.distribution.start = StartKind::fixed;
                cfg.distribution.start_state = st.get<int>();
            } else {
                detail::fail(where + "/start", "expected 'uniform', 'hanging' or a state index");
            }
        }
        if (d.contains("record_terms")) {
            const json& terms = d.at("record_terms");
            if (!terms.is_array()) detail::fail(where + "/record_terms", "expected an array");
            for (std::size_t i = 0; i < terms.size(); ++i)
                cfg.distribution.record_terms.push_back(detail::term_from_json(
                    terms[i], where + "/record_terms/" + std::to_string(i), cfg.solver.gamma));
        }
    }
    if (j.contains("invariance")) {
        cfg.invariance.identity_tol = detail::opt_num(j.at("invariance"), "identity_tol",
                                                      root + "/invariance",
                                                      cfg.invariance.identity_tol);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.experiment);
    if (cfg.seed) j["seed"] = *cfg.seed;
    if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
    j["plant"] = detail::plant_to_json(cfg);
    if (cfg.is_pendulum()) j["grid"] = detail::to_json(cfg.grid, cfg.interp);
    j["rewards"] = detail::to_json(cfg.rewards);
    j["solver"] = {{"gamma", cfg.solver.gamma},
                   {"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"tie_eps", cfg.solver.tie_eps}};
    switch (cfg.experiment) {
        case ExperimentKind::sweep:
            j["sweep"] = {{"multipliers", cfg.sweep.multipliers}};
            break;
        case ExperimentKind::compare:
            j["compare"] = {{"candidate_rewards", detail::to_json(cfg.compare->candidate)}};
            break;
        case ExperimentKind::distribution: {
            json d;
            d["episodes"] = cfg.distribution.episodes;
            d["horizon"] = cfg.distribution.horizon;
            if (cfg.distribution.start == StartKind::fixed) {
                d["start"] = cfg.distribution.start_state;
            } else {
                d["start"] = detail::to_string(cfg.distribution.start);
            }
            if (!cfg.distribution.record_terms.empty()) {
                d["record_terms"] = json::array();
                for (const ShapingTerm& t : cfg.distribution.record_terms)
                    d["record_terms"].push_back(detail::to_json(t));
            }
            j["distribution"] = std::move(d);
            break;
        }
        case ExperimentKind::invariance:
            j["invariance"] = {{"identity_tol", cfg.invariance.identity_tol}};
            break;
        case ExperimentKind::solve:
            break;
    }
    return j.dump(2) + "\n";
}

RewardSpec parse_reward_spec(const std::string& json_text, double default_pbrs_gamma) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("rewards: ") + e.what());
    }
    return detail::reward_spec_from_json(j, "rewards", default_pbrs_gamma);
}

std::string serialize_reward_spec(const RewardSpec& spec) {
    return detail::to_json(spec).dump(2) + "\n";
}

}  // namespace shapelab
