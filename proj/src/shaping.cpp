#include "shapelab/shaping.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "shapelab/parallel.hpp"

namespace shapelab {

const char* potential_variant_name(const PotentialFn& phi) {
    struct Visitor {
        const char* operator()(const EnergyErrorPotential&) const { return "energy_error"; }
        const char* operator()(const SquaredExponentialPotential&) const {
            return "squared_exponential";
        }
        const char* operator()(const TablePotential&) const { return "table"; }
        const char* operator()(const ConstantPotential&) const { return "constant"; }
    };
    return std::visit(Visitor{}, phi);
}

double potential_value(const PotentialFn& phi, std::span<const double> coords,
                       const PendulumParams* plant) {
    if (const auto* e = std::get_if<EnergyErrorPotential>(&phi)) {
        if (plant == nullptr)
            throw std::domain_error("energy_error potential needs pendulum parameters");
        if (coords.size() != 2)
            throw std::domain_error("energy_error potential needs a (theta, theta_dot) state");
        const double desired =
            e->target_multiplier * plant->mass * plant->gravity * plant->length;
        const double err = energy({coords[0], coords[1]}, *plant) - desired;
        return err * err;
    }
    if (const auto* q = std::get_if<SquaredExponentialPotential>(&phi)) {
        if (q->center.size() != coords.size())
            throw std::domain_error("squared_exponential potential: center dimension mismatch");
        double d2 = 0.0;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const double d = coords[i] - q->center[i];
            d2 += d * d;
        }
        return std::exp(-d2 / q->sigma);
    }
    if (std::holds_alternative<TablePotential>(phi))
        throw std::domain_error("table potential needs a tabular state index");
    return std::get<ConstantPotential>(phi).value;
}

double potential_value(const PotentialFn& phi, const TabularMDP& mdp, int s) {
    mdp.check_state(s);
    if (const auto* t = std::get_if<TablePotential>(&phi)) {
        if (t->values.size() != static_cast<std::size_t>(mdp.n_states()))
            throw std::domain_error("table potential: length does not match n_states");
        return t->values[static_cast<std::size_t>(s)];
    }
    const PendulumParams* plant = mdp.plant() ? &*mdp.plant() : nullptr;
    return potential_value(phi, mdp.coords(s), plant);
}

const char* to_string(ShapingMode mode) { return mode == ShapingMode::drs ? "DRS" : "PBRS"; }

ShapingMode shaping_mode_from_string(const std::string& s) {
    if (s == "DRS") return ShapingMode::drs;
    if (s == "PBRS") return ShapingMode::pbrs;
    throw std::invalid_argument("unknown shaping mode: " + s);
}

void ShapingTerm::validate() const {
    if (!(pbrs_gamma >= 0.0 && pbrs_gamma <= 1.0))
        throw std::invalid_argument("shaping term: pbrs_gamma must be in [0, 1]");
    if (!std::isfinite(weight)) throw std::invalid_argument("shaping term: weight must be finite");
    if (const auto* q = std::get_if<SquaredExponentialPotential>(&potential)) {
        if (!(q->sigma > 0.0))
            throw std::invalid_argument("squared_exponential potential: sigma must be > 0");
    }
}

double shaping_reward(const ShapingTerm& term, const TabularMDP& mdp, int s, int s_next) {
    if (term.mode == ShapingMode::drs) return term.weight * potential_value(term.potential, mdp, s);
    return term.weight * (term.pbrs_gamma * potential_value(term.potential, mdp, s_next) -
                          potential_value(term.potential, mdp, s));
}

const char* to_string(BaseReward base) {
    switch (base) {
        case BaseReward::pendulum_sparse: return "pendulum_sparse";
        case BaseReward::gridworld_native: return "gridworld_native";
        case BaseReward::table: return "table";
    }
    return "?";
}

BaseReward base_reward_from_string(const std::string& s) {
    if (s == "pendulum_sparse") return BaseReward::pendulum_sparse;
    if (s == "gridworld_native") return BaseReward::gridworld_native;
    if (s == "table") return BaseReward::table;
    throw std::invalid_argument("unknown base reward: " + s);
}

void RewardSpec::validate() const {
    for (const ShapingTerm& t : terms) t.validate();
}

double sparse_pendulum_reward(const PendState& s) {
    return (std::abs(s.theta) <= 0.05 && std::abs(s.theta_dot) <= 0.1) ? 10.0 : 0.0;
}

namespace {

double base_reward_value(const RewardSpec& spec, const TabularMDP& mdp, int s, int a,
                         int s_next) {
    switch (spec.base) {
        case BaseReward::gridworld_native:
            return mdp.native_reward(s, a, s_next);
        case BaseReward::pendulum_sparse: {
            const auto c = mdp.coords(spec.base_at_arrival ? s_next : s);
            if (c.size() != 2)
                throw std::domain_error("pendulum_sparse reward needs a 2-D state space");
            return sparse_pendulum_reward({c[0], c[1]});
        }
        case BaseReward::table: {
            const int idx = spec.base_at_arrival ? s_next : s;
            if (spec.base_table.size() != static_cast<std::size_t>(mdp.n_states()))
                throw std::domain_error("base reward table: length does not match n_states");
            return spec.base_table[static_cast<std::size_t>(idx)];
        }
    }
    return 0.0;
}

}  // namespace

double total_reward(const RewardSpec& spec, const TabularMDP& mdp, int s, int a, int s_next) {
    mdp.check_state(s);
    mdp.check_action(a);
    mdp.check_state(s_next);
    double r = base_reward_value(spec, mdp, s, a, s_next);
    for (const ShapingTerm& t : spec.terms) r += shaping_reward(t, mdp, s, s_next);
    return r;
}

std::vector<double> expected_rewards(const RewardSpec& spec, const TabularMDP& mdp, int jobs) {
    spec.validate();
    const int n_states = mdp.n_states();
    const int n_actions = mdp.n_actions();

    // Per-state caches keep the hot loop free of repeated potential (and
    // sparse-reward) evaluations; the per-entry arithmetic matches
    // total_reward exactly.
    std::vector<std::vector<double>> phi(spec.terms.size());
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
        phi[t].resize(static_cast<std::size_t>(n_states));
        auto& column = phi[t];
        const PotentialFn& fn = spec.terms[t].potential;
        parallel_for(n_states, jobs, [&](std::int64_t s) {
            column[static_cast<std::size_t>(s)] = potential_value(fn, mdp, static_cast<int>(s));
        });
    }
    std::vector<double> base_state;
    if (spec.base == BaseReward::pendulum_sparse || spec.base == BaseReward::table) {
        base_state.resize(static_cast<std::size_t>(n_states));
        parallel_for(n_states, jobs, [&](std::int64_t s) {
            // Evaluated per state; the at-arrival flag picks which index is
            // used below.
            base_state[static_cast<std::size_t>(s)] =
                base_reward_value(spec, mdp, static_cast<int>(s), 0, static_cast<int>(s));
        });
    }

    std::vector<double> out(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    parallel_for(n_states, jobs, [&](std::int64_t si) {
        const int s = static_cast<int>(si);
        for (int a = 0; a < n_actions; ++a) {
            double rbar = 0.0;
            for (const Transition& e : mdp.row(s, a)) {
                double r;
                if (base_state.empty()) {
                    r = e.reward;
                } else {
                    r = base_state[static_cast<std::size_t>(spec.base_at_arrival ? e.next : s)];
                }
                for (std::size_t t = 0; t < spec.terms.size(); ++t) {
                    const ShapingTerm& term = spec.terms[t];
                    if (term.mode == ShapingMode::drs) {
                        r += term.weight * phi[t][static_cast<std::size_t>(s)];
                    } else {
                        r += term.weight *
                             (term.pbrs_gamma * phi[t][static_cast<std::size_t>(e.next)] -
                              phi[t][static_cast<std::size_t>(s)]);
                    }
                }
                if (!std::isfinite(r))
                    throw std::domain_error("non-finite reward at (s=" + std::to_string(s) +
                                            ", a=" + std::to_string(a) +
                                            ", s'=" + std::to_string(e.next) + ")");
                rbar += e.prob * r;
            }
            out[static_cast<std::size_t>(s) * n_actions + a] = rbar;
        }
    });
    return out;
}

}  // namespace shapelab
