#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shapelab/grid.hpp"
#include "shapelab/gridworld.hpp"
#include "shapelab/pendulum.hpp"
#include "shapelab/shaping.hpp"
#include "shapelab/tabulate.hpp"

namespace shapelab {

/// Invalid or inconsistent configuration; the CLI exits with code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading inputs or writing artifacts; exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { solve, sweep, compare, distribution, invariance };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct SolverConfig {
    double gamma = 0.97;
    double tol = 1e-8;
    int max_iter = 100000;
    double tie_eps = 1e-6;
};

struct SweepConfig {
    std::vector<double> multipliers = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
};

struct CompareConfig {
    RewardSpec candidate;
};

enum class StartKind { uniform, hanging, fixed };

struct DistributionConfig {
    int episodes = 20;
    int horizon = 5000;
    StartKind start = StartKind::uniform;
    int start_state = 0;  // used when start == fixed
    /// Terms whose per-step values are recorded along the rollouts; empty
    /// means the solved reward's own terms.
    std::vector<ShapingTerm> record_terms;
};

struct InvarianceConfig {
    double identity_tol = 1e-8;
};

/// Full experiment description, loadable from JSON.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::solve;
    bool experiment_explicit = false;  // whether the config file named it
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::variant<PendulumParams, GridworldSpec> plant = PendulumParams{};
    GridSpec grid;  // pendulum plants only
    InterpMode interp = InterpMode::multilinear;
    RewardSpec rewards;
    SolverConfig solver;
    SweepConfig sweep;
    std::optional<CompareConfig> compare;
    DistributionConfig distribution;
    InvarianceConfig invariance;

    bool is_pendulum() const { return std::holds_alternative<PendulumParams>(plant); }
    const PendulumParams& pendulum() const { return std::get<PendulumParams>(plant); }
    const GridworldSpec& gridworld() const { return std::get<GridworldSpec>(plant); }

    /// Throws ConfigError with a path-anchored message on any violation.
    void validate() const;
};

/// Parses a config from JSON text; `origin` names the source in error
/// messages. Shaping terms that omit pbrs_gamma get the solver discount.
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

/// Reads and parses a config file.
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Standalone RewardSpec JSON round trip. Terms that omit pbrs_gamma get
/// `default_pbrs_gamma`.
RewardSpec parse_reward_spec(const std::string& json_text, double default_pbrs_gamma = 1.0);
std::string serialize_reward_spec(const RewardSpec& spec);

}  // namespace shapelab
