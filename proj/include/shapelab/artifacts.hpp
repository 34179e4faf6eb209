#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shapelab/analysis.hpp"
#include "shapelab/config.hpp"
#include "shapelab/grid.hpp"
#include "shapelab/solver.hpp"

namespace shapelab {

/// Reported version of the binaries, embedded at build time.
const char* version_string();

struct Artifact {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv64;
};

/// Funnels every artifact write through one place so the manifest always
/// lists exactly what was produced.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::string dir);

    void write_text(const std::string& name, const std::string& content);
    const std::vector<Artifact>& artifacts() const { return artifacts_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<Artifact> artifacts_;
};

/// Quantities exportable as a 2-D grid matrix.
enum class GridQuantity { value, policy, reward_field, potential };

/// CSV matrix of a per-state quantity over a 2-D grid: first dimension
/// (theta) as columns, second (theta_dot) as rows, with header row/column
/// carrying the grid coordinates. Refuses non-2-D grids.
std::string grid_matrix_csv(const Grid& grid, std::span<const double> per_state);
std::string grid_matrix_csv_int(const Grid& grid, std::span<const int> per_state);

/// The per-state quantity backing a GridQuantity export. `rewards` supplies
/// the reward field (evaluated on self-transitions, which makes PBRS terms
/// show their stationary value) and the potential of its first term.
std::vector<double> grid_quantity_values(GridQuantity what, const TabularMDP& mdp,
                                         const Solution& sol, const RewardSpec& rewards);

/// Per-state solution table: index, coordinates, V, greedy action.
std::string solution_csv(const TabularMDP& mdp, const Solution& sol,
                         std::span<const std::string> coord_names);

/// Long-format sweep table with one row per (term, mode, multiplier) cell.
std::string sweep_csv(std::span<const std::string> term_labels,
                      std::span<const SweepResult> sweeps);

std::string qtable_json(const QTable& q);
std::string agreement_json(const AgreementReport& rep);
std::string invariance_json(const InvarianceReport& rep);
std::string sweep_result_json(std::span<const std::string> term_labels,
                              std::span<const SweepResult> sweeps);
std::string distribution_json(const TermDistribution& dist);

struct ManifestInfo {
    const ExperimentConfig* config = nullptr;
    std::vector<Artifact> artifacts;
    std::vector<SolveReport> solves;
    bool converged = true;
    double wall_time_s = 0.0;
};

/// Manifest JSON: version, config echo, artifact list with content hashes,
/// solve summaries, and wall time (under the volatile "timing" key).
std::string manifest_json(const ManifestInfo& info);

}  // namespace shapelab
