#include "shapelab/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json_detail.hpp"
#include "shapelab/text.hpp"

namespace shapelab {

using detail::json;

const char* version_string() {
#ifdef SHAPELAB_VERSION_STRING
    return SHAPELAB_VERSION_STRING;
#else
    return "0.0.0+unknown";
#endif
}

ArtifactWriter::ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
}

void ArtifactWriter::write_text(const std::string& name, const std::string& content) {
    const std::string path = dir_ + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open artifact for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
    artifacts_.push_back({name, content.size(), to_hex(fnv1a64(content))});
}

namespace {

void require_2d(const Grid& grid) {
    if (grid.dim() != 2)
        throw std::invalid_argument("grid matrix export needs a 2-D grid");
}

}  // namespace

std::string grid_matrix_csv(const Grid& grid, std::span<const double> per_state) {
    require_2d(grid);
    const int n0 = grid.dim_spec(0).count;
    const int n1 = grid.dim_spec(1).count;
    std::string out;
    out.reserve(static_cast<std::size_t>(n0 + 1) * (n1 + 1) * 8);
    for (int i = 0; i < n0; ++i) out += "," + dtos(grid.node(0, i));
    out += "\n";
    for (int j = 0; j < n1; ++j) {
        out += dtos(grid.node(1, j));
        for (int i = 0; i < n0; ++i)
            out += "," + dtos(per_state[static_cast<std::size_t>(i) * n1 + j]);
        out += "\n";
    }
    return out;
}

std::string grid_matrix_csv_int(const Grid& grid, std::span<const int> per_state) {
    require_2d(grid);
    const int n0 = grid.dim_spec(0).count;
    const int n1 = grid.dim_spec(1).count;
    std::string out;
    for (int i = 0; i < n0; ++i) out += "," + dtos(grid.node(0, i));
    out += "\n";
    for (int j = 0; j < n1; ++j) {
        out += dtos(grid.node(1, j));
        for (int i = 0; i < n0; ++i)
            out += "," + std::to_string(per_state[static_cast<std::size_t>(i) * n1 + j]);
        out += "\n";
    }
    return out;
}

std::vector<double> grid_quantity_values(GridQuantity what, const TabularMDP& mdp,
                                         const Solution& sol, const RewardSpec& rewards) {
    const int n = mdp.n_states();
    std::vector<double> out(static_cast<std::size_t>(n));
    switch (what) {
        case GridQuantity::value:
            return sol.v;
        case GridQuantity::policy:
            for (int s = 0; s < n; ++s)
                out[static_cast<std::size_t>(s)] = sol.policy.greedy[static_cast<std::size_t>(s)];
            return out;
        case GridQuantity::reward_field:
            for (int s = 0; s < n; ++s)
                out[static_cast<std::size_t>(s)] = total_reward(rewards, mdp, s, 0, s);
            return out;
        case GridQuantity::potential:
            if (rewards.terms.empty())
                throw std::invalid_argument("potential export needs at least one shaping term");
            for (int s = 0; s < n; ++s)
                out[static_cast<std::size_t>(s)] =
                    potential_value(rewards.terms[0].potential, mdp, s);
            return out;
    }
    return out;
}

std::string solution_csv(const TabularMDP& mdp, const Solution& sol,
                         std::span<const std::string> coord_names) {
    std::string out = "state";
    for (const auto& n : coord_names) out += "," + n;
    out += ",value,greedy_action\n";
    for (int s = 0; s < mdp.n_states(); ++s) {
        out += std::to_string(s);
        for (double c : mdp.coords(s)) out += "," + dtos(c);
        out += "," + dtos(sol.v[static_cast<std::size_t>(s)]) + "," +
               std::to_string(sol.policy.greedy[static_cast<std::size_t>(s)]) + "\n";
    }
    return out;
}

std::string sweep_csv(std::span<const std::string> term_labels,
                      std::span<const SweepResult> sweeps) {
    std::string out =
        "term,mode,multiplier,exact_agreement,tie_aware_agreement,value_regret,mean_return,"
        "solved\n";
    for (std::size_t t = 0; t < sweeps.size(); ++t) {
        for (const SweepCell& cell : sweeps[t].cells) {
            out += term_labels[t];
            out += ",";
            out += to_string(cell.mode);
            out += "," + dtos(cell.multiplier);
            out += "," + dtos(cell.agreement.exact_agreement);
            out += "," + dtos(cell.agreement.tie_aware_agreement);
            out += "," + dtos(cell.agreement.value_regret);
            out += "," + dtos(cell.agreement.candidate_return);
            out += cell.solved ? ",1\n" : ",0\n";
        }
    }
    return out;
}

std::string qtable_json(const QTable& q) {
    json j;
    j["n_states"] = q.n_states;
    j["n_actions"] = q.n_actions;
    j["gamma"] = q.gamma;
    j["values"] = q.values;
    return j.dump() + "\n";
}

std::string agreement_json(const AgreementReport& rep) {
    json j;
    j["exact_agreement"] = rep.exact_agreement;
    j["tie_aware_agreement"] = rep.tie_aware_agreement;
    j["value_regret"] = rep.value_regret;
    j["candidate_return"] = rep.candidate_return;
    return j.dump(2) + "\n";
}

std::string invariance_json(const InvarianceReport& rep) {
    json j;
    j["max_value_offset_dev"] = rep.max_value_offset_dev;
    j["max_advantage_dev"] = rep.max_advantage_dev;
    j["tie_set_mismatches"] = rep.tie_set_mismatches;
    j["identity_tol"] = rep.identity_tol;
    j["pass"] = rep.pass();
    return j.dump(2) + "\n";
}

namespace {

json cell_to_json(const SweepCell& cell) {
    json j;
    j["mode"] = to_string(cell.mode);
    j["multiplier"] = cell.multiplier;
    j["solved"] = cell.solved;
    if (!cell.error.empty()) j["error"] = cell.error;
    j["exact_agreement"] = cell.agreement.exact_agreement;
    j["tie_aware_agreement"] = cell.agreement.tie_aware_agreement;
    j["value_regret"] = cell.agreement.value_regret;
    j["mean_return"] = cell.agreement.candidate_return;
    return j;
}

}  // namespace

std::string sweep_result_json(std::span<const std::string> term_labels,
                              std::span<const SweepResult> sweeps) {
    json j = json::array();
    for (std::size_t t = 0; t < sweeps.size(); ++t) {
        json jt;
        jt["term"] = term_labels[t];
        jt["multipliers"] = sweeps[t].multipliers;
        jt["cells"] = json::array();
        for (const SweepCell& cell : sweeps[t].cells) jt["cells"].push_back(cell_to_json(cell));
        j.push_back(jt);
    }
    return j.dump(2) + "\n";
}

std::string distribution_json(const TermDistribution& dist) {
    json j = json::array();
    for (const TermStats& t : dist.terms) {
        json jt;
        jt["label"] = t.label;
        jt["mean"] = t.mean;
        jt["stddev"] = t.stddev;
        jt["min"] = t.min;
        jt["max"] = t.max;
        jt["n_samples"] = t.n_samples;
        jt["histogram"] = t.histogram;
        j.push_back(jt);
    }
    return j.dump(2) + "\n";
}

std::string manifest_json(const ManifestInfo& info) {
    json j;
    j["version"] = version_string();
    if (info.config) {
        // Echo without the output path so re-runs into different directories
        // stay comparable.
        ExperimentConfig echo = *info.config;
        echo.output_dir.clear();
        j["config"] = json::parse(serialize_config(echo));
    }
    j["artifacts"] = json::array();
    for (const Artifact& a : info.artifacts)
        j["artifacts"].push_back({{"name", a.name}, {"bytes", a.bytes}, {"fnv64", a.fnv64}});
    j["solves"] = json::array();
    for (const SolveReport& r : info.solves)
        j["solves"].push_back({{"iterations", r.iterations},
                               {"converged", r.converged},
                               {"final_residual", r.final_residual()},
                               {"tolerance", r.tolerance}});
    j["converged"] = info.converged;
    j["timing"] = {{"wall_time_s", info.wall_time_s}};
    return j.dump(2) + "\n";
}

}  // namespace shapelab
