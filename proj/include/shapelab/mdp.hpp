#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapelab/pendulum.hpp"

namespace shapelab {

/// One sparse transition entry. `reward` is the reward stored with the MDP
/// itself; it is zero unless the environment defines a native reward (the
/// gridworld does, the tabulated pendulum does not).
struct Transition {
    std::int32_t next = 0;
    double prob = 0.0;
    double reward = 0.0;
};

/// Finite MDP: per-(state, action) sparse transition rows in CSR layout,
/// per-state continuous coordinates, and a terminal mask.
///
/// Invariants enforced by validate():
///   - every (s, a) row is non-empty, probabilities are > 0 and sum to 1
///     within 1e-12, next-state indices are in range;
///   - rows are sorted by next-state index with no duplicates;
///   - terminal states self-transition with probability 1 for every action.
class TabularMDP {
public:
    TabularMDP() = default;

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    int coord_dim() const { return coord_dim_; }

    std::span<const Transition> row(int s, int a) const {
        const std::size_t r = flat(s, a);
        return {entries_.data() + row_ptr_[r], entries_.data() + row_ptr_[r + 1]};
    }
    std::span<const double> coords(int s) const {
        return {state_coords_.data() + static_cast<std::size_t>(s) * coord_dim_,
                static_cast<std::size_t>(coord_dim_)};
    }
    bool terminal(int s) const { return terminal_[static_cast<std::size_t>(s)] != 0; }

    /// Native reward of the stored (s, a, s_next) transition, 0 if the row
    /// has no entry for s_next.
    double native_reward(int s, int a, int s_next) const;

    /// Parameters of the continuous plant this MDP was tabulated from, if any.
    const std::optional<PendulumParams>& plant() const { return plant_; }

    void check_state(int s) const;
    void check_action(int a) const;
    void validate() const;

    /// Versioned little-endian binary round trip, used for on-disk caching.
    void save_binary(const std::string& path) const;
    static TabularMDP load_binary(const std::string& path);

    friend class MdpBuilder;

private:
    std::size_t flat(int s, int a) const {
        return static_cast<std::size_t>(s) * n_actions_ + static_cast<std::size_t>(a);
    }

    int n_states_ = 0;
    int n_actions_ = 0;
    int coord_dim_ = 0;
    std::vector<double> state_coords_;        // n_states * coord_dim
    std::vector<std::uint8_t> terminal_;      // n_states
    std::vector<std::size_t> row_ptr_;        // n_states * n_actions + 1
    std::vector<Transition> entries_;
    std::optional<PendulumParams> plant_;
};

/// Assembles a TabularMDP. Rows may be staged in any order (including from
/// parallel workers, one worker per row); build() packs them into CSR in
/// (state, action) order so the result is identical regardless of fill
/// order, then validates.
class MdpBuilder {
public:
    MdpBuilder(int n_states, int n_actions, int coord_dim);

    void set_coords(int s, std::span<const double> c);
    void set_terminal(int s, bool t = true);
    void set_row(int s, int a, std::vector<Transition> entries);
    void set_plant(const PendulumParams& p) { plant_ = p; }

    TabularMDP build();

private:
    int n_states_, n_actions_, coord_dim_;
    std::vector<double> coords_;
    std::vector<std::uint8_t> terminal_;
    std::vector<std::vector<Transition>> rows_;
    std::optional<PendulumParams> plant_;
};

}  // namespace shapelab
