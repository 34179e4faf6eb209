#include "shapelab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace shapelab {

namespace {

constexpr char kMagic[8] = {'S', 'H', 'L', 'M', 'D', 'P', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    write_pod(out, n);
    if (n) out.write(reinterpret_cast<const char*>(v.data()), sizeof(T) * n);
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void read_vec(std::ifstream& in, std::vector<T>& v) {
    std::uint64_t n = 0;
    read_pod(in, n);
    v.resize(n);
    if (n) in.read(reinterpret_cast<char*>(v.data()), sizeof(T) * n);
}

}  // namespace

double TabularMDP::native_reward(int s, int a, int s_next) const {
    for (const Transition& t : row(s, a)) {
        if (t.next == s_next) return t.reward;
        if (t.next > s_next) break;  // rows are sorted
    }
    return 0.0;
}

void TabularMDP::check_state(int s) const {
    if (s < 0 || s >= n_states_)
        throw std::out_of_range("state index " + std::to_string(s) + " out of range [0, " +
                                std::to_string(n_states_) + ")");
}

void TabularMDP::check_action(int a) const {
    if (a < 0 || a >= n_actions_)
        throw std::out_of_range("action index " + std::to_string(a) + " out of range [0, " +
                                std::to_string(n_actions_) + ")");
}

void TabularMDP::validate() const {
    if (n_states_ <= 0 || n_actions_ <= 0)
        throw std::invalid_argument("TabularMDP: empty state or action set");
    if (state_coords_.size() != static_cast<std::size_t>(n_states_) * coord_dim_ ||
        terminal_.size() != static_cast<std::size_t>(n_states_) ||
        row_ptr_.size() != static_cast<std::size_t>(n_states_) * n_actions_ + 1)
        throw std::invalid_argument("TabularMDP: inconsistent array sizes");

    for (int s = 0; s < n_states_; ++s) {
        for (int a = 0; a < n_actions_; ++a) {
            const auto r = row(s, a);
            if (r.empty())
                throw std::invalid_argument("TabularMDP: empty transition row at (s=" +
                                            std::to_string(s) + ", a=" + std::to_string(a) + ")");
            double sum = 0.0;
            std::int32_t prev = -1;
            for (const Transition& t : r) {
                if (t.next < 0 || t.next >= n_states_)
                    throw std::invalid_argument("TabularMDP: next-state index out of range");
                if (t.next <= prev)
                    throw std::invalid_argument("TabularMDP: row not sorted/deduplicated");
                if (!(t.prob > 0.0))
                    throw std::invalid_argument("TabularMDP: non-positive transition probability");
                prev = t.next;
                sum += t.prob;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("TabularMDP: row (s=" + std::to_string(s) +
                                            ", a=" + std::to_string(a) +
                                            ") probabilities sum to " + std::to_string(sum));
            if (terminal_[s] && !(r.size() == 1 && r[0].next == s))
                throw std::invalid_argument(
                    "TabularMDP: terminal state must self-transition with probability 1");
        }
    }
}

void TabularMDP::save_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, n_states_);
    write_pod(out, n_actions_);
    write_pod(out, coord_dim_);
    const std::uint8_t has_plant = plant_.has_value() ? 1 : 0;
    write_pod(out, has_plant);
    if (plant_) {
        write_pod(out, plant_->mass);
        write_pod(out, plant_->gravity);
        write_pod(out, plant_->length);
        write_pod(out, plant_->dt);
        write_pod(out, plant_->torque_limit);
        write_pod(out, plant_->damping);
    }
    write_vec(out, state_coords_);
    write_vec(out, terminal_);
    write_vec(out, row_ptr_);
    // Transition has internal padding; store the fields as parallel arrays.
    std::vector<std::int32_t> nexts(entries_.size());
    std::vector<double> probs(entries_.size()), rewards(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        nexts[i] = entries_[i].next;
        probs[i] = entries_[i].prob;
        rewards[i] = entries_[i].reward;
    }
    write_vec(out, nexts);
    write_vec(out, probs);
    write_vec(out, rewards);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TabularMDP TabularMDP::load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a shapelab MDP file: " + path);
    TabularMDP m;
    read_pod(in, m.n_states_);
    read_pod(in, m.n_actions_);
    read_pod(in, m.coord_dim_);
    std::uint8_t has_plant = 0;
    read_pod(in, has_plant);
    if (has_plant) {
        PendulumParams p;
        read_pod(in, p.mass);
        read_pod(in, p.gravity);
        read_pod(in, p.length);
        read_pod(in, p.dt);
        read_pod(in, p.torque_limit);
        read_pod(in, p.damping);
        m.plant_ = p;
    }
    read_vec(in, m.state_coords_);
    read_vec(in, m.terminal_);
    read_vec(in, m.row_ptr_);
    std::vector<std::int32_t> nexts;
    std::vector<double> probs, rewards;
    read_vec(in, nexts);
    read_vec(in, probs);
    read_vec(in, rewards);
    if (!in || probs.size() != nexts.size() || rewards.size() != nexts.size())
        throw std::runtime_error("truncated MDP file: " + path);
    m.entries_.resize(nexts.size());
    for (std::size_t i = 0; i < nexts.size(); ++i)
        m.entries_[i] = Transition{nexts[i], probs[i], rewards[i]};
    m.validate();
    return m;
}

MdpBuilder::MdpBuilder(int n_states, int n_actions, int coord_dim)
    : n_states_(n_states),
      n_actions_(n_actions),
      coord_dim_(coord_dim),
      coords_(static_cast<std::size_t>(n_states) * coord_dim, 0.0),
      terminal_(n_states, 0),
      rows_(static_cast<std::size_t>(n_states) * n_actions) {
    if (n_states <= 0 || n_actions <= 0 || coord_dim < 0)
        throw std::invalid_argument("MdpBuilder: invalid dimensions");
}

void MdpBuilder::set_coords(int s, std::span<const double> c) {
    if (c.size() != static_cast<std::size_t>(coord_dim_))
        throw std::invalid_argument("MdpBuilder: coordinate dimension mismatch");
    std::copy(c.begin(), c.end(), coords_.begin() + static_cast<std::size_t>(s) * coord_dim_);
}

void MdpBuilder::set_terminal(int s, bool t) { terminal_[static_cast<std::size_t>(s)] = t ? 1 : 0; }

void MdpBuilder::set_row(int s, int a, std::vector<Transition> entries) {
    rows_[static_cast<std::size_t>(s) * n_actions_ + a] = std::move(entries);
}

TabularMDP MdpBuilder::build() {
    TabularMDP m;
    m.n_states_ = n_states_;
    m.n_actions_ = n_actions_;
    m.coord_dim_ = coord_dim_;
    m.state_coords_ = std::move(coords_);
    m.terminal_ = std::move(terminal_);
    m.plant_ = plant_;

    std::size_t total = 0;
    for (auto& r : rows_) {
        // Canonical row order: sorted by next state, duplicates merged.
        std::sort(r.begin(), r.end(),
                  [](const Transition& x, const Transition& y) { return x.next < y.next; });
        std::vector<Transition> merged;
        merged.reserve(r.size());
        for (const Transition& t : r) {
            if (!merged.empty() && merged.back().next == t.next) {
                merged.back().prob += t.prob;
            } else {
                merged.push_back(t);
            }
        }
        r = std::move(merged);
        total += r.size();
    }
    m.row_ptr_.resize(rows_.size() + 1);
    m.entries_.reserve(total);
    m.row_ptr_[0] = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        m.entries_.insert(m.entries_.end(), rows_[i].begin(), rows_[i].end());
        m.row_ptr_[i + 1] = m.entries_.size();
    }
    m.validate();
    return m;
}

}  // namespace shapelab
