#include "shapelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shapelab {

namespace {
// Fractions within this distance of a node are snapped onto it, so grid
// nodes reproduce themselves exactly under interpolation.
constexpr double kNodeSnap = 1e-9;
}  // namespace

void GridDim::validate() const {
    if (count < 2) throw std::invalid_argument("grid dimension: count must be >= 2");
    if (!(lo < hi)) throw std::invalid_argument("grid dimension: min must be < max");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("grid dimension: bounds must be finite");
}

void ActionGrid::validate() const {
    if (count < 1) throw std::invalid_argument("action grid: count must be >= 1");
    if (!(lo <= hi)) throw std::invalid_argument("action grid: min must be <= max");
}

double ActionGrid::torque(int a) const {
    if (count == 1) return lo;
    return lo + (hi - lo) * (static_cast<double>(a) / (count - 1));
}

std::vector<double> ActionGrid::torques() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int a = 0; a < count; ++a) out[static_cast<std::size_t>(a)] = torque(a);
    return out;
}

void GridSpec::validate() const {
    if (dims.empty()) throw std::invalid_argument("grid: needs at least one dimension");
    std::int64_t n = 1;
    for (const GridDim& d : dims) {
        d.validate();
        n *= d.count;
        if (n > state_cap)
            throw std::invalid_argument("grid: state count exceeds cap of " +
                                        std::to_string(state_cap));
    }
    action.validate();
}

Grid::Grid(std::vector<GridDim> dims, std::int64_t state_cap) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("grid: needs at least one dimension");
    step_.resize(dims_.size());
    stride_.resize(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        dims_[d].validate();
        step_[d] = (dims_[d].hi - dims_[d].lo) /
                   (dims_[d].periodic ? dims_[d].count : dims_[d].count - 1);
        size_ *= dims_[d].count;
        if (size_ > state_cap)
            throw std::invalid_argument("grid: state count exceeds cap of " +
                                        std::to_string(state_cap));
    }
    // Row-major: last dimension varies fastest.
    std::int64_t acc = 1;
    for (std::size_t d = dims_.size(); d-- > 0;) {
        stride_[d] = acc;
        acc *= dims_[d].count;
    }
}

double Grid::node(int d, int i) const {
    const GridDim& g = dims_[static_cast<std::size_t>(d)];
    const int denom = g.periodic ? g.count : g.count - 1;
    return g.lo + (g.hi - g.lo) * (static_cast<double>(i) / denom);
}

std::int64_t Grid::index(std::span<const int> multi) const {
    std::int64_t idx = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d) idx += stride_[d] * multi[d];
    return idx;
}

void Grid::unravel(std::int64_t idx, std::span<int> multi) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        multi[d] = static_cast<int>(idx / stride_[d]);
        idx %= stride_[d];
    }
}

void Grid::coords(std::int64_t idx, std::span<double> out) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const int i = static_cast<int>(idx / stride_[d]);
        idx %= stride_[d];
        out[d] = node(static_cast<int>(d), i);
    }
}

std::vector<double> Grid::coords(std::int64_t idx) const {
    std::vector<double> out(dims_.size());
    coords(idx, out);
    return out;
}

double Grid::clamp(int d, double x) const {
    const GridDim& g = dims_[static_cast<std::size_t>(d)];
    if (!g.periodic) return std::clamp(x, g.lo, g.hi);
    const double span = g.hi - g.lo;
    double w = std::fmod(x - g.lo, span);
    if (w < 0.0) w += span;
    const double y = g.lo + w;
    return y >= g.hi ? g.lo : y;
}

std::pair<int, double> Grid::locate(int d, double x) const {
    const GridDim& g = dims_[static_cast<std::size_t>(d)];
    x = clamp(d, x);
    double u = (x - g.lo) / step_[static_cast<std::size_t>(d)];
    const int cells = g.periodic ? g.count : g.count - 1;
    int i = static_cast<int>(std::floor(u));
    if (i < 0) i = 0;
    if (i > cells - 1) i = cells - 1;
    double t = u - i;
    if (t <= kNodeSnap) {
        t = 0.0;
    } else if (t >= 1.0 - kNodeSnap) {
        i += 1;
        t = 0.0;
        if (i == g.count && !g.periodic) i = g.count - 1;
        if (i == g.count && g.periodic) i = 0;
    }
    return {i, t};
}

std::vector<std::pair<std::int64_t, double>> Grid::interp_weights(
    std::span<const double> point) const {
    const int nd = dim();
    if (point.size() != static_cast<std::size_t>(nd))
        throw std::invalid_argument("interp_weights: point dimension mismatch");

    // Per-dimension node/weight pairs; a snapped dimension contributes one.
    struct DimNodes {
        int node[2];
        double w[2];
        int n;
    };
    std::vector<DimNodes> per_dim(static_cast<std::size_t>(nd));
    std::int64_t n_corners = 1;
    for (int d = 0; d < nd; ++d) {
        const auto [i, t] = locate(d, point[d]);
        DimNodes& dn = per_dim[static_cast<std::size_t>(d)];
        if (t == 0.0) {
            dn.node[0] = i;
            dn.w[0] = 1.0;
            dn.n = 1;
        } else {
            const GridDim& g = dims_[static_cast<std::size_t>(d)];
            const int up = (i + 1 == g.count) ? (g.periodic ? 0 : i) : i + 1;
            dn.node[0] = i;
            dn.w[0] = 1.0 - t;
            dn.node[1] = up;
            dn.w[1] = t;
            dn.n = 2;
        }
        n_corners *= dn.n;
    }

    std::vector<std::pair<std::int64_t, double>> out;
    out.reserve(static_cast<std::size_t>(n_corners));
    std::vector<int> pick(static_cast<std::size_t>(nd), 0);
    for (std::int64_t corner = 0; corner < n_corners; ++corner) {
        std::int64_t idx = 0;
        double w = 1.0;
        for (int d = 0; d < nd; ++d) {
            const DimNodes& dn = per_dim[static_cast<std::size_t>(d)];
            idx += stride_[static_cast<std::size_t>(d)] * dn.node[pick[static_cast<std::size_t>(d)]];
            w *= dn.w[pick[static_cast<std::size_t>(d)]];
        }
        out.emplace_back(idx, w);
        // Advance the mixed-radix corner counter (last dimension fastest).
        for (int d = nd - 1; d >= 0; --d) {
            auto& p = pick[static_cast<std::size_t>(d)];
            if (++p < per_dim[static_cast<std::size_t>(d)].n) break;
            p = 0;
        }
    }
    return out;
}

std::int64_t Grid::nearest(std::span<const double> point) const {
    const auto ws = interp_weights(point);
    std::int64_t best = ws[0].first;
    double best_w = ws[0].second;
    for (const auto& [idx, w] : ws) {
        if (w > best_w || (w == best_w && idx < best)) {
            best = idx;
            best_w = w;
        }
    }
    return best;
}

}  // namespace shapelab
