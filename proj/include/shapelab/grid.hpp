#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace shapelab {

/// One grid dimension. Periodic dimensions identify `hi` with `lo`, so the
/// duplicate endpoint is excluded from the node set.
struct GridDim {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;
    bool periodic = false;

    void validate() const;
};

/// Linspace over the action (torque) range, endpoints included.
struct ActionGrid {
    double lo = -2.0;
    double hi = 2.0;
    int count = 21;

    void validate() const;
    double torque(int a) const;
    std::vector<double> torques() const;
};

/// State-space grid plus action grid for tabulating a continuous plant.
struct GridSpec {
    std::vector<GridDim> dims;
    ActionGrid action;
    std::int64_t state_cap = 10'000'000;

    void validate() const;
};

/// Row-major enumeration of the Cartesian product of per-dimension
/// linspaces, with a bijective index <-> coordinate mapping and multilinear
/// (barycentric on the enclosing cell) interpolation weights.
class Grid {
public:
    explicit Grid(std::vector<GridDim> dims, std::int64_t state_cap = 10'000'000);

    int dim() const { return static_cast<int>(dims_.size()); }
    std::int64_t size() const { return size_; }
    const GridDim& dim_spec(int d) const { return dims_[static_cast<std::size_t>(d)]; }

    /// Coordinate of node i along dimension d.
    double node(int d, int i) const;

    std::int64_t index(std::span<const int> multi) const;
    void unravel(std::int64_t idx, std::span<int> multi) const;
    void coords(std::int64_t idx, std::span<double> out) const;
    std::vector<double> coords(std::int64_t idx) const;

    /// Clamps a non-periodic coordinate into [lo, hi]; wraps a periodic one
    /// into [lo, hi).
    double clamp(int d, double x) const;

    /// Multilinear weights of `point` over the enclosing cell: at most 2^d
    /// entries, all weights > 0 summing to 1. Periodic dimensions wrap
    /// between the last and first node. A point exactly on a node yields a
    /// single weight of 1. Non-periodic coordinates are clamped.
    std::vector<std::pair<std::int64_t, double>> interp_weights(
        std::span<const double> point) const;

    /// Index of the highest-weight node of interp_weights(point), ties
    /// broken by lowest state index.
    std::int64_t nearest(std::span<const double> point) const;

private:
    // (lower node, fraction toward upper node) along dimension d, with the
    // fraction snapped to exactly 0 when the point sits on a node.
    std::pair<int, double> locate(int d, double x) const;

    std::vector<GridDim> dims_;
    std::vector<double> step_;
    std::vector<std::int64_t> stride_;
    std::int64_t size_ = 1;
};

}  // namespace shapelab
