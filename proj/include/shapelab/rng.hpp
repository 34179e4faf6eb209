#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "shapelab/mdp.hpp"

namespace shapelab {

/// Seeded random stream with platform-independent draws (the distributions
/// are hand-rolled so the byte stream depends only on the seed, not on the
/// standard library).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int uniform_int(int n) {
        const int v = static_cast<int>(uniform01() * n);
        return v >= n ? n - 1 : v;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Samples an index of a transition row by inverse CDF.
    int sample(std::span<const Transition> row) {
        const double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            acc += row[i].prob;
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(row.size()) - 1;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace shapelab
