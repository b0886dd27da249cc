#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace anisogauge {

/// SplitMix64 step; used to derive independent sub-seeds from one master seed
/// so that parallel strata get reproducible, decorrelated streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master + 0x632be59bd9b4e019ull * (stream + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(master, stream));
}

inline Eigen::VectorXd random_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd d(dim);
    do {
        for (int i = 0; i < dim; ++i) d[i] = gauss(rng);
    } while (d.norm() < 1e-12);
    d /= d.norm();
    return d;
}

/// Uniform point in [-half, half]^dim with |x| >= min_radius and every
/// coordinate at least `coordinate_clearance` in magnitude. The clearance
/// keeps samples off the coordinate hyperplanes where power-q duals lose C^2
/// smoothness.
inline Eigen::VectorXd random_test_point(std::mt19937_64& rng, int dim, double half = 2.0,
                                         double min_radius = 0.2,
                                         double coordinate_clearance = 0.05) {
    std::uniform_real_distribution<double> unif(-half, half);
    Eigen::VectorXd x(dim);
    while (true) {
        for (int i = 0; i < dim; ++i) x[i] = unif(rng);
        if (x.norm() < min_radius) continue;
        bool clear = true;
        for (int i = 0; i < dim; ++i)
            if (std::abs(x[i]) < coordinate_clearance) { clear = false; break; }
        if (clear) return x;
    }
}

} // namespace anisogauge
