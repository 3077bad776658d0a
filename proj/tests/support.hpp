#pragma once

#include "kmu/manifest.hpp"
#include "kmu/sampling.hpp"

#include <random>
#include <string>
#include <vector>

namespace kmu::testing {

inline const std::vector<std::string>& gallery_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& g : builtin_gallery()) out.emplace_back(g.name);
        return out;
    }();
    return names;
}

inline ContactManifold gallery(const std::string& name) { return load_manifest("builtin:" + name); }

inline std::vector<Point> points_of(const ContactManifold& m, std::size_t n = 20) {
    return sample_points(m.chart, n, default_seed);
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    Vec3 vec() { return {uniform(), uniform(), uniform()}; }
    Mat3 mat() {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = uniform();
        return m;
    }
    /// Symmetric positive definite, eigenvalues bounded away from 0.
    Mat3 spd() {
        const Mat3 a = mat();
        return a * a.transpose() + 0.5 * Mat3::Identity();
    }
};

inline double max_abs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }
inline double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace kmu::testing
