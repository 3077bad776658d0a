#include "kmu/sampling.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace kmu {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

} // namespace

std::vector<Point> sample_points(const Chart& chart, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample count must be at least 1");
    constexpr std::array<std::uint64_t, 3> bases = {2, 3, 5};
    std::array<double, 3> shift{};
    std::uint64_t state = seed;
    for (double& s : shift) s = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;

    const std::uint64_t budget = 1000 * static_cast<std::uint64_t>(n) + 10000;
    std::vector<Point> out;
    out.reserve(n);
    for (std::uint64_t k = 1; k <= budget && out.size() < n; ++k) {
        Point p;
        for (std::size_t d = 0; d < 3; ++d) {
            double u = radical_inverse(k, bases[d]) + shift[d];
            u -= std::floor(u);
            const Interval& iv = chart.box()[d];
            p[d] = iv.lo + u * iv.width();
        }
        if (chart.admits(p)) out.push_back(p);
    }
    if (out.size() < n)
        throw DomainValidationError("domain too thin: placed " + std::to_string(out.size()) + " of " +
                                    std::to_string(n) + " points");
    return out;
}

} // namespace kmu
