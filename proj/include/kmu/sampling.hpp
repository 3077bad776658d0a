#pragma once

#include "kmu/geometry.hpp"

#include <cstdint>
#include <vector>

namespace kmu {

inline constexpr std::uint64_t default_seed = 0x5EED;
inline constexpr std::size_t default_sample_count = 50;

/// Halton points (bases 2, 3, 5) under a seed-dependent Cranley-Patterson
/// shift, mapped into the chart box. Points the chart does not admit are
/// skipped in favour of the next sequence element.
std::vector<Point> sample_points(const Chart& chart, std::size_t n, std::uint64_t seed = default_seed);

} // namespace kmu
