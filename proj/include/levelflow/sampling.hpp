#pragma once

#include <cstdint>
#include <vector>

#include "levelflow/field.hpp"

namespace levelflow {

/// Radical inverse of `index` in `base` (Halton coordinate).
double radical_inverse(std::uint64_t index, unsigned base);

/// Area-uniform quasi-random points in r0 < |z - center| < r1, from the
/// (2, 3) Halton sequence starting at index seed + 1.
std::vector<Point2> annulus_points(double r0, double r1, std::size_t count, std::uint64_t seed = 0,
                                   Point2 center = {});

/// Quasi-random points in the box [x0, x1] x [y0, y1].
std::vector<Point2> box_points(double x0, double x1, double y0, double y1, std::size_t count, std::uint64_t seed = 0);

}  // namespace levelflow
