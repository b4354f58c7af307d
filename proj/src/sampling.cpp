#include "levelflow/sampling.hpp"

#include <cmath>
#include <numbers>

namespace levelflow {

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

std::vector<Point2> annulus_points(double r0, double r1, std::size_t count, std::uint64_t seed, Point2 center) {
  std::vector<Point2> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t i = seed + k + 1;
    const double a = radical_inverse(i, 2), b = radical_inverse(i, 3);
    const double r = std::sqrt(r0 * r0 + a * (r1 * r1 - r0 * r0));
    const double th = 2.0 * std::numbers::pi * b;
    pts.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
  }
  return pts;
}

std::vector<Point2> box_points(double x0, double x1, double y0, double y1, std::size_t count, std::uint64_t seed) {
  std::vector<Point2> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t i = seed + k + 1;
    pts.push_back({x0 + (x1 - x0) * radical_inverse(i, 2), y0 + (y1 - y0) * radical_inverse(i, 3)});
  }
  return pts;
}

}  // namespace levelflow
