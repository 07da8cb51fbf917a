#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>

namespace ccme {

inline constexpr int kMbSize = 16;
inline constexpr int kSearchRange = 32;
inline constexpr int kWindowSide = 2 * kSearchRange + 1;

// Integer-pel displacement into the reference frame: cur(x, y) ~ ref(x + dx, y + dy).
struct MotionVector {
  int dx = 0;
  int dy = 0;

  friend constexpr auto operator<=>(const MotionVector&, const MotionVector&) = default;
};

constexpr MotionVector operator+(MotionVector a, MotionVector b) { return {a.dx + b.dx, a.dy + b.dy}; }
constexpr MotionVector operator-(MotionVector a, MotionVector b) { return {a.dx - b.dx, a.dy - b.dy}; }
constexpr MotionVector operator-(MotionVector a) { return {-a.dx, -a.dy}; }
constexpr MotionVector operator*(MotionVector a, int k) { return {a.dx * k, a.dy * k}; }

constexpr int chebyshev(MotionVector v) { return std::max(std::abs(v.dx), std::abs(v.dy)); }

constexpr bool in_window(MotionVector v, int range = kSearchRange) {
  return std::abs(v.dx) <= range && std::abs(v.dy) <= range;
}

constexpr MotionVector clamp_to_window(MotionVector v, int range = kSearchRange) {
  return {std::clamp(v.dx, -range, range), std::clamp(v.dy, -range, range)};
}

}  // namespace ccme
