#pragma once

#include <cmath>

namespace lceopt {

inline constexpr double kPi = 3.14159265358979323846;

// Wrap to [-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool contains_interior(double x, double y) const {
    return x > x0 && x < x1 && y > y0 && y < y1;
  }
};

inline double distance(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

}  // namespace lceopt
