#pragma once

#include <cmath>
#include <numbers>

namespace addt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  if (!std::isfinite(a)) return a;
  double w = std::fmod(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  if (w > kPi) w -= kTwoPi;
  return w;
}

/// Smallest absolute angular distance, in [0, pi].
inline double angular_distance(double a, double b) {
  double d = std::fmod(std::fabs(a - b), kTwoPi);
  if (d > kPi) d = kTwoPi - d;
  return d;
}

}  // namespace addt
