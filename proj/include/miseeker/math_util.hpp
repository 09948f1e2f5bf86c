#pragma once

#include <cmath>

namespace miseeker {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kInvTwoPi = 1.0 / kTwoPi;
inline constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

/// Wraps an angle to (-pi, pi].
///
/// Branch-free form so the vectorized kernels can reproduce it bit for bit:
/// ceil() maps the half-open interval the right way around (wrap(pi) == pi,
/// wrap(-pi) == pi).
inline double wrap_angle(double a) {
  return a - kTwoPi * std::ceil((a - kPi) * kInvTwoPi);
}

}  // namespace miseeker
