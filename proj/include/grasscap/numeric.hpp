#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace grasscap::detail {

// Floor of a real-valued expression evaluated in doubles. Snaps to the
// ceiling when the argument sits within a relative 1e-9 of it, absorbing
// representation error of inputs like 1e-4 whose exact power lands on an
// integer (e.g. (1/1e-4)^0.75 = 1000).
inline double floor_tol(double x) {
  const double c = std::ceil(x);
  const double tol = 1e-9 * std::max(1.0, std::fabs(x));
  if (c - x <= std::min(tol, 0.25)) return c;
  return std::floor(x);
}

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

inline double log2_of(double x) { return std::log2(x); }

}  // namespace grasscap::detail
