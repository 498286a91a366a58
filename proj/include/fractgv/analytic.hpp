#pragma once

// Closed-form continuum values used as references by the limit checks.

#include <cmath>

namespace fractgv::analytic {

/// |x|_{W^{s,1}(0,1)} = int int |x - y|^{-s} dx dy.
inline double linear_seminorm_s1(double s) { return 2.0 / ((1.0 - s) * (2.0 - s)); }

/// (1 - s) |x|_{W^{s,1}(0,1)}.
inline double linear_bbm_value(double s) { return 2.0 / (2.0 - s); }

/// |1_{(0,1)}|_{W^{s,1}(R)}.
inline double indicator_line_seminorm(double s) { return 4.0 / (s * (1.0 - s)); }

/// Same, with both variables restricted to (-L, 1 + L).
inline double indicator_truncated_seminorm(double s, double L) {
  const double tail = std::pow(1.0 + L, 1.0 - s) - std::pow(L, 1.0 - s);
  return 4.0 / (s * (1.0 - s)) * (1.0 - tail);
}

/// s |1_{(0,1)}|_{W^{s,1}(R)} = 4 / (1 - s).
inline double indicator_ms_value(double s) { return 4.0 / (1.0 - s); }

}  // namespace fractgv::analytic
