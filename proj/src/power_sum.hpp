#pragma once

#include <span>

namespace fractgv::detail {

/// sum_i (|z_i| scale)^p over nonzero entries. Entries must be finite; the
/// kernel is built with finite-math and vectorised exp/log (a few ulp).
double power_sum(std::span<const double> z, double p, double scale = 1.0);

}  // namespace fractgv::detail
