#include "power_sum.hpp"

#include <cmath>

namespace fractgv::detail {

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
__attribute__((target_clones("avx2", "default")))
#endif
double power_sum(std::span<const double> z, double p, double scale) {
  const double* data = z.data();
  const std::size_t n = z.size();
  double sum = 0.0;
#pragma omp simd reduction(+ : sum)
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(data[i]) * scale;
    sum += a > 0.0 ? std::exp(p * std::log(a)) : 0.0;
  }
  return sum;
}

}  // namespace fractgv::detail
