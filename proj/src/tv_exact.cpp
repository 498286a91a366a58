// Exact 1D total-variation denoising,
//
//   argmin_x 1/2 sum (x_i - y_i)^2 + lambda sum |x_{i+1} - x_i|,
//
// by L. Condat's direct algorithm ("A direct algorithm for 1D total variation
// denoising", IEEE SPL 2013). Runs in O(n) on typical data, no tolerance.

#include <stdexcept>
#include <vector>

#include "fractgv/solver.hpp"

namespace fractgv {

namespace {

std::vector<double> condat_tv1d(const std::vector<double>& in, double lambda) {
  const int width = static_cast<int>(in.size());
  std::vector<double> out(in.size());
  if (width == 0) return out;
  if (lambda <= 0.0) return in;

  int k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lambda, umax = -lambda;
  double vmin = in[0] - lambda, vmax = in[0] + lambda;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;

  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do out[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = in[k0];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = in[k0];
        umax = minlambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / (k - k0 + 1);
        do out[k0++] = vmin; while (k0 <= k);
        return out;
      }
    }
    if ((umin += in[k + 1] - vmin) < minlambda) {
      do out[k0++] = vmin; while (k0 <= kminus);
      k = kplus = kminus = k0;
      vmin = in[k0];
      vmax = vmin + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += in[k + 1] - vmax) > lambda) {
      do out[k0++] = vmax; while (k0 <= kplus);
      k = kplus = kminus = k0;
      vmax = in[k0];
      vmin = vmax - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        kminus = k;
        vmin += (umin - lambda) / (kminus - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        kplus = k;
        vmax += (umax + lambda) / (kplus - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

}  // namespace

Signal tv_denoise_exact(const Signal& u_eta, double alpha0) {
  if (!(alpha0 >= 0.0)) throw std::invalid_argument("tv_denoise_exact: alpha0 must be >= 0");
  // h sum (u - u_eta)^2 + alpha0 TV(u) = 2h [1/2 sum (u - u_eta)^2 + alpha0/(2h) TV(u)]
  const double lambda = alpha0 / (2.0 * u_eta.grid().h);
  std::vector<double> in(u_eta.values().begin(), u_eta.values().end());
  return Signal(u_eta.grid(), condat_tv1d(in, lambda));
}

}  // namespace fractgv
