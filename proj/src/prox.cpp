#include "fractgv/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fractgv/errors.hpp"
#include "power_sum.hpp"

namespace fractgv {

std::vector<double> clip_linf(std::span<const double> z, double radius) {
  std::vector<double> out(z.begin(), z.end());
  clip_linf_inplace(out, radius);
  return out;
}

void clip_linf_inplace(std::span<double> z, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("clip_linf: radius must be >= 0");
  for (double& v : z) v = std::clamp(v, -radius, radius);
}

double clip_interval(double t, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("clip_interval: radius must be >= 0");
  return std::clamp(t, -radius, radius);
}

double lq_norm(std::span<const double> z, double q) {
  double max_abs = 0.0;
  for (double v : z) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0 || std::isinf(q)) return max_abs;
  return max_abs * std::pow(detail::power_sum(z, q, 1.0 / max_abs), 1.0 / q);
}

namespace {

constexpr double kLinfExponent = 1e6;

struct ScalarRoot {
  double y;   // root of y + lam y^{q-1} = a on [0, a]
  double lt;  // lam y^{q-2}, kept finite when lam or y^{q-2} alone is not
};

// Monotone Newton for q >= 2 (convex residual, iterates approach from the
// right); bracketed on [0, a] so 1 < q < 2 stays safe too.
ScalarRoot scalar_root(double a, double log_a, double log_lam, double q) {
  double hi = std::min(a, std::exp((log_a - log_lam) / (q - 1.0)));
  double lo = 0.0;
  double y = hi;
  double lt = std::exp(log_lam + (q - 2.0) * std::log(y));
  for (int it = 0; it < 100; ++it) {
    const double residual = y + lt * y - a;
    if (residual == 0.0) break;
    if (residual > 0.0) hi = y; else lo = y;
    const double slope = 1.0 + (q - 1.0) * lt;
    double next = y - residual / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - y) <= 1e-15 * y;
    y = next;
    lt = std::exp(log_lam + (q - 2.0) * std::log(y));
    if (done || hi - lo <= 1e-16 * hi) break;
  }
  return {y, lt};
}

}  // namespace

LqProjectionInfo project_lq_ball_inplace(std::span<double> z, double q, double radius,
                                         const LqProjectionOptions& options,
                                         double warm_log_multiplier) {
  if (!(q > 1.0)) throw std::invalid_argument("project_lq_ball: need q > 1");
  if (!(radius >= 0.0)) throw std::invalid_argument("project_lq_ball: radius must be >= 0");
  if (!(options.tol > 0.0)) throw std::invalid_argument("project_lq_ball: tol must be > 0");

  LqProjectionInfo info;
  if (radius == 0.0) {
    std::fill(z.begin(), z.end(), 0.0);
    info.active = true;
    return info;
  }
  if (q >= kLinfExponent) {
    double max_abs = 0.0;
    for (double v : z) max_abs = std::max(max_abs, std::abs(v));
    info.active = max_abs > radius;
    clip_linf_inplace(z, radius);
    return info;
  }
  if (q == 2.0) {
    double sq = 0.0;
    for (double v : z) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm > radius) {
      const double scale = radius / norm;
      for (double& v : z) v *= scale;
      info.active = true;
      info.log_multiplier = std::log((norm / radius - 1.0) / 2.0);
    }
    return info;
  }

  double max_abs = 0.0, sq = 0.0;
  for (double v : z) {
    max_abs = std::max(max_abs, std::abs(v));
    sq += v * v;
  }
  if (max_abs == 0.0) return info;
  // ||z||_inf <= ||z||_q, and ||z||_q <= ||z||_2 once q >= 2; the power sum
  // is only needed between the two bounds.
  if (max_abs <= radius) {
    if (q >= 2.0 && std::sqrt(sq) <= radius) return info;
    if (lq_norm(z, q) <= radius) return info;
  }
  info.active = true;

  // Work with a_i = |z_i| / max|z| in [0, 1] and target R = radius / max|z|.
  // The coordinate equation becomes y + lam y^{q-1} = a, lam = mu q max^{q-2}.
  const std::size_t n = z.size();
  std::vector<double> a(n), log_a(n), y(n), lt(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::abs(z[i]) / max_abs;
    log_a[i] = a[i] > 0.0 ? std::log(a[i]) : -std::numeric_limits<double>::infinity();
  }
  const double log_R = std::log(radius / max_abs);
  const double log_scale = std::log(q) + (q - 2.0) * std::log(max_abs);  // log(lam / mu)
  const double q_ratio = q / (q - 1.0);

  // g(theta) = log sum y^q - q log R, theta = log lam; decreasing and concave.
  // Sums are taken relative to max y so y^q may underflow for large q.
  const auto evaluate = [&](double theta, double& dg) {
    constexpr double kNegligible = -39.0;  // lam a^{q-2} < 1e-17: y == a
    double y_max = 0.0;
    std::size_t i_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0.0) {
        y[i] = 0.0;
        lt[i] = 0.0;
      } else if (theta + (q - 2.0) * log_a[i] < kNegligible) {
        y[i] = a[i];
        lt[i] = 0.0;
      } else {
        const ScalarRoot root = scalar_root(a[i], log_a[i], theta, q);
        y[i] = root.y;
        lt[i] = root.lt;
      }
      if (y[i] > y_max) {
        y_max = y[i];
        i_max = i;
      }
    }
    const double log_y_max = std::log(y_max);
    double sum = 0.0, dsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 0.0) continue;
      const double rq1 = std::exp((q - 1.0) * (std::log(y[i]) - log_y_max));
      sum += rq1 * y[i] / y_max;
      dsum += rq1 * rq1 / (1.0 + (q - 1.0) * lt[i]);
    }
    dg = -q * lt[i_max] * dsum / sum;
    return q * log_y_max + std::log(sum) - q * log_R;
  };

  // Large-lam asymptote y ~ (a / lam)^{1/(q-1)} overestimates every y_i, so
  // this start lies right of the root (g <= 0).
  double theta = 0.0;
  if (std::isfinite(warm_log_multiplier)) {
    theta = warm_log_multiplier + log_scale;
  } else {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] > 0.0) s += std::exp(q_ratio * log_a[i]);
    theta = (std::log(s) - q * log_R) / q_ratio;
  }

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_outer; ++it) {
    double dg = 0.0;
    const double g = evaluate(theta, dg);
    info.outer_iterations = it;
    residual = std::abs(std::expm1(g / q));
    if (!std::isfinite(g)) throw NumericError("project_lq_ball: non-finite norm", residual);
    if (residual <= options.tol) {
      for (std::size_t i = 0; i < n; ++i) z[i] = std::copysign(max_abs * y[i], z[i]);
      info.log_multiplier = theta - log_scale;
      return info;
    }
    if (g > 0.0) lo = theta; else hi = theta;
    double next = dg < 0.0 ? theta - g / dg : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
      else if (std::isfinite(hi)) next = hi - 4.0;
      else next = lo + 4.0;
    }
    theta = next;
  }
  throw NumericError("project_lq_ball: no convergence after " +
                         std::to_string(options.max_outer) + " iterations",
                     residual);
}

std::vector<double> project_lq_ball(std::span<const double> z, double q, double radius, double tol) {
  std::vector<double> out(z.begin(), z.end());
  LqProjectionOptions options;
  options.tol = tol;
  project_lq_ball_inplace(out, q, radius, options);
  return out;
}

void prox_fidelity_inplace(std::span<double> u, std::span<const double> u_eta, double h,
                           double step) {
  if (!(step > 0.0)) throw std::invalid_argument("prox_fidelity: step must be > 0");
  if (u.size() != u_eta.size()) throw std::invalid_argument("prox_fidelity: size mismatch");
  const double c = 2.0 * step * h;
  const double denom = 1.0 + c;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (u[i] + c * u_eta[i]) / denom;
}

std::vector<double> prox_fidelity(std::span<const double> u_bar, const Signal& u_eta, double step) {
  std::vector<double> out(u_bar.begin(), u_bar.end());
  prox_fidelity_inplace(out, u_eta.values(), u_eta.grid().h, step);
  return out;
}

}  // namespace fractgv
