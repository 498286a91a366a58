#pragma once

#include <limits>
#include <span>
#include <vector>

#include "fractgv/signal.hpp"

namespace fractgv {

/// Componentwise clamp to [-radius, radius].
std::vector<double> clip_linf(std::span<const double> z, double radius);
void clip_linf_inplace(std::span<double> z, double radius);

double clip_interval(double t, double radius);

/// ||z||_q, evaluated as max|z| * (sum (|z_i|/max)^q)^{1/q} so large q does not
/// overflow. q = infinity is accepted.
double lq_norm(std::span<const double> z, double q);

struct LqProjectionOptions {
  double tol = 1e-10;  // relative, on ||y||_q - radius
  int max_outer = 200;
};

struct LqProjectionInfo {
  int outer_iterations = 0;
  /// log of the KKT multiplier mu of ||y||_q^q <= radius^q (-inf when the
  /// constraint is inactive). Kept in log form: mu itself over- or underflows
  /// for large q.
  double log_multiplier = -std::numeric_limits<double>::infinity();
  bool active = false;
};

/// Euclidean projection onto {y : ||y||_q <= radius}, q > 1.
///
/// Inside the ball z is returned unchanged. Otherwise each coordinate solves
/// y + mu q |y|^{q-1} sign(y) = z for a common mu >= 0, found by a bracketed
/// search in log(mu) until | ||y||_q - radius | <= tol * radius. q == 2 is the
/// radial scaling and q >= 1e6 is treated as the l-infinity ball.
///
/// `warm_log_multiplier`, when finite, seeds the search. Throws NumericError when
/// the search does not converge within max_outer iterations.
LqProjectionInfo project_lq_ball_inplace(std::span<double> z, double q, double radius,
                                         const LqProjectionOptions& options = {},
                                         double warm_log_multiplier =
                                             -std::numeric_limits<double>::infinity());

std::vector<double> project_lq_ball(std::span<const double> z, double q, double radius,
                                    double tol = 1e-10);

/// argmin_u 1/(2 step) ||u - u_bar||^2 + h sum (u_i - u_eta_i)^2, i.e.
/// (u_bar_i + 2 step h u_eta_i) / (1 + 2 step h).
std::vector<double> prox_fidelity(std::span<const double> u_bar, const Signal& u_eta, double step);
void prox_fidelity_inplace(std::span<double> u, std::span<const double> u_eta, double h,
                           double step);

}  // namespace fractgv
