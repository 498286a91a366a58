#pragma once

// Lower-level problem: minimise
//
//   F(u) = h sum (u_i - u_eta_i)^2 + TGV^r_alpha(u)
//
// jointly over u and the auxiliary v-fields with a first-order primal-dual
// iteration on the saddle-point form  min_x max_y <Kx, y> + G(x) - F*(y).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "fractgv/config.hpp"
#include "fractgv/fracnorm.hpp"
#include "fractgv/signal.hpp"

namespace fractgv {

/// Fractional parts below this snap to the integer order k; parts above
/// 1 - kSnapEpsilon snap up to k + 1.
inline constexpr double kSnapEpsilon = 1e-9;

/// r = k + s with k = floor(r) >= 1 and 0 <= s < 1.
class FracOrder {
 public:
  explicit FracOrder(double r);

  double r() const { return r_; }
  int k() const { return k_; }
  double s() const { return s_; }
  bool is_integer() const { return s_ == 0.0; }
  /// p = 1 + s(1 - s); meaningful only for fractional orders.
  double gagliardo_p() const { return 1.0 + s_ * (1.0 - s_); }

 private:
  double r_;
  int k_;
  double s_;
};

/// alpha = (alpha_0, ..., alpha_k), k = floor(r). All components finite and
/// >= 0; all-zero is the degenerate "no regularisation" point.
struct Weights {
  std::vector<double> alpha;

  bool degenerate() const;
};

/// One value is broadcast to k + 1 components; otherwise the count must be
/// k + 1. Throws std::invalid_argument.
Weights make_weights(std::span<const double> alpha, const FracOrder& order);

/// scalar: sigma = tau = 0.99 / ||K||. block_diagonal: one step per primal
/// and dual block from the largest absolute row / column sum of K inside the
/// block (so every dual projection stays Euclidean), with the difference rows
/// down-weighted, then rescaled by 0.99 / ||Sigma^1/2 K T^1/2||.
enum class StepRule { scalar, block_diagonal };

struct SolverOptions {
  int max_iter = 20000;
  double tol_rel = 1e-6;
  int window = 50;
  double safety = 1.05;  // multiplies the power-method norm estimate
  int opnorm_iters = 100;
  Quadrature quadrature = Quadrature::cell_exact;
  StepRule steps = StepRule::block_diagonal;
};

void validate(const SolverOptions& options);

/// Reads max_iter, tol_rel, window, safety, opnorm_iters, quadrature
/// (cell_exact | midpoint) and steps (scalar | block_diagonal); missing keys
/// keep the values already in `options`.
void apply_config(const KeyValueConfig& config, SolverOptions& options);

struct DenoiseProblem {
  Signal u_eta;
  FracOrder order;
  Weights weights;
  SolverOptions options;
};

struct EnergyTerms {
  double energy = 0.0;
  double fidelity = 0.0;
  double tgv = 0.0;
};

using VFields = std::vector<std::vector<double>>;

/// Number of auxiliary fields: k for fractional orders, k - 1 for integer k.
int v_field_count(const FracOrder& order);

/// Evaluates the discrete functional. Measure residuals on gap i use the
/// left-node value of the coupled v-field:
///
///   fractional k = 1:  a0 sum|d_i u - s h v0_i| + a1 s(1-s) |v0|_{W^{s,p}}
///                      + a0 s(1-s) |h sum v0|
///   fractional k >= 2: a0 sum|d u - h v0| + ... + a_{k-1} sum|d v_{k-2} - s h v_{k-1}|
///                      + a_k s(1-s) |v_{k-1}|_{W^{s,p}} + a_{k-1} s(1-s) |h sum v_{k-1}|
///   integer k:         a0 sum|d u - h v0| + ... + a_{k-1} sum|d v_{k-2}|
///
/// Throws std::invalid_argument on dimension mismatch.
EnergyTerms discrete_energy(std::span<const double> u, const VFields& v_fields,
                            const DenoiseProblem& problem);

/// Real linear map with an exact adjoint.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void adjoint(std::span<const double> y, std::span<double> x) const = 0;
};

/// Power iteration on K*K from a seeded start vector; returns
/// safety * sqrt(Rayleigh quotient) after `iters` steps.
double estimate_opnorm(const LinearMap& K, int iters = 100, double safety = 1.05,
                       std::uint64_t seed = 0x5eedULL);

/// The operator K of the saddle-point form.
///
/// Primal layout: [u]? [v_0] ... [v_{m-1}], each block of length n (u is
/// omitted when the operator is built for the seminorm with u frozen).
/// Dual layout: one block of n - 1 measure residuals per chain link, then for
/// fractional orders the difference block and one mean entry.
///
/// The difference block stores the antisymmetric ordered-pair vector
/// z_ij = (v_i - v_j) w_ij^{1/p} through its i < j half, scaled by sqrt(2), so
/// that the inner product and K*K match the full n(n-1) representation
/// exactly. Its dual ball is ||y||_q <= beta 2^{1/2 - 1/q}.
class SaddleOperator final : public LinearMap {
 public:
  SaddleOperator(const Grid& grid, const FracOrder& order, const Weights& weights,
                 Quadrature quadrature, bool include_u = true);

  std::size_t rows() const override { return dual_size_; }
  std::size_t cols() const override { return primal_size_; }
  void apply(std::span<const double> x, std::span<double> y) const override;
  void adjoint(std::span<const double> y, std::span<double> x) const override;

  const Grid& grid() const { return grid_; }
  const FracOrder& order() const { return order_; }
  const Weights& weights() const { return weights_; }
  bool includes_u() const { return include_u_; }
  int v_fields() const { return v_fields_; }
  int measure_links() const { return links_; }
  bool fractional() const { return !order_.is_integer(); }

  std::size_t v_offset(int j) const;
  std::size_t link_offset(int j) const { return static_cast<std::size_t>(j) * (grid_.n - 1); }
  std::size_t pair_offset() const { return static_cast<std::size_t>(links_) * (grid_.n - 1); }
  std::size_t pair_count() const { return pairs_; }
  std::size_t mean_offset() const { return pair_offset() + pairs_; }

  /// Dual radii: alpha_j for link j; the difference block radius in the
  /// stored (half, sqrt 2 scaled) representation; the mean-term radius.
  double link_radius(int j) const { return weights_.alpha[static_cast<std::size_t>(j)]; }
  double pair_radius() const;
  double mean_radius() const;
  double pair_q() const;
  /// Largest stored difference coefficient, sqrt(2) w_1^{1/p}.
  double max_pair_coeff() const { return pair_coeff_.size() > 1 ? pair_coeff_[1] : 0.0; }

  /// alpha_k s(1-s) |v|_{W^{s,p}} + mean term from an evaluated dual-space
  /// vector y = Kx; used for energies without a second pass over the pairs.
  double fractional_terms(std::span<const double> kx) const;
  double measure_terms(std::span<const double> kx) const;

  /// sum_j |K_ij| into `row_sums`, sum_i |K_ij| into `col_sums`.
  void abs_sums(std::span<double> row_sums, std::span<double> col_sums, double pair_scale = 1.0) const;

  const FracDiffWeights* frac_weights() const { return frac_weights_.get(); }

 private:
  Grid grid_;
  FracOrder order_;
  Weights weights_;
  bool include_u_;
  int v_fields_ = 0;
  int links_ = 0;
  std::size_t pairs_ = 0;
  std::size_t primal_size_ = 0;
  std::size_t dual_size_ = 0;
  std::shared_ptr<const FracDiffWeights> frac_weights_;
  std::vector<double> pair_coeff_;  // sqrt(2) w_k^{1/p} by offset k
};

SaddleOperator build_K(const FracOrder& order, const Weights& weights, const Grid& grid,
                       Quadrature quadrature = Quadrature::cell_exact);

struct DenoiseResult {
  Signal u_opt;
  VFields v_fields;
  double energy = 0.0;
  double tgv_value = 0.0;
  double fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
  double dual_residual = 0.0;     // ||(K* y)_v||
  double energy_change = 0.0;     // relative change over the last window
};

/// Primal-dual iteration (steps per options.steps), returning the
/// best-energy iterate. Stops when the relative energy change over `window`
/// iterations and the v-block of K*y both drop below tol_rel, or at max_iter
/// (converged = false). All-zero weights return u_eta untouched.
/// Throws NumericError when an iterate turns non-finite.
DenoiseResult solve(const DenoiseProblem& problem);

/// Exact 1D ROF, the r = 1 problem: argmin h sum (u - u_eta)^2 + alpha0 sum |d u|.
/// Direct taut-string style algorithm (no iteration count, no tolerance).
Signal tv_denoise_exact(const Signal& u_eta, double alpha0);

struct SeminormResult {
  double value = 0.0;
  VFields v_fields;
  int iterations = 0;
  bool converged = true;
};

/// TGV^r_alpha(u) with u fixed: minimises over the v-fields only.
SeminormResult tgv_seminorm_detailed(const Signal& u, const FracOrder& order,
                                     const Weights& weights, const SolverOptions& options);
double tgv_seminorm(const Signal& u, const FracOrder& order, const Weights& weights,
                    const SolverOptions& options);

struct TgvSweep {
  std::vector<SweepRow> rows;  // (s, TGV^{1+s}(u))
  double tgv2 = 0.0;           // integer-order TGV^2 with (alpha_0, alpha_1)
  double alpha0_tv = 0.0;      // alpha_0 tv(u)
};

/// alpha = (alpha_0, alpha_1).
TgvSweep limit_sweep_tgv(const Signal& u, std::span<const double> alpha,
                         std::span<const double> s_list, const SolverOptions& options);

}  // namespace fractgv
