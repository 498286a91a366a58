#pragma once

// Discrete Gagliardo seminorms on the midpoint grid,
//
//   |u|_{W^{s,p}}^p  ~  sum_{i != j} |u_i - u_j|^p w_ij,
//
// the ordered-pair difference operator that linearises them, and the sweeps
// used to check the s -> 1 and s -> 0 limits.

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fractgv/signal.hpp"

namespace fractgv {

struct GagliardoParams {
  double s = 0.5;
  double p = 1.0;

  /// p = 1 + s(1 - s), the exponent paired with a fractional order.
  static GagliardoParams for_fraction(double s);
};

/// Throws std::invalid_argument unless 0 < s < 1 and p >= 1 (finite).
void validate(const GagliardoParams& params);

enum class Quadrature {
  /// w_ij = integral of |x - y|^{-(1+sp)} over cell_i x cell_j. Exact for
  /// cellwise-constant signals; error O(h^{2-sp}) on smooth ones.
  cell_exact,
  /// w_ij = h^2 / |x_i - x_j|^{1+sp}. Converges like O(h^{1-sp}).
  midpoint,
};

/// Dense symmetric weight matrix with zero diagonal. The entries only depend
/// on |i - j|, so `offset_weight(k)` is the k-th Toeplitz coefficient.
class FracDiffWeights {
 public:
  FracDiffWeights(const Grid& grid, const GagliardoParams& params, Quadrature rule);

  const Grid& grid() const { return grid_; }
  const GagliardoParams& params() const { return params_; }
  Quadrature rule() const { return rule_; }
  std::size_t n() const { return grid_.n; }

  double operator()(std::size_t i, std::size_t j) const { return dense_[i * grid_.n + j]; }
  double offset_weight(std::size_t k) const { return by_offset_[k]; }
  /// w_k^{1/p}, the coefficient of the difference operator.
  double offset_root(std::size_t k) const { return root_by_offset_[k]; }
  std::span<const double> offset_roots() const { return root_by_offset_; }

 private:
  Grid grid_;
  GagliardoParams params_;
  Quadrature rule_;
  std::vector<double> by_offset_;
  std::vector<double> root_by_offset_;
  std::vector<double> dense_;
};

FracDiffWeights build_weights(const Grid& grid, const GagliardoParams& params,
                              Quadrature rule = Quadrature::cell_exact);

/// Toeplitz coefficient for offset k >= 1 at spacing h.
double offset_weight(std::size_t k, double h, const GagliardoParams& params, Quadrature rule);

double gagliardo_seminorm(const Signal& u, const GagliardoParams& params,
                          Quadrature rule = Quadrature::cell_exact);
double gagliardo_seminorm(std::span<const double> v, const FracDiffWeights& weights);

/// Seminorm over the real line of the zero extension of `u`, truncated to
/// (-L, 1 + L) and sampled with m points per unit length. Inside (0,1) the
/// signal is read as cellwise constant on its own grid. L*m is rounded to the
/// nearest integer.
double gagliardo_seminorm_line(const Signal& u, const GagliardoParams& params, double L,
                               std::size_t m, Quadrature rule = Quadrature::cell_exact);

struct SweepRow {
  double s = 0.0;
  double value = 0.0;
};

/// Rows (s, (1 - s) |u|_{W^{s,1}(I)}).
std::vector<SweepRow> bbm_sweep(const Signal& u, std::span<const double> s_list,
                                Quadrature rule = Quadrature::cell_exact);

/// Rows (s, s |u|_{W^{s,1}(R)}) using the truncated line seminorm.
std::vector<SweepRow> ms_sweep(const Signal& u, std::span<const double> s_list, double L,
                               std::size_t m, Quadrature rule = Quadrature::cell_exact);

/// CSV with header "s,value".
void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

/// Ordered pairs (i, j), i != j, row-major in i then j, skipping the diagonal.
std::size_t ordered_pair_count(std::size_t n);
std::size_t ordered_pair_index(std::size_t n, std::size_t i, std::size_t j);

/// z_ij = (v_i - v_j) w_ij^{1/p}; then ||z||_p equals the seminorm of v.
std::vector<double> frac_diff_apply(std::span<const double> v, const FracDiffWeights& weights);
std::vector<double> frac_diff_adjoint(std::span<const double> z, const FracDiffWeights& weights);

}  // namespace fractgv
