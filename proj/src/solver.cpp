#include "fractgv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "fractgv/errors.hpp"
#include "fractgv/prox.hpp"
#include "power_sum.hpp"

namespace fractgv {

FracOrder::FracOrder(double r) {
  if (!std::isfinite(r) || r < 1.0 - kSnapEpsilon)
    throw std::invalid_argument("order r must be finite and >= 1");
  r = std::max(r, 1.0);
  double k = std::floor(r);
  double s = r - k;
  if (s < kSnapEpsilon) {
    s = 0.0;
  } else if (s >= 1.0 - kSnapEpsilon) {
    k += 1.0;
    s = 0.0;
  }
  r_ = k + s;
  k_ = static_cast<int>(k);
  s_ = s;
}

bool Weights::degenerate() const {
  return std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; });
}

Weights make_weights(std::span<const double> alpha, const FracOrder& order) {
  const auto count = static_cast<std::size_t>(order.k()) + 1;
  for (double a : alpha)
    if (!std::isfinite(a) || a < 0.0)
      throw std::invalid_argument("weights must be finite and >= 0");
  if (alpha.size() == 1) return Weights{std::vector<double>(count, alpha[0])};
  if (alpha.size() != count)
    throw std::invalid_argument("order r = " + std::to_string(order.r()) + " needs " +
                                std::to_string(count) + " weights (or one to broadcast), got " +
                                std::to_string(alpha.size()));
  return Weights{std::vector<double>(alpha.begin(), alpha.end())};
}

void validate(const SolverOptions& o) {
  if (o.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(o.tol_rel > 0.0)) throw std::invalid_argument("tol_rel must be > 0");
  if (o.window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(o.safety >= 1.0)) throw std::invalid_argument("safety must be >= 1");
  if (o.opnorm_iters < 1) throw std::invalid_argument("opnorm_iters must be >= 1");
}

void apply_config(const KeyValueConfig& config, SolverOptions& options) {
  if (auto v = config.get_int("max_iter")) options.max_iter = static_cast<int>(*v);
  if (auto v = config.get_double("tol_rel")) options.tol_rel = *v;
  if (auto v = config.get_int("window")) options.window = static_cast<int>(*v);
  if (auto v = config.get_double("safety")) options.safety = *v;
  if (auto v = config.get_int("opnorm_iters")) options.opnorm_iters = static_cast<int>(*v);
  if (auto v = config.get("quadrature")) {
    if (*v == "cell_exact" || *v == "cell") options.quadrature = Quadrature::cell_exact;
    else if (*v == "midpoint") options.quadrature = Quadrature::midpoint;
    else throw std::invalid_argument("quadrature must be cell_exact or midpoint");
  }
  if (auto v = config.get("steps")) {
    if (*v == "scalar") options.steps = StepRule::scalar;
    else if (*v == "block_diagonal" || *v == "block") options.steps = StepRule::block_diagonal;
    else throw std::invalid_argument("steps must be scalar or block_diagonal");
  }
  validate(options);
}

int v_field_count(const FracOrder& order) {
  return order.is_integer() ? order.k() - 1 : order.k();
}

// ---------------------------------------------------------------------------
// SaddleOperator

SaddleOperator::SaddleOperator(const Grid& grid, const FracOrder& order, const Weights& weights,
                               Quadrature quadrature, bool include_u)
    : grid_(grid), order_(order), weights_(weights), include_u_(include_u) {
  if (weights_.alpha.size() != static_cast<std::size_t>(order_.k()) + 1)
    throw std::invalid_argument("SaddleOperator: weight count does not match the order");
  const std::size_t n = grid_.n;
  links_ = order_.k();
  v_fields_ = v_field_count(order_);
  primal_size_ = (include_u_ ? n : 0) + static_cast<std::size_t>(v_fields_) * n;
  if (fractional()) {
    frac_weights_ = std::make_shared<const FracDiffWeights>(
        grid_, GagliardoParams::for_fraction(order_.s()), quadrature);
    pairs_ = n * (n - 1) / 2;
    pair_coeff_.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
      pair_coeff_[k] = std::sqrt(2.0) * frac_weights_->offset_root(k);
  }
  dual_size_ = static_cast<std::size_t>(links_) * (n - 1) + pairs_ + (fractional() ? 1 : 0);
}

std::size_t SaddleOperator::v_offset(int j) const {
  return (include_u_ ? grid_.n : 0) + static_cast<std::size_t>(j) * grid_.n;
}

double SaddleOperator::pair_q() const {
  const double p = order_.gagliardo_p();
  return p / (p - 1.0);
}

double SaddleOperator::pair_radius() const {
  const double s = order_.s();
  const double beta = weights_.alpha[static_cast<std::size_t>(order_.k())] * s * (1.0 - s);
  return beta * std::pow(2.0, 0.5 - 1.0 / pair_q());
}

double SaddleOperator::mean_radius() const {
  const double s = order_.s();
  return weights_.alpha[static_cast<std::size_t>(order_.k() - 1)] * s * (1.0 - s);
}

namespace {

// Coefficient of v_j in link j: s h on the last fractional link, h otherwise.
double coupling(const SaddleOperator& K, int j) {
  const double h = K.grid().h;
  return (K.fractional() && j == K.order().k() - 1) ? K.order().s() * h : h;
}

}  // namespace

void SaddleOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != primal_size_ || y.size() != dual_size_)
    throw std::invalid_argument("SaddleOperator::apply: size mismatch");
  const std::size_t n = grid_.n;
  for (int j = 0; j < links_; ++j) {
    double* out = y.data() + link_offset(j);
    const double* in = nullptr;
    if (j == 0) {
      if (include_u_) in = x.data();
    } else {
      in = x.data() + v_offset(j - 1);
    }
    if (in) {
      for (std::size_t i = 0; i + 1 < n; ++i) out[i] = in[i + 1] - in[i];
    } else {
      std::fill(out, out + (n - 1), 0.0);
    }
    if (j < v_fields_) {
      const double c = coupling(*this, j);
      const double* v = x.data() + v_offset(j);
      for (std::size_t i = 0; i + 1 < n; ++i) out[i] -= c * v[i];
    }
  }
  if (fractional()) {
    const double* v = x.data() + v_offset(v_fields_ - 1);
    double* z = y.data() + pair_offset();
    const double* coeff = pair_coeff_.data();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double vi = v[i];
      const std::size_t len = n - 1 - i;
      for (std::size_t t = 0; t < len; ++t) z[t] = (vi - v[i + 1 + t]) * coeff[t + 1];
      z += len;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += v[i];
    y[mean_offset()] = grid_.h * sum;
  }
}

void SaddleOperator::adjoint(std::span<const double> y, std::span<double> x) const {
  if (x.size() != primal_size_ || y.size() != dual_size_)
    throw std::invalid_argument("SaddleOperator::adjoint: size mismatch");
  const std::size_t n = grid_.n;
  std::fill(x.begin(), x.end(), 0.0);
  for (int j = 0; j < links_; ++j) {
    const double* phi = y.data() + link_offset(j);
    double* in = nullptr;
    if (j == 0) {
      if (include_u_) in = x.data();
    } else {
      in = x.data() + v_offset(j - 1);
    }
    if (in) {
      // d^T phi
      in[0] -= phi[0];
      for (std::size_t i = 1; i + 1 < n; ++i) in[i] += phi[i - 1] - phi[i];
      in[n - 1] += phi[n - 2];
    }
    if (j < v_fields_) {
      const double c = coupling(*this, j);
      double* v = x.data() + v_offset(j);
      for (std::size_t i = 0; i + 1 < n; ++i) v[i] -= c * phi[i];
    }
  }
  if (fractional()) {
    double* v = x.data() + v_offset(v_fields_ - 1);
    const double* z = y.data() + pair_offset();
    const double* coeff = pair_coeff_.data();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t len = n - 1 - i;
      double acc = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        const double w = z[t] * coeff[t + 1];
        acc += w;
        v[i + 1 + t] -= w;
      }
      v[i] += acc;
      z += len;
    }
    const double m = grid_.h * y[mean_offset()];
    for (std::size_t i = 0; i < n; ++i) v[i] += m;
  }
}

double SaddleOperator::measure_terms(std::span<const double> kx) const {
  double total = 0.0;
  for (int j = 0; j < links_; ++j) {
    const double a = link_radius(j);
    if (a == 0.0) continue;
    const double* r = kx.data() + link_offset(j);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid_.n; ++i) sum += std::abs(r[i]);
    total += a * sum;
  }
  return total;
}

double SaddleOperator::fractional_terms(std::span<const double> kx) const {
  if (!fractional()) return 0.0;
  const double s = order_.s();
  const double beta = weights_.alpha[static_cast<std::size_t>(order_.k())] * s * (1.0 - s);
  double total = mean_radius() * std::abs(kx[mean_offset()]);
  if (beta > 0.0) {
    // stored entries are sqrt(2) z_ij over i < j; the ordered-pair sum is
    // 2 sum |z_ij|^p = 2^{1 - p/2} sum |stored|^p
    const double p = order_.gagliardo_p();
    const double* z = kx.data() + pair_offset();
    const double sum = detail::power_sum(std::span<const double>(z, pairs_), p);
    total += beta * std::pow(std::pow(2.0, 1.0 - 0.5 * p) * sum, 1.0 / p);
  }
  return total;
}

void SaddleOperator::abs_sums(std::span<double> row_sums, std::span<double> col_sums, double pair_scale) const {
  if (col_sums.size() != primal_size_ || row_sums.size() != dual_size_)
    throw std::invalid_argument("SaddleOperator::abs_sums: size mismatch");
  std::fill(row_sums.begin(), row_sums.end(), 0.0);
  std::fill(col_sums.begin(), col_sums.end(), 0.0);
  const std::size_t n = grid_.n;
  for (int j = 0; j < links_; ++j) {
    double* rs = row_sums.data() + link_offset(j);
    const bool has_in = j > 0 || include_u_;
    if (has_in) {
      double* cs = col_sums.data() + (j == 0 ? 0 : v_offset(j - 1));
      for (std::size_t i = 0; i + 1 < n; ++i) {
        rs[i] += 2.0;
        cs[i] += 1.0;
        cs[i + 1] += 1.0;
      }
    }
    if (j < v_fields_) {
      const double c = std::abs(coupling(*this, j));
      double* cs = col_sums.data() + v_offset(j);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        rs[i] += c;
        cs[i] += c;
      }
    }
  }
  if (fractional()) {
    double* cs = col_sums.data() + v_offset(v_fields_ - 1);
    double* rs = row_sums.data() + pair_offset();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t t = 0; t < n - 1 - i; ++t) {
        const double c = pair_scale * pair_coeff_[t + 1];
        *rs++ = 2.0 * c;
        cs[i] += c;
        cs[i + 1 + t] += c;
      }
    }
    row_sums[mean_offset()] = grid_.h * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) cs[i] += grid_.h;
  }
}

SaddleOperator build_K(const FracOrder& order, const Weights& weights, const Grid& grid,
                       Quadrature quadrature) {
  return SaddleOperator(grid, order, weights, quadrature, true);
}

// ---------------------------------------------------------------------------

double estimate_opnorm(const LinearMap& K, int iters, double safety, std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("estimate_opnorm: iters must be >= 1");
  std::mt19937_64 engine(seed);
  std::vector<double> x(K.cols()), y(K.rows()), z(K.cols());
  for (double& v : x) v = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
  const auto normalize = [](std::vector<double>& v) {
    double sq = 0.0;
    for (double e : v) sq += e * e;
    const double norm = std::sqrt(sq);
    if (norm > 0.0)
      for (double& e : v) e /= norm;
    return norm;
  };
  normalize(x);
  double rayleigh = 0.0;
  for (int it = 0; it < iters; ++it) {
    K.apply(x, y);
    K.adjoint(y, z);
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
    rayleigh = std::max(rayleigh, dot);
    if (normalize(z) == 0.0) break;
    x.swap(z);
  }
  return safety * std::sqrt(rayleigh);
}

// ---------------------------------------------------------------------------
// Primal-dual iteration shared by solve() and the seminorm.

namespace {

struct PdOutcome {
  std::vector<double> x;  // best primal iterate
  int iterations = 0;
  bool converged = false;
  double dual_residual = 0.0;
  double energy_change = 0.0;
};

// Block-step constants, tuned on n = 128 and 256 test problems over r in
// [1, 3) and alpha in [0.003, 0.5].
constexpr double kPairRowScale = 0.03;
constexpr double kPrimalStepRatio = 3.0;  // tau / sigma multiplier

// Sigma^1/2 K T^1/2 for diagonal Sigma, T.
class ScaledMap final : public LinearMap {
 public:
  ScaledMap(const LinearMap& K, std::span<const double> sigma, std::span<const double> tau)
      : K_(K), sqrt_sigma_(sigma.size()), sqrt_tau_(tau.size()), tmp_x_(tau.size()),
        tmp_y_(sigma.size()) {
    for (std::size_t i = 0; i < sigma.size(); ++i) sqrt_sigma_[i] = std::sqrt(sigma[i]);
    for (std::size_t i = 0; i < tau.size(); ++i) sqrt_tau_[i] = std::sqrt(tau[i]);
  }
  std::size_t rows() const override { return K_.rows(); }
  std::size_t cols() const override { return K_.cols(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    for (std::size_t i = 0; i < x.size(); ++i) tmp_x_[i] = sqrt_tau_[i] * x[i];
    K_.apply(tmp_x_, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= sqrt_sigma_[i];
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    for (std::size_t i = 0; i < y.size(); ++i) tmp_y_[i] = sqrt_sigma_[i] * y[i];
    K_.adjoint(tmp_y_, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= sqrt_tau_[i];
  }

 private:
  const LinearMap& K_;
  std::vector<double> sqrt_sigma_, sqrt_tau_;
  mutable std::vector<double> tmp_x_, tmp_y_;
};

class PrimalDual {
 public:
  // `offset` is added to Kx (the frozen d(u) when u is not a primal block).
  PrimalDual(const SaddleOperator& K, std::vector<double> offset,
             std::span<const double> u_eta, const SolverOptions& options)
      : K_(K), offset_(std::move(offset)), u_eta_(u_eta), options_(options) {}

  double energy(std::span<const double> x, std::span<const double> kx) const {
    double e = K_.measure_terms(kx) + K_.fractional_terms(kx);
    if (K_.includes_u()) e += fidelity(x);
    return e;
  }

  double fidelity(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < u_eta_.size(); ++i) {
      const double d = x[i] - u_eta_[i];
      sum += d * d;
    }
    return K_.grid().h * sum;
  }

  void apply_with_offset(std::span<const double> x, std::span<double> kx) const {
    K_.apply(x, kx);
    for (std::size_t i = 0; i < offset_.size(); ++i) kx[i] += offset_[i];
  }

  PdOutcome run(std::vector<double> x0, const std::vector<std::vector<double>>& candidates) {
    const std::size_t nx = K_.cols(), ny = K_.rows();
    std::vector<double> tau, sigma;
    step_sizes(tau, sigma);
    const double h = K_.grid().h;

    std::vector<double> x = std::move(x0), x_old(nx), kx(ny), kx_old(ny), kx_bar(ny);
    std::vector<double> y(ny, 0.0), kty(nx);
    apply_with_offset(x, kx);
    kx_bar = kx;

    PdOutcome out;
    out.x = x;
    double best = energy(x, kx);
    for (const auto& c : candidates) {
      std::vector<double> kc(ny);
      apply_with_offset(c, kc);
      const double e = energy(c, kc);
      if (e < best) {
        best = e;
        out.x = c;
      }
    }

    const std::size_t v_begin = K_.includes_u() ? K_.grid().n : 0;
    const int window = options_.window;
    std::vector<double> history(static_cast<std::size_t>(window) + 1, 0.0);
    double log_mu = -std::numeric_limits<double>::infinity();
    LqProjectionOptions lq;

    for (int it = 1; it <= options_.max_iter; ++it) {
      for (std::size_t i = 0; i < ny; ++i) y[i] += sigma[i] * kx_bar[i];
      project_dual(y, lq, log_mu);

      K_.adjoint(y, kty);
      x_old.swap(x);
      for (std::size_t i = 0; i < nx; ++i) x[i] = x_old[i] - tau[i] * kty[i];
      if (K_.includes_u())
        prox_fidelity_inplace(std::span<double>(x.data(), K_.grid().n), u_eta_, h, tau[0]);

      kx_old.swap(kx);
      apply_with_offset(x, kx);
      for (std::size_t i = 0; i < ny; ++i) kx_bar[i] = 2.0 * kx[i] - kx_old[i];

      const double e = energy(x, kx);
      if (!std::isfinite(e))
        throw NumericError("primal-dual iterate became non-finite at iteration " +
                           std::to_string(it));
      if (e < best) {
        best = e;
        out.x = x;
      }
      history[static_cast<std::size_t>(it % (window + 1))] = e;
      out.iterations = it;

      if (it > window) {
        const double past = history[static_cast<std::size_t>((it - window) % (window + 1))];
        const double scale = std::max(std::abs(e), std::numeric_limits<double>::min());
        out.energy_change = e == past ? 0.0 : std::abs(e - past) / scale;
        double sq = 0.0;
        for (std::size_t i = v_begin; i < nx; ++i) sq += kty[i] * kty[i];
        out.dual_residual = std::sqrt(sq);
        if (out.energy_change < options_.tol_rel && out.dual_residual < options_.tol_rel) {
          out.converged = true;
          break;
        }
      }
    }
    return out;
  }

 private:
  // Per-coordinate steps, constant on each block.
  void step_sizes(std::vector<double>& tau, std::vector<double>& sigma) const {
    const std::size_t nx = K_.cols(), ny = K_.rows();
    tau.assign(nx, 1.0);
    sigma.assign(ny, 1.0);
    if (options_.steps == StepRule::block_diagonal) {
      std::vector<double> rows(ny), cols(nx);
      // The difference rows enter the sums down-weighted so that their largest
      // coefficient counts as kPairRowScale; without this the v-steps shrink
      // like (1 - s)^2 as s -> 1.
      double omega = 1.0;
      if (K_.fractional()) omega = std::min(1.0, kPairRowScale / K_.max_pair_coeff());
      K_.abs_sums(rows, cols, omega);
      const auto fill_block = [](std::vector<double>& step, std::span<const double> sums,
                                 std::size_t begin, std::size_t end) {
        double m = 0.0;
        for (std::size_t i = begin; i < end; ++i) m = std::max(m, sums[i]);
        for (std::size_t i = begin; i < end; ++i) step[i] = m > 0.0 ? 1.0 / m : 1.0;
      };
      const std::size_t n = K_.grid().n;
      for (std::size_t b = 0; b < nx / n; ++b) fill_block(tau, cols, b * n, (b + 1) * n);
      for (int j = 0; j < K_.measure_links(); ++j)
        fill_block(sigma, rows, K_.link_offset(j), K_.link_offset(j) + n - 1);
      if (K_.fractional()) {
        fill_block(sigma, rows, K_.pair_offset(), K_.mean_offset());
        for (std::size_t i = K_.pair_offset(); i < K_.mean_offset(); ++i) sigma[i] *= omega * omega;
        fill_block(sigma, rows, K_.mean_offset(), ny);
      }
    }
    const ScaledMap scaled(K_, sigma, tau);
    const double norm = estimate_opnorm(scaled, options_.opnorm_iters, options_.safety);
    const double theta = norm > 0.0 ? 0.99 / norm : 1.0;
    const double beta = options_.steps == StepRule::block_diagonal ? kPrimalStepRatio : 1.0;
    for (double& t : tau) t *= theta * beta;
    for (double& s : sigma) s *= theta / beta;
  }

  void project_dual(std::vector<double>& y, const LqProjectionOptions& lq, double& log_mu) const {
    const std::size_t n = K_.grid().n;
    for (int j = 0; j < K_.measure_links(); ++j)
      clip_linf_inplace(std::span<double>(y.data() + K_.link_offset(j), n - 1), K_.link_radius(j));
    if (K_.fractional()) {
      std::span<double> psi(y.data() + K_.pair_offset(), K_.pair_count());
      const auto info = project_lq_ball_inplace(psi, K_.pair_q(), K_.pair_radius(), lq, log_mu);
      if (info.active) log_mu = info.log_multiplier;
      y[K_.mean_offset()] = clip_interval(y[K_.mean_offset()], K_.mean_radius());
    }
  }

  const SaddleOperator& K_;
  std::vector<double> offset_;
  std::span<const double> u_eta_;
  SolverOptions options_;
};

VFields split_v(const SaddleOperator& K, std::span<const double> x) {
  VFields v(static_cast<std::size_t>(K.v_fields()));
  const std::size_t n = K.grid().n;
  for (int j = 0; j < K.v_fields(); ++j) {
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(K.v_offset(j));
    v[static_cast<std::size_t>(j)].assign(first, first + static_cast<std::ptrdiff_t>(n));
  }
  return v;
}

}  // namespace

EnergyTerms discrete_energy(std::span<const double> u, const VFields& v_fields,
                            const DenoiseProblem& problem) {
  const Grid& grid = problem.u_eta.grid();
  if (u.size() != grid.n) throw std::invalid_argument("discrete_energy: u has the wrong length");
  const SaddleOperator K(grid, problem.order, problem.weights, problem.options.quadrature, true);
  if (v_fields.size() != static_cast<std::size_t>(K.v_fields()))
    throw std::invalid_argument("discrete_energy: expected " + std::to_string(K.v_fields()) +
                                " v-fields");
  std::vector<double> x(K.cols());
  std::copy(u.begin(), u.end(), x.begin());
  for (int j = 0; j < K.v_fields(); ++j) {
    const auto& v = v_fields[static_cast<std::size_t>(j)];
    if (v.size() != grid.n) throw std::invalid_argument("discrete_energy: v-field length mismatch");
    std::copy(v.begin(), v.end(), x.begin() + static_cast<std::ptrdiff_t>(K.v_offset(j)));
  }
  std::vector<double> kx(K.rows());
  K.apply(x, kx);
  EnergyTerms terms;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double d = u[i] - problem.u_eta[i];
    sum += d * d;
  }
  terms.fidelity = grid.h * sum;
  terms.tgv = K.measure_terms(kx) + K.fractional_terms(kx);
  terms.energy = terms.fidelity + terms.tgv;
  return terms;
}

DenoiseResult solve(const DenoiseProblem& problem) {
  validate(problem.options);
  const Grid& grid = problem.u_eta.grid();
  const std::size_t n = grid.n;
  const int fields = v_field_count(problem.order);

  if (problem.weights.degenerate()) {
    DenoiseResult result{problem.u_eta, VFields(static_cast<std::size_t>(fields),
                                                std::vector<double>(n, 0.0))};
    result.converged = true;
    return result;
  }

  const SaddleOperator K(grid, problem.order, problem.weights, problem.options.quadrature, true);
  std::vector<double> x0(K.cols(), 0.0);
  const auto eta = problem.u_eta.values();
  std::copy(eta.begin(), eta.end(), x0.begin());
  std::vector<double> flat(K.cols(), 0.0);
  std::fill(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n), mean(problem.u_eta));

  PrimalDual pd(K, {}, eta, problem.options);
  PdOutcome outcome = pd.run(std::move(x0), {flat});

  std::vector<double> u(outcome.x.begin(), outcome.x.begin() + static_cast<std::ptrdiff_t>(n));
  DenoiseResult result{Signal(grid, u), split_v(K, outcome.x)};
  const EnergyTerms terms = discrete_energy(u, result.v_fields, problem);
  result.energy = terms.energy;
  result.fidelity = terms.fidelity;
  result.tgv_value = terms.tgv;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.dual_residual = outcome.dual_residual;
  result.energy_change = outcome.energy_change;
  return result;
}

SeminormResult tgv_seminorm_detailed(const Signal& u, const FracOrder& order,
                                     const Weights& weights, const SolverOptions& options) {
  validate(options);
  const Grid& grid = u.grid();
  const int fields = v_field_count(order);
  SeminormResult result;
  if (fields == 0 || weights.degenerate()) {
    result.value = weights.alpha.at(0) * tv(u);
    result.v_fields.assign(static_cast<std::size_t>(fields), std::vector<double>(grid.n, 0.0));
    return result;
  }
  const SaddleOperator K(grid, order, weights, options.quadrature, false);
  std::vector<double> offset(grid.n - 1);
  for (std::size_t i = 0; i + 1 < grid.n; ++i) offset[i] = u[i + 1] - u[i];

  PrimalDual pd(K, std::move(offset), {}, options);
  PdOutcome outcome = pd.run(std::vector<double>(K.cols(), 0.0), {});

  result.v_fields = split_v(K, outcome.x);
  DenoiseProblem problem{u, order, weights, options};
  result.value = discrete_energy(u.values(), result.v_fields, problem).tgv;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  return result;
}

double tgv_seminorm(const Signal& u, const FracOrder& order, const Weights& weights,
                    const SolverOptions& options) {
  return tgv_seminorm_detailed(u, order, weights, options).value;
}

TgvSweep limit_sweep_tgv(const Signal& u, std::span<const double> alpha,
                         std::span<const double> s_list, const SolverOptions& options) {
  if (alpha.size() != 2) throw std::invalid_argument("limit_sweep_tgv: need (alpha_0, alpha_1)");
  TgvSweep sweep;
  for (double s : s_list) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("limit_sweep_tgv: s must lie in (0,1)");
    const FracOrder order(1.0 + s);
    const Weights w = order.is_integer() && order.k() == 2
                          ? Weights{{alpha[0], alpha[1], alpha[1]}}
                          : make_weights(alpha, order);
    sweep.rows.push_back({s, tgv_seminorm(u, order, w, options)});
  }
  sweep.tgv2 = tgv_seminorm(u, FracOrder(2.0), Weights{{alpha[0], alpha[1], alpha[1]}}, options);
  sweep.alpha0_tv = alpha[0] * tv(u);
  return sweep;
}

}  // namespace fractgv
