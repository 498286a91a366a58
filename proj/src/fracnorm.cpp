#include "fractgv/fracnorm.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "fractgv/numfmt.hpp"

namespace fractgv {

GagliardoParams GagliardoParams::for_fraction(double s) {
  return GagliardoParams{s, 1.0 + s * (1.0 - s)};
}

void validate(const GagliardoParams& params) {
  if (!(params.s > 0.0 && params.s < 1.0))
    throw std::invalid_argument("Gagliardo exponent s must lie in (0,1)");
  if (!(params.p >= 1.0) || !std::isfinite(params.p))
    throw std::invalid_argument("Gagliardo exponent p must be finite and >= 1");
}

double offset_weight(std::size_t k, double h, const GagliardoParams& params, Quadrature rule) {
  const double gamma = 1.0 + params.s * params.p;
  const double kd = static_cast<double>(k);
  if (rule == Quadrature::midpoint) return h * h / std::pow(kd * h, gamma);

  // Second difference of Phi(x) = x^a / ((1 - gamma) a), Phi'' = x^{-gamma},
  // a = 2 - gamma; written through expm1/log1p to keep digits for large k.
  const double a = 2.0 - gamma;
  if (!(a > 0.0))
    throw std::invalid_argument("cell_exact quadrature needs s*p < 1 (touching cells diverge)");
  const double c = 1.0 / ((1.0 - gamma) * a);
  double second_diff = 0.0;
  if (k == 1) {
    second_diff = std::pow(2.0, a) - 2.0;
  } else {
    second_diff = std::pow(kd, a) *
                  (std::expm1(a * std::log1p(1.0 / kd)) + std::expm1(a * std::log1p(-1.0 / kd)));
  }
  return std::pow(h, a) * c * second_diff;
}

FracDiffWeights::FracDiffWeights(const Grid& grid, const GagliardoParams& params, Quadrature rule)
    : grid_(grid), params_(params), rule_(rule) {
  validate(params_);
  const std::size_t n = grid_.n;
  by_offset_.assign(n, 0.0);
  root_by_offset_.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    by_offset_[k] = fractgv::offset_weight(k, grid_.h, params_, rule_);
    root_by_offset_[k] = std::pow(by_offset_[k], 1.0 / params_.p);
  }
  dense_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) dense_[i * n + j] = by_offset_[i > j ? i - j : j - i];
}

FracDiffWeights build_weights(const Grid& grid, const GagliardoParams& params, Quadrature rule) {
  return FracDiffWeights(grid, params, rule);
}

namespace {

// sum_{i != j} |v_i - v_j|^p w_ij, using the Toeplitz structure.
double pair_sum(std::span<const double> v, std::span<const double> w_by_offset, double p) {
  const std::size_t n = v.size();
  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double row = 0.0;
    if (p == 1.0) {
      for (std::size_t i = 0; i + k < n; ++i) row += std::abs(v[i + k] - v[i]);
    } else {
      for (std::size_t i = 0; i + k < n; ++i) {
        const double d = std::abs(v[i + k] - v[i]);
        if (d != 0.0) row += std::pow(d, p);
      }
    }
    total += w_by_offset[k] * row;
  }
  return 2.0 * total;
}

std::vector<double> offsets(std::size_t count, double h, const GagliardoParams& params,
                            Quadrature rule) {
  std::vector<double> w(count, 0.0);
  for (std::size_t k = 1; k < count; ++k) w[k] = offset_weight(k, h, params, rule);
  return w;
}

}  // namespace

double gagliardo_seminorm(std::span<const double> v, const FracDiffWeights& weights) {
  if (v.size() != weights.n()) throw std::invalid_argument("gagliardo_seminorm: size mismatch");
  const std::size_t n = v.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = weights.offset_weight(k);
  const double p = weights.params().p;
  return std::pow(pair_sum(v, w, p), 1.0 / p);
}

double gagliardo_seminorm(const Signal& u, const GagliardoParams& params, Quadrature rule) {
  validate(params);
  const auto w = offsets(u.size(), u.grid().h, params, rule);
  return std::pow(pair_sum(u.values(), w, params.p), 1.0 / params.p);
}

double gagliardo_seminorm_line(const Signal& u, const GagliardoParams& params, double L,
                               std::size_t m, Quadrature rule) {
  validate(params);
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("line seminorm: need L > 0");
  if (m < 2) throw std::invalid_argument("line seminorm: need m >= 2");
  const auto pad = static_cast<std::size_t>(std::llround(L * static_cast<double>(m)));
  const double h = 1.0 / static_cast<double>(m);
  const double p = params.p;

  // Resample u (cellwise constant on its own grid) at the m interior nodes.
  const std::size_t n = u.size();
  std::vector<double> inside(m);
  for (std::size_t t = 0; t < m; ++t) {
    const double x = (static_cast<double>(t) + 0.5) * h;
    const auto cell = std::min(n - 1, static_cast<std::size_t>(x * static_cast<double>(n)));
    inside[t] = u[cell];
  }

  const std::size_t max_offset = m + pad;
  const auto w = offsets(max_offset + 1, h, params, rule);
  std::vector<double> prefix(max_offset + 1, 0.0);  // prefix[k] = w_1 + ... + w_k
  for (std::size_t k = 1; k <= max_offset; ++k) prefix[k] = prefix[k - 1] + w[k];

  // Pairs with both points outside (0,1) see u = 0 on both ends.
  double total = pair_sum(inside, w, p);
  double cross = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double a = std::abs(inside[t]);
    if (a == 0.0) continue;
    const double ap = p == 1.0 ? a : std::pow(a, p);
    // left padding nodes at distance t+1 .. t+pad, right at m-t .. m-t+pad-1
    const double left = prefix[t + pad] - prefix[t];
    const double right = prefix[m - t + pad - 1] - prefix[m - t - 1];
    cross += ap * (left + right);
  }
  total += 2.0 * cross;
  return std::pow(total, 1.0 / p);
}

std::vector<SweepRow> bbm_sweep(const Signal& u, std::span<const double> s_list, Quadrature rule) {
  std::vector<SweepRow> rows;
  rows.reserve(s_list.size());
  for (double s : s_list)
    rows.push_back({s, (1.0 - s) * gagliardo_seminorm(u, GagliardoParams{s, 1.0}, rule)});
  return rows;
}

std::vector<SweepRow> ms_sweep(const Signal& u, std::span<const double> s_list, double L,
                               std::size_t m, Quadrature rule) {
  std::vector<SweepRow> rows;
  rows.reserve(s_list.size());
  for (double s : s_list)
    rows.push_back({s, s * gagliardo_seminorm_line(u, GagliardoParams{s, 1.0}, L, m, rule)});
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "s,value\n";
  for (const auto& row : rows) out << format_double(row.s) << ',' << format_double(row.value) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::size_t ordered_pair_count(std::size_t n) { return n * (n - 1); }

std::size_t ordered_pair_index(std::size_t n, std::size_t i, std::size_t j) {
  return i * (n - 1) + (j < i ? j : j - 1);
}

std::vector<double> frac_diff_apply(std::span<const double> v, const FracDiffWeights& weights) {
  const std::size_t n = weights.n();
  if (v.size() != n) throw std::invalid_argument("frac_diff_apply: size mismatch");
  std::vector<double> z(ordered_pair_count(n));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) z[idx++] = (v[i] - v[j]) * weights.offset_root(i > j ? i - j : j - i);
  return z;
}

std::vector<double> frac_diff_adjoint(std::span<const double> z, const FracDiffWeights& weights) {
  const std::size_t n = weights.n();
  if (z.size() != ordered_pair_count(n)) throw std::invalid_argument("frac_diff_adjoint: size mismatch");
  std::vector<double> v(n, 0.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) {
        const double t = z[idx++] * weights.offset_root(i > j ? i - j : j - i);
        v[i] += t;
        v[j] -= t;
      }
  return v;
}

}  // namespace fractgv
