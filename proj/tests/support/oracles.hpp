#pragma once

// Reference computations for the tests. Everything here is written directly
// from the definitions (dense double loops, plain quadrature, bisection) and
// shares no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// 20-point Gauss-Legendre on [a, b].
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  static const std::array<double, 10> x = {
      0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
      0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
      0.9639719272779138, 0.9931285991850949};
  static const std::array<double, 10> w = {
      0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
      0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
      0.0406014298003869, 0.0176140071391521};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    sum += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
  return half * sum;
}

// Composite rule with `panels` equal panels.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  double sum = 0.0;
  const double d = (b - a) / panels;
  for (int i = 0; i < panels; ++i) sum += gauss_legendre(f, a + i * d, a + (i + 1) * d);
  return sum;
}

// Integral of |x - y|^{-gamma} over two cells of width h whose left ends are
// k*h apart (k >= 1). Reduced to one dimension through t = x - y:
//   int_{-h}^{h} (h - |t|) (k h + t)^{-gamma} dt.
// For k = 1 the piece near t = -h is done in closed form.
inline double cell_pair_weight(std::size_t k, double h, double gamma) {
  const double kh = static_cast<double>(k) * h;
  auto f = [&](double t) { return (h - std::abs(t)) * std::pow(kh + t, -gamma); };
  if (k >= 2) return integrate(f, -h, 0.0, 8) + integrate(f, 0.0, h, 8);
  // u = h + t in (0, h): weight u, integrand u^{1-gamma}
  const double near = std::pow(h, 2.0 - gamma) / (2.0 - gamma);
  return near + integrate(f, 0.0, h, 8);
}

inline double midpoint_weight(std::size_t k, double h, double gamma) {
  return h * h / std::pow(static_cast<double>(k) * h, gamma);
}

// sum_{i != j} |u_i - u_j|^p w(|i - j|), then ^{1/p}.
inline double gagliardo(const std::vector<double>& u, double p,
                        const std::function<double(std::size_t)>& weight) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j)
      if (i != j) {
        const std::size_t k = i > j ? i - j : j - i;
        sum += std::pow(std::abs(u[i] - u[j]), p) * weight(k);
      }
  return std::pow(sum, 1.0 / p);
}

inline double lq_norm(const std::vector<double>& z, double q) {
  double sum = 0.0;
  for (double v : z) sum += std::pow(std::abs(v), q);
  return std::pow(sum, 1.0 / q);
}

// Projection onto the lq ball by nested bisection: outer on the multiplier,
// inner on each coordinate of y + mu q y^{q-1} = |z|.
inline std::vector<double> project_lq(const std::vector<double>& z, double q, double radius) {
  if (lq_norm(z, q) <= radius) return z;
  auto coord = [&](double a, double mu) {
    double lo = 0.0, hi = a;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid + mu * q * std::pow(mid, q - 1.0) > a) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto norm_at = [&](double mu) {
    std::vector<double> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) y[i] = coord(std::abs(z[i]), mu);
    return lq_norm(y, q);
  };
  double lo = -60.0, hi = 60.0;  // log mu
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(std::exp(mid)) > radius) lo = mid; else hi = mid;
  }
  const double mu = std::exp(0.5 * (lo + hi));
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = std::copysign(coord(std::abs(z[i]), mu), z[i]);
  return y;
}

// Fractional first-order problem (k = 1, 0 < s < 1):
//   h sum (u - eta)^2 + a0 sum_i |u_{i+1} - u_i - s h v_i|
//   + a1 s(1-s) |v|_{W^{s,p}} + a0 s(1-s) |h sum v|
struct FracProblem {
  std::vector<double> eta;
  double a0 = 1.0, a1 = 1.0, s = 0.5;
  std::vector<double> w;  // w[k], pair weight at offset k >= 1

  std::size_t n() const { return eta.size(); }
  double h() const { return 1.0 / static_cast<double>(eta.size()); }
  double p() const { return 1.0 + s * (1.0 - s); }

  double seminorm_power(const std::vector<double>& v) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = i + 1; j < n(); ++j) sum += 2.0 * std::pow(std::abs(v[i] - v[j]), p()) * w[j - i];
    return sum;
  }

  double energy(const std::vector<double>& u, const std::vector<double>& v) const {
    const double h = this->h();
    double e = 0.0;
    for (std::size_t i = 0; i < n(); ++i) e += h * (u[i] - eta[i]) * (u[i] - eta[i]);
    for (std::size_t i = 0; i + 1 < n(); ++i) e += a0 * std::abs(u[i + 1] - u[i] - s * h * v[i]);
    e += a1 * s * (1.0 - s) * std::pow(seminorm_power(v), 1.0 / p());
    double sv = 0.0;
    for (double x : v) sv += x;
    e += a0 * s * (1.0 - s) * std::abs(h * sv);
    return e;
  }

  // One subgradient of energy at (u, v).
  void subgradient(const std::vector<double>& u, const std::vector<double>& v,
                   std::vector<double>& gu, std::vector<double>& gv) const {
    const std::size_t n = this->n();
    const double h = this->h(), p = this->p();
    gu.assign(n, 0.0);
    gv.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) gu[i] = 2.0 * h * (u[i] - eta[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double r = u[i + 1] - u[i] - s * h * v[i];
      const double sg = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
      gu[i + 1] += a0 * sg;
      gu[i] -= a0 * sg;
      gv[i] -= a0 * sg * s * h;
    }
    // d/dv of (sum_{i != j} |v_i - v_j|^p w)^{1/p}; each unordered pair
    // appears twice in the sum.
    std::vector<double> dpow(n, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = v[i] - v[j];
        if (d == 0.0) continue;
        const double t = std::pow(std::abs(d), p - 1.0) * w[j - i];
        sum += 2.0 * t * std::abs(d);
        const double g = 2.0 * p * t * (d > 0 ? 1.0 : -1.0);
        dpow[i] += g;
        dpow[j] -= g;
      }
    if (sum > 0.0) {
      const double outer = a1 * s * (1.0 - s) * std::pow(sum, 1.0 / p - 1.0) / p;
      for (std::size_t i = 0; i < n; ++i) gv[i] += outer * dpow[i];
    }
    double sv = 0.0;
    for (double x : v) sv += x;
    const double sg = sv > 0 ? 1.0 : (sv < 0 ? -1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i) gv[i] += a0 * s * (1.0 - s) * h * sg;
  }
};

// Best energy of a normalised diminishing-step subgradient method. The search
// runs in (u, z) with v = z / (s h), which puts both blocks on the scale of u.
// The first start is (u_eta, 0); each restart begins at the best point so far,
// perturbed, with the initial step divided by 4.
inline double subgradient_minimum(const FracProblem& prob, long iterations, int restarts,
                                  std::uint64_t seed) {
  const std::size_t n = prob.n();
  const double v_scale = 1.0 / (prob.s * prob.h());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scale = 0.0;
  for (double x : prob.eta) scale = std::max(scale, std::abs(x));
  double step0 = 0.1 * std::max(scale, 1.0);

  std::vector<double> best_u = prob.eta, best_z(n, 0.0);
  std::vector<double> v(n), gu, gv;
  const auto energy = [&](const std::vector<double>& u, const std::vector<double>& z) {
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] * v_scale;
    return prob.energy(u, v);
  };
  double best = energy(best_u, best_z);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> u = best_u, z = best_z;
    if (r > 0)
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += 0.1 * step0 * gauss(rng);
        z[i] += 0.1 * step0 * gauss(rng);
      }
    for (long k = 0; k < iterations; ++k) {
      for (std::size_t i = 0; i < n; ++i) v[i] = z[i] * v_scale;
      const double e = prob.energy(u, v);
      if (e < best) {
        best = e;
        best_u = u;
        best_z = z;
      }
      prob.subgradient(u, v, gu, gv);
      double g2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        gv[i] *= v_scale;
        g2 += gu[i] * gu[i] + gv[i] * gv[i];
      }
      if (g2 == 0.0) break;
      const double t = step0 / (std::sqrt(g2) * std::sqrt(static_cast<double>(k) + 1.0));
      for (std::size_t i = 0; i < n; ++i) {
        u[i] -= t * gu[i];
        z[i] -= t * gv[i];
      }
    }
    step0 *= 0.25;
  }
  return best;
}

}  // namespace oracle
