#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "fractgv/errors.hpp"
#include "fractgv/prox.hpp"

using namespace fractgv;

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("prox") {

TEST_CASE("clip_linf and clip_interval") {
  CHECK(clip_linf(std::vector<double>{3.0, -0.2}, 1.0) == std::vector<double>{1.0, -0.2});
  CHECK(clip_linf(std::vector<double>{3.0, -5.0}, 0.0) == std::vector<double>{0.0, 0.0});
  CHECK(clip_interval(5.0, 1.0) == 1.0);
  CHECK(clip_interval(-0.5, 1.0) == -0.5);
  CHECK(clip_interval(-0.5, 0.0) == 0.0);
}

TEST_CASE("lq projection basics") {
  const std::vector<double> inside{0.1, -0.2, 0.05};
  CHECK(project_lq_ball(inside, 3.0, 1.0) == inside);
  for (double x : project_lq_ball(std::vector<double>{3.0, 1.0}, 4.0, 0.0)) CHECK(x == 0.0);

  const std::vector<double> z{3.0, -4.0, 1.0};
  const auto y = project_lq_ball(z, 2.0, 1.0);
  const double norm = std::sqrt(26.0);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(y[i] - z[i] / norm) < 1e-9);

  const auto big_q = project_lq_ball(std::vector<double>{3.0, -0.2}, 1e6, 1.0);
  CHECK(std::abs(big_q[0] - 1.0) < 1e-3);
  CHECK(std::abs(big_q[1] + 0.2) < 1e-3);
  const auto large_q = project_lq_ball(std::vector<double>{3.0, -0.2}, 500.0, 1.0);
  CHECK(std::abs(large_q[0] - 1.0) < 1e-2);
  CHECK(std::abs(large_q[1] + 0.2) < 1e-3);

  CHECK_THROWS_AS(project_lq_ball(z, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(project_lq_ball(z, 3.0, -1.0), std::invalid_argument);
}

TEST_CASE("lq projection matches nested bisection") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    std::vector<double> z(n);
    for (double& x : z) x = U(rng);
    const double q = 1.2 + 0.3 * (trial % 40);
    const double radius = 0.2 + 0.01 * (trial % 50);
    const auto y = project_lq_ball(z, q, radius);
    const auto ref = oracle::project_lq(z, q, radius);
    CHECK(dist(y, ref) < 1e-6);
    CHECK(oracle::lq_norm(y, q) <= radius * (1.0 + 1e-10));
  }
}

TEST_CASE("lq projection: large vectors and warm starts") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> z(5000);
  for (double& x : z) x = N(rng) * std::exp(N(rng));
  for (double q : {1.5, 5.0, 22.0, 200.0}) {
    std::vector<double> y = z;
    const auto info = project_lq_ball_inplace(y, q, 0.5);
    CHECK(info.active);
    CHECK(lq_norm(y, q) == doctest::Approx(0.5).epsilon(1e-9));
    // warm start from the previous multiplier lands on the same point
    std::vector<double> w = z;
    const auto info2 = project_lq_ball_inplace(w, q, 0.5, {}, info.log_multiplier);
    CHECK(info2.outer_iterations <= 2);
    CHECK(dist(w, y) < 1e-9);
  }
}

TEST_CASE("lq projection: idempotent and nonexpansive") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 7;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
    }
    const double q = 1.1 + 0.05 * (trial % 200);
    const auto pa = project_lq_ball(a, q, 1.0);
    const auto pb = project_lq_ball(b, q, 1.0);
    CHECK(dist(project_lq_ball(pa, q, 1.0), pa) < 1e-9);
    CHECK(dist(pa, pb) <= dist(a, b) * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("prox_fidelity") {
  const Grid g = make_grid(4);
  const Signal eta(g, {1.0, 2.0, -1.0, 0.5});
  const auto fixed = prox_fidelity(eta.values(), eta, 0.7);
  for (std::size_t i = 0; i < 4; ++i) CHECK(fixed[i] == doctest::Approx(eta[i]));
  const std::vector<double> u_bar{0.0, 0.0, 0.0, 0.0};
  const auto tiny = prox_fidelity(u_bar, eta, 1e-12);
  for (double x : tiny) CHECK(std::abs(x) < 1e-11);
  // n = 1 spot value: (0 + 2*1*1*1) / (1 + 2) = 2/3
  std::vector<double> one{0.0};
  prox_fidelity_inplace(one, std::vector<double>{1.0}, 1.0, 1.0);
  CHECK(one[0] == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(prox_fidelity(u_bar, eta, 0.0), std::invalid_argument);
}

}
