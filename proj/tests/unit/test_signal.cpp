#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fractgv/errors.hpp"
#include "fractgv/signal.hpp"

using namespace fractgv;

TEST_SUITE("signal") {

TEST_CASE("midpoint grid nodes") {
  const Grid g2 = make_grid(2);
  CHECK(g2.h == 0.5);
  CHECK(g2.nodes() == std::vector<double>{0.25, 0.75});
  CHECK(make_grid(4).nodes() == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK_THROWS_AS(make_grid(1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0), std::invalid_argument);
}

TEST_CASE("signal construction validates") {
  const Grid g = make_grid(3);
  CHECK_THROWS_AS(Signal(g, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Signal(g, {1.0, NAN, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Signal(g, {1.0, INFINITY, 2.0}), std::invalid_argument);
}

TEST_CASE("gen_signal samples pieces at nodes") {
  const Signal c = gen_signal(make_grid(4), PiecewiseSpec{{}, {Constant{1.0}}});
  CHECK(c.values()[0] == 1.0);
  CHECK(c.values()[3] == 1.0);

  const Signal a = gen_signal(make_grid(2), PiecewiseSpec{{}, {Affine{1.0, 0.0}}});
  CHECK(a[0] == 0.25);
  CHECK(a[1] == 0.75);

  const Signal s = gen_signal(make_grid(2), PiecewiseSpec{{0.5}, {Constant{0.0}, Constant{1.0}}});
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 1.0);

  CHECK_THROWS_AS(gen_signal(make_grid(2), PiecewiseSpec{{0.5}, {Constant{0.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_signal(make_grid(2), PiecewiseSpec{{0.6, 0.4},
                                                         {Constant{0}, Constant{1}, Constant{2}}}),
                  std::invalid_argument);
}

TEST_CASE("presets") {
  for (const char* kind : {"step", "corner", "flat", "affine", "sine"})
    CHECK(gen_signal(make_grid(64), preset_signal(kind)).size() == 64);
  CHECK_THROWS_AS(preset_signal("zigzag"), std::invalid_argument);
  const Signal flat = gen_signal(make_grid(8), preset_signal("flat"));
  for (double v : flat.values()) CHECK(v == 1.0);
  // corner is continuous: pieces meet at the breakpoints
  const Signal corner = gen_signal(make_grid(4096), preset_signal("corner"));
  for (std::size_t i = 0; i + 1 < corner.size(); ++i)
    CHECK(std::abs(corner[i + 1] - corner[i]) < 4.0 / 4096 + 1e-12);
}

TEST_CASE("noise") {
  const Signal u = gen_signal(make_grid(100), preset_signal("sine"));
  CHECK(add_noise(u, NoiseSpec{0.0, 42, false}) == u);

  const Signal a = add_noise(u, NoiseSpec{0.3, 7, false});
  const Signal b = add_noise(u, NoiseSpec{0.3, 7, false});
  CHECK(a == b);
  CHECK_FALSE(a == add_noise(u, NoiseSpec{0.3, 8, false}));

  const Signal z = add_noise(u, NoiseSpec{0.3, 7, true});
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += z[i] - u[i];
  CHECK(std::abs(u.grid().h * sum) < 1e-12);

  CHECK_THROWS_AS(add_noise(u, NoiseSpec{-1.0, 0, false}), std::invalid_argument);
}

TEST_CASE("gaussian source moments") {
  GaussianSource g(2024);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  CHECK(std::abs(m1) < 0.01);
  CHECK(std::abs(m2 - 1.0) < 0.01);
}

TEST_CASE("l2_dist_sq") {
  const Grid g = make_grid(2);
  const Signal zero(g, {0.0, 0.0});
  CHECK(l2_dist_sq(zero, zero) == 0.0);
  CHECK(l2_dist_sq(Signal(g, {1.0, 1.0}), zero) == doctest::Approx(1.0));
  CHECK(l2_dist_sq(Signal(g, {0.0, 1.0}), zero) == doctest::Approx(0.5));
  CHECK(l2_dist_sq(Signal(g, {0.0, 1.0}), Signal(g, {2.0, 3.0})) ==
        l2_dist_sq(Signal(g, {2.0, 3.0}), Signal(g, {0.0, 1.0})));
  CHECK_THROWS_AS(l2_dist_sq(zero, Signal(make_grid(3), {0, 0, 0})), std::invalid_argument);
}

TEST_CASE("tv") {
  CHECK(tv(gen_signal(make_grid(9), preset_signal("flat"))) == 0.0);
  CHECK(tv(std::vector<double>{0, 0, 0, 1, 1}) == 1.0);
  for (std::size_t n : {2u, 7u, 128u}) {
    const Signal x = gen_signal(make_grid(n), preset_signal("affine"));
    CHECK(tv(x) == doctest::Approx(1.0 - 1.0 / static_cast<double>(n)));
  }
}

TEST_CASE("signal io") {
  std::istringstream in("1.0\n2.0\n");
  const Signal s = read_signal(in);
  CHECK(s.size() == 2);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);

  std::istringstream crlf("0.5\r\n-3e-2\r\n\r\n");
  const Signal t = read_signal(crlf);
  CHECK(t.size() == 2);
  CHECK(t[1] == -0.03);

  std::istringstream bad("1.0\nabc\n");
  try {
    read_signal(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream one("1.0\n");
  CHECK_THROWS_AS(read_signal(one), FormatError);
  std::istringstream nan_line("1.0\nnan\n");
  CHECK_THROWS_AS(read_signal(nan_line), FormatError);

  const auto path = std::filesystem::temp_directory_path() / "fractgv_signal_roundtrip.csv";
  const Signal u = add_noise(gen_signal(make_grid(33), preset_signal("sine")), {0.1, 3, false});
  save_signal(u, path);
  CHECK(load_signal(path) == u);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_signal("/nonexistent/dir/none.csv"), FormatError);
}

}
