#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace fractgv {

/// Uniform midpoint grid on (0,1): x_i = (i + 1/2) h with h = 1/n.
struct Grid {
  std::size_t n = 0;
  double h = 0.0;

  double node(std::size_t i) const { return (static_cast<double>(i) + 0.5) * h; }
  std::vector<double> nodes() const;

  bool operator==(const Grid&) const = default;
};

/// Throws std::invalid_argument when n < 2.
Grid make_grid(std::size_t n);

/// Samples on a Grid. Construction checks the length and that every value is
/// finite.
class Signal {
 public:
  Signal(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const Signal&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct Constant {
  double value = 0.0;
};

/// u(x) = slope * x + intercept, in absolute coordinates.
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
};

/// u(x) = offset + amplitude * sin(2 pi frequency x + phase).
struct Sinusoid {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

using Shape = std::variant<Constant, Affine, Sinusoid>;

/// Piecewise signal on [0,1]. `breakpoints` are the interior breakpoints
/// b_0 < b_1 < ... in [0,1]; piece j covers [b_{j-1}, b_j) with b_{-1} = 0 and
/// the last piece closed at 1. pieces.size() == breakpoints.size() + 1.
struct PiecewiseSpec {
  std::vector<double> breakpoints;
  std::vector<Shape> pieces;
};

Signal gen_signal(const Grid& grid, const PiecewiseSpec& spec);

/// Named test signals: "step", "corner", "flat", "affine", "sine".
PiecewiseSpec preset_signal(std::string_view kind);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  bool zero_mean = false;
};

/// Standard normal draws from std::mt19937_64 via the Marsaglia polar method.
/// Both pieces are fully specified, so a seed gives the same stream on every
/// conforming toolchain (std::normal_distribution does not guarantee that).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform_open();  // (-1, 1), 53-bit resolution

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Signal add_noise(const Signal& u, const NoiseSpec& spec);

/// h * sum_i (u_i - v_i)^2. Throws std::invalid_argument on grid mismatch.
double l2_dist_sq(const Signal& u, const Signal& v);

/// Sum of jump magnitudes |u_{i+1} - u_i| (no h factor).
double tv(const Signal& u);
double tv(std::span<const double> u);

double mean(const Signal& u);

/// One value per line; LF or CRLF. Throws FormatError with the line number.
Signal load_signal(const std::filesystem::path& path);
Signal read_signal(std::istream& in);
void save_signal(const Signal& u, const std::filesystem::path& path);
void write_signal(const Signal& u, std::ostream& out);

}  // namespace fractgv
