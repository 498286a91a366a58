#include "fractgv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fractgv/errors.hpp"
#include "fractgv/numfmt.hpp"

namespace fractgv {

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = node(i);
  return x;
}

Grid make_grid(std::size_t n) {
  if (n < 2) throw std::invalid_argument("make_grid: need n >= 2, got " + std::to_string(n));
  return Grid{n, 1.0 / static_cast<double>(n)};
}

Signal::Signal(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (grid_.n < 2 || values_.size() != grid_.n)
    throw std::invalid_argument("Signal: expected " + std::to_string(grid_.n) + " values, got " +
                                std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("Signal: non-finite sample");
}

namespace {

double evaluate(const Shape& shape, double x) {
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, Affine>) {
          return s.slope * x + s.intercept;
        } else {
          return s.offset +
                 s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * x + s.phase);
        }
      },
      shape);
}

}  // namespace

Signal gen_signal(const Grid& grid, const PiecewiseSpec& spec) {
  const auto& b = spec.breakpoints;
  if (spec.pieces.size() != b.size() + 1)
    throw std::invalid_argument("gen_signal: need one more piece than breakpoints");
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j] >= 0.0 && b[j] <= 1.0))
      throw std::invalid_argument("gen_signal: breakpoint outside [0,1]");
    if (j > 0 && !(b[j] > b[j - 1]))
      throw std::invalid_argument("gen_signal: breakpoints must be strictly increasing");
  }
  std::vector<double> values(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    // piece j covers [b_{j-1}, b_j)
    const auto piece = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
    values[i] = evaluate(spec.pieces[piece], x);
  }
  return Signal(grid, std::move(values));
}

PiecewiseSpec preset_signal(std::string_view kind) {
  if (kind == "flat") return {{}, {Constant{1.0}}};
  if (kind == "affine") return {{}, {Affine{1.0, 0.0}}};
  if (kind == "sine") return {{}, {Sinusoid{0.5, 1.0, 0.0, 0.5}}};
  if (kind == "step")
    return {{0.2, 0.45, 0.7}, {Constant{0.2}, Constant{1.0}, Constant{0.5}, Constant{0.8}}};
  if (kind == "corner")
    // continuous, corners at 0.25, 0.5 and 0.75
    return {{0.25, 0.5, 0.75},
            {Constant{0.2}, Affine{3.2, -0.6}, Affine{-1.6, 1.8}, Constant{0.6}}};
  throw std::invalid_argument("unknown signal kind '" + std::string(kind) +
                              "' (expected step|corner|flat|affine|sine)");
}

double GaussianSource::uniform_open() {
  const double unit = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double a = 0.0, b = 0.0, r2 = 0.0;
  do {
    a = uniform_open();
    b = uniform_open();
    r2 = a * a + b * b;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = b * factor;
  has_spare_ = true;
  return a * factor;
}

Signal add_noise(const Signal& u, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
    throw std::invalid_argument("add_noise: sigma must be finite and >= 0");
  const std::size_t n = u.size();
  std::vector<double> eta(n);
  GaussianSource source(spec.seed);
  for (double& e : eta) e = spec.sigma * source.next();
  if (spec.zero_mean) {
    double sum = 0.0;
    for (double e : eta) sum += e;
    const double shift = sum / static_cast<double>(n);
    for (double& e : eta) e -= shift;
  }
  std::vector<double> out(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < n; ++i) out[i] += eta[i];
  return Signal(u.grid(), std::move(out));
}

double l2_dist_sq(const Signal& u, const Signal& v) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("l2_dist_sq: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return u.grid().h * sum;
}

double tv(std::span<const double> u) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) sum += std::abs(u[i + 1] - u[i]);
  return sum;
}

double tv(const Signal& u) { return tv(u.values()); }

double mean(const Signal& u) {
  double sum = 0.0;
  for (double v : u.values()) sum += v;
  return sum / static_cast<double>(u.size());
}

Signal read_signal(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  std::vector<double> values;
  values.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    double v = 0.0;
    try {
      v = parse_double(lines[i]);
    } catch (const std::invalid_argument&) {
      throw FormatError("line " + std::to_string(i + 1) + ": not a number: '" + lines[i] + "'",
                        i + 1);
    }
    if (!std::isfinite(v))
      throw FormatError("line " + std::to_string(i + 1) + ": non-finite value", i + 1);
    values.push_back(v);
  }
  if (values.size() < 2)
    throw FormatError("signal needs at least 2 samples, got " + std::to_string(values.size()),
                      lines.size());
  const Grid grid = make_grid(values.size());
  return Signal(grid, std::move(values));
}

Signal load_signal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'", 0);
  try {
    return read_signal(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.line());
  }
}

void write_signal(const Signal& u, std::ostream& out) {
  for (double v : u.values()) out << format_double(v) << '\n';
}

void save_signal(const Signal& u, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_signal(u, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace fractgv
