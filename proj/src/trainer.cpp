#include "fractgv/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fractgv/errors.hpp"
#include "fractgv/numfmt.hpp"

namespace fractgv {

namespace {

// Strip accumulated binary noise such as 0.29000000000000004.
double tidy(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

bool nearly(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<double> linspace_step(double min, double step, double max) {
  if (!std::isfinite(min) || !std::isfinite(step) || !std::isfinite(max))
    throw std::invalid_argument("range: non-finite bound");
  if (min == max) return {min};
  if (!(step > 0.0) || !(max > min))
    throw std::invalid_argument("range: need min < max and step > 0");
  const double span = (max - min) / step;
  const auto intervals = std::llround(span);
  if (std::abs(span - static_cast<double>(intervals)) > 1e-9 * std::max(1.0, span))
    throw std::invalid_argument("range: (max - min) is not a whole number of steps");
  std::vector<double> values(static_cast<std::size_t>(intervals) + 1);
  for (long long i = 0; i <= intervals; ++i)
    values[static_cast<std::size_t>(i)] = tidy(min + static_cast<double>(i) * step);
  values.back() = max;
  return values;
}

std::vector<double> parse_range(std::string_view text) {
  std::vector<std::string_view> parts;
  char separator = text.find(':') != std::string_view::npos ? ':' : ',';
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(separator, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  std::vector<double> numbers;
  for (auto part : parts) numbers.push_back(parse_double(part));
  if (separator == ':') {
    if (numbers.size() != 3) throw std::invalid_argument("range must be min:step:max");
    return linspace_step(numbers[0], numbers[1], numbers[2]);
  }
  return numbers;
}

namespace {

void check_sorted(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
}

std::size_t ipow_saturating(std::size_t base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > kMaxCells / base + 1) return kMaxCells + 1;
    out *= base;
  }
  return out;
}

std::vector<LandscapeCell> enumerate_cells(const BoxGrid& box) {
  std::vector<LandscapeCell> cells;
  for (double r : box.r_values) {
    if (!box.vector_mode) {
      for (double a : box.alpha_values) {
        LandscapeCell cell;
        cell.alpha = {a};
        cell.r = r;
        cells.push_back(std::move(cell));
      }
      continue;
    }
    const auto components = static_cast<std::size_t>(FracOrder(r).k()) + 1;
    std::vector<std::size_t> index(components, 0);
    const std::size_t base = box.alpha_values.size();
    for (;;) {
      LandscapeCell cell;
      cell.r = r;
      for (std::size_t c = 0; c < components; ++c) cell.alpha.push_back(box.alpha_values[index[c]]);
      cells.push_back(std::move(cell));
      // lexicographic odometer, last component fastest
      bool carry = true;
      for (std::size_t c = components; carry && c > 0;) {
        --c;
        if (++index[c] < base) carry = false;
        else index[c] = 0;
      }
      if (carry) break;
    }
  }
  return cells;
}

}  // namespace

std::size_t cell_count(const BoxGrid& box) {
  if (!box.vector_mode) return box.alpha_values.size() * box.r_values.size();
  std::size_t total = 0;
  for (double r : box.r_values) {
    total += ipow_saturating(box.alpha_values.size(), FracOrder(r).k() + 1);
    if (total > kMaxCells) return kMaxCells + 1;
  }
  return total;
}

void validate(const BoxGrid& box) {
  if (!(box.P > 0.0 && box.P < 1.0)) throw std::invalid_argument("box: P must lie in (0,1)");
  check_sorted(box.alpha_values, "alpha");
  check_sorted(box.r_values, "r");
  const double lo = box.P, hi = 1.0 / box.P;
  for (double a : box.alpha_values)
    if (a != 0.0 && !(a >= lo * (1.0 - 1e-12) && a <= hi * (1.0 + 1e-12)))
      throw std::invalid_argument("alpha " + format_double(a) + " outside {0} U [P, 1/P] = {0} U [" +
                                  format_double(lo) + ", " + format_double(hi) + "]");
  for (double r : box.r_values)
    if (!(r >= 1.0 && r <= hi * (1.0 + 1e-12)))
      throw std::invalid_argument("r " + format_double(r) + " outside [1, 1/P]");
  if (cell_count(box) > kMaxCells)
    throw std::invalid_argument("box has more than " + std::to_string(kMaxCells) + " cells");
}

LandscapeCell cost(std::span<const double> alpha, double r, const Signal& u_eta,
                   const Signal& u_c, const SolverOptions& options, Signal* reconstruction) {
  if (!(u_eta.grid() == u_c.grid()))
    throw std::invalid_argument("cost: noisy and clean signals live on different grids");
  LandscapeCell cell;
  cell.alpha.assign(alpha.begin(), alpha.end());
  cell.r = r;
  const FracOrder order(r);
  DenoiseProblem problem{u_eta, order, make_weights(alpha, order), options};
  try {
    const DenoiseResult result = solve(problem);
    cell.cost = l2_dist_sq(result.u_opt, u_c);
    cell.iterations = result.iterations;
    cell.converged = result.converged;
    if (reconstruction) *reconstruction = result.u_opt;
  } catch (const NumericError&) {
    cell.failed = true;
    cell.converged = false;
    cell.cost = std::numeric_limits<double>::infinity();
  }
  return cell;
}

LandscapeCell cost(std::span<const double> alpha, double r, const Signal& u_eta,
                   const Signal& u_c, const SolverOptions& options) {
  return cost(alpha, r, u_eta, u_c, options, nullptr);
}

std::size_t find_argmin(const std::vector<LandscapeCell>& cells) {
  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.failed || !std::isfinite(c.cost)) continue;
    if (best == cells.size()) {
      best = i;
      continue;
    }
    const auto& b = cells[best];
    if (c.cost < b.cost ||
        (c.cost == b.cost && (c.r < b.r || (c.r == b.r && c.alpha < b.alpha))))
      best = i;
  }
  return best;
}

Landscape grid_search(const BoxGrid& box, const Signal& u_eta, const Signal& u_c,
                      const SolverOptions& options, unsigned jobs) {
  validate(box);
  validate(options);
  if (!(u_eta.grid() == u_c.grid()))
    throw std::invalid_argument("grid_search: noisy and clean signals live on different grids");

  Landscape landscape;
  landscape.box = box;
  landscape.cells = enumerate_cells(box);
  landscape.digest = inputs_digest(u_eta, u_c, box, options);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= landscape.cells.size()) return;
      auto& cell = landscape.cells[i];
      try {
        cell = cost(cell.alpha, cell.r, u_eta, u_c, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(landscape.cells.size());
        return;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(
      jobs, static_cast<unsigned>(std::max<std::size_t>(1, landscape.cells.size()))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  landscape.argmin = find_argmin(landscape.cells);
  if (landscape.argmin == landscape.cells.size())
    throw TrainingError("every cell of the training grid failed");
  return landscape;
}

namespace {

std::string join_alpha(const std::vector<double>& alpha) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) out += ';';
    out += format_double(alpha[i]);
  }
  return out;
}

}  // namespace

std::string landscape_csv(const Landscape& landscape) {
  std::string out = "alpha,r,cost,iterations,converged\n";
  for (const auto& c : landscape.cells) {
    out += join_alpha(c.alpha);
    out += ',' + format_double(c.r) + ',' + format_double(c.cost) + ',' +
           std::to_string(c.iterations) + ',' + (c.converged ? "true" : "false") + '\n';
  }
  if (landscape.argmin < landscape.cells.size()) {
    const auto& b = landscape.best();
    out += "# argmin," + join_alpha(b.alpha) + ',' + format_double(b.r) + ',' +
           format_double(b.cost) + '\n';
  }
  return out;
}

void export_landscape(const Landscape& landscape, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write landscape '" + path.string() + "'");
  out << landscape_csv(landscape);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

// Points around values[idx] at the local spacing / factor, within the
// neighbouring grid values.
std::vector<double> refine_axis(const std::vector<double>& values, std::size_t idx, int factor) {
  const double centre = values[idx];
  std::vector<double> out{centre};
  if (idx > 0) {
    const double step = (centre - values[idx - 1]) / factor;
    for (int j = 1; j <= factor; ++j) out.push_back(tidy(centre - j * step));
  }
  if (idx + 1 < values.size()) {
    const double step = (values[idx + 1] - centre) / factor;
    for (int j = 1; j <= factor; ++j) out.push_back(tidy(centre + j * step));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t index_of(const std::vector<double>& values, double v) {
  const auto it = std::find_if(values.begin(), values.end(), [v](double x) { return nearly(x, v); });
  if (it == values.end()) throw std::invalid_argument("refine_argmin: argmin not on the grid");
  return static_cast<std::size_t>(it - values.begin());
}

}  // namespace

BoxGrid refine_argmin(const Landscape& landscape, int factor) {
  if (factor < 2) throw std::invalid_argument("refine_argmin: factor must be an integer >= 2");
  if (landscape.argmin >= landscape.cells.size())
    throw std::invalid_argument("refine_argmin: landscape has no argmin");
  const BoxGrid& box = landscape.box;
  const LandscapeCell& best = landscape.best();

  BoxGrid refined;
  refined.P = box.P;
  refined.vector_mode = box.vector_mode;
  refined.r_values = refine_axis(box.r_values, index_of(box.r_values, best.r), factor);

  std::set<double> alphas;
  for (double a : best.alpha)
    for (double v : refine_axis(box.alpha_values, index_of(box.alpha_values, a), factor))
      alphas.insert(v);
  for (double a : alphas)
    if (a == 0.0 || a >= box.P * (1.0 - 1e-12)) refined.alpha_values.push_back(a);
  return refined;
}

std::string inputs_digest(const Signal& u_eta, const Signal& u_c, const BoxGrid& box,
                          const SolverOptions& options) {
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a
  const auto mix_bytes = [&hash](const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  };
  const auto mix = [&](double v) { mix_bytes(&v, sizeof v); };
  for (double v : u_eta.values()) mix(v);
  for (double v : u_c.values()) mix(v);
  for (double v : box.alpha_values) mix(v);
  for (double v : box.r_values) mix(v);
  mix(box.P);
  mix(box.vector_mode ? 1.0 : 0.0);
  mix(options.max_iter);
  mix(options.tol_rel);
  mix(options.window);
  mix(options.safety);
  mix(options.opnorm_iters);
  mix(options.quadrature == Quadrature::cell_exact ? 0.0 : 1.0);
  mix(options.steps == StepRule::block_diagonal ? 0.0 : 1.0);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace fractgv
