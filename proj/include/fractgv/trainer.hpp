#pragma once

// Upper level of the bilevel scheme: exhaustive search of the cost
// I(alpha, r) = ||u_{alpha,r} - u_c||^2 over a discrete box.

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fractgv/signal.hpp"
#include "fractgv/solver.hpp"

namespace fractgv {

/// Evenly spaced values min, min + step, ..., max (count rounded from
/// (max - min) / step). Parses "min:step:max" or a single value.
std::vector<double> linspace_step(double min, double step, double max);
std::vector<double> parse_range(std::string_view text);

struct BoxGrid {
  std::vector<double> alpha_values;
  std::vector<double> r_values;
  double P = 0.005;
  /// false: alpha_0 = ... = alpha_k share one value. true: Cartesian product
  /// of alpha_values over the k + 1 components of each r.
  bool vector_mode = false;
};

inline constexpr std::size_t kMaxCells = 1'000'000;

/// Checks sorting, emptiness, alpha in {0} U [P, 1/P], r in [1, 1/P] and the
/// cell-count guard. Throws std::invalid_argument.
void validate(const BoxGrid& box);

std::size_t cell_count(const BoxGrid& box);

struct LandscapeCell {
  std::vector<double> alpha;  // one value in scalar mode
  double r = 1.0;
  double cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool failed = false;
};

struct Landscape {
  BoxGrid box;
  std::vector<LandscapeCell> cells;  // canonical order: r outer, alpha inner
  std::size_t argmin = 0;
  std::string digest;  // hash of (u_eta, u_c, box, solver options)

  const LandscapeCell& best() const { return cells[argmin]; }
};

/// Runs the lower-level solve and measures l2_dist_sq(u_opt, u_c). Solver
/// NumericErrors become a failed cell with infinite cost.
LandscapeCell cost(std::span<const double> alpha, double r, const Signal& u_eta,
                   const Signal& u_c, const SolverOptions& options);

/// Same, also returning the reconstruction.
LandscapeCell cost(std::span<const double> alpha, double r, const Signal& u_eta,
                   const Signal& u_c, const SolverOptions& options, Signal* reconstruction);

/// Evaluates every cell with `jobs` worker threads. The result does not depend
/// on `jobs`. Argmin ties go to the smaller r, then the lexicographically
/// smaller alpha. Throws TrainingError when every cell failed.
Landscape grid_search(const BoxGrid& box, const Signal& u_eta, const Signal& u_c,
                      const SolverOptions& options, unsigned jobs = 1);

/// Picks the argmin with the tie-break above; returns cells.size() when every
/// cell failed.
std::size_t find_argmin(const std::vector<LandscapeCell>& cells);

/// Header "alpha,r,cost,iterations,converged", rows in canonical order, then
/// "# argmin,<alpha>,<r>,<cost>". Vector alphas are joined with ';'.
void export_landscape(const Landscape& landscape, const std::filesystem::path& path);
std::string landscape_csv(const Landscape& landscape);

/// The 3x3 neighbourhood of the argmin (its grid neighbours on each axis)
/// resampled at the local spacing divided by `factor` (integer >= 2); never
/// leaves the original box.
BoxGrid refine_argmin(const Landscape& landscape, int factor);

std::string inputs_digest(const Signal& u_eta, const Signal& u_c, const BoxGrid& box,
                          const SolverOptions& options);

}  // namespace fractgv
