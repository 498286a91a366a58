// fractgv: denoise 1D signals with fractional-order TGV and train (alpha, r)
// by grid search.
//
// Exit codes: 0 success, 1 I/O, 2 usage, 3 numeric, 4 training, 5 check failed.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fractgv/analytic.hpp"
#include "fractgv/config.hpp"
#include "fractgv/errors.hpp"
#include "fractgv/fracnorm.hpp"
#include "fractgv/numfmt.hpp"
#include "fractgv/signal.hpp"
#include "fractgv/solver.hpp"
#include "fractgv/trainer.hpp"

namespace fs = std::filesystem;
using namespace fractgv;

namespace {

enum ExitCode : int { kOk = 0, kIo = 1, kUsage = 2, kNumeric = 3, kTraining = 4, kCheckFailed = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
}

void require_writable(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw IoError("output directory '" + parent.string() + "' does not exist");
  if (fs::is_directory(path)) throw IoError("output path '" + path + "' is a directory");
}

void print(const std::string& key, double value) {
  std::cout << key << '=' << format_double(value) << '\n';
}
void print(const std::string& key, const std::string& value) {
  std::cout << key << '=' << value << '\n';
}

Quadrature parse_quadrature(const std::string& name) {
  if (name == "cell_exact" || name == "cell") return Quadrature::cell_exact;
  if (name == "midpoint") return Quadrature::midpoint;
  throw std::invalid_argument("unknown quadrature '" + name + "'");
}

// Solver flags shared by several subcommands. Config-file values fill in
// whatever was not given on the command line.
struct SolverFlags {
  int max_iter = SolverOptions{}.max_iter;
  double tol_rel = SolverOptions{}.tol_rel;
  int window = SolverOptions{}.window;
  double safety = SolverOptions{}.safety;
  std::string quadrature = "cell_exact";
  std::string steps = "block_diagonal";
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("--max-iter", max_iter, "Primal-dual iteration cap");
    app->add_option("--tol-rel", tol_rel, "Relative stopping tolerance");
    app->add_option("--window", window, "Energy stagnation window (iterations)");
    app->add_option("--safety", safety, "Safety factor on the operator-norm estimate");
    app->add_option("--quadrature", quadrature, "Gagliardo weights: cell_exact | midpoint");
    app->add_option("--steps", steps, "Primal-dual steps: block_diagonal | scalar")
        ->check(CLI::IsMember({"block_diagonal", "scalar"}));
    app->add_option("--config", config, "key=value config file (flags take precedence)");
  }

  KeyValueConfig load_config() const {
    if (config.empty()) return {};
    require_readable(config);
    return KeyValueConfig::load(config);
  }

  SolverOptions resolve(const CLI::App* app, const KeyValueConfig& cfg) const {
    SolverOptions options;
    apply_config(cfg, options);
    if (app->count("--max-iter")) options.max_iter = max_iter;
    if (app->count("--tol-rel")) options.tol_rel = tol_rel;
    if (app->count("--window")) options.window = window;
    if (app->count("--safety")) options.safety = safety;
    if (app->count("--quadrature")) options.quadrature = parse_quadrature(quadrature);
    if (app->count("--steps"))
      options.steps = steps == "scalar" ? StepRule::scalar : StepRule::block_diagonal;
    validate(options);
    return options;
  }
};

// Fill `target` from the config when the flag was not given.
void from_config(const CLI::App* app, const char* flag, const KeyValueConfig& cfg,
                 const char* key, std::string& target) {
  if (app->count(flag) == 0)
    if (auto v = cfg.get(key)) target = *v;
}
void from_config(const CLI::App* app, const char* flag, const KeyValueConfig& cfg,
                 const char* key, double& target) {
  if (app->count(flag) == 0)
    if (auto v = cfg.get_double(key)) target = *v;
}
void from_config(const CLI::App* app, const char* flag, const KeyValueConfig& cfg,
                 const char* key, unsigned& target) {
  if (app->count(flag) == 0)
    if (auto v = cfg.get_int(key)) target = static_cast<unsigned>(*v);
}

std::vector<double> s_values(const std::string& text) {
  auto values = parse_range(text);
  for (double s : values)
    if (!(s >= 0.01 && s <= 0.99))
      throw std::invalid_argument("s values must lie in [0.01, 0.99], got " + format_double(s));
  return values;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  long long n = 256;
  double sigma = 0.05;
  std::uint64_t seed = 0;
  bool zero_mean = false;
  std::string out_clean, out_noisy;
};

int run_generate(const GenerateArgs& a) {
  if (a.n < 2) throw std::invalid_argument("--n must be >= 2");
  require_writable(a.out_clean);
  require_writable(a.out_noisy);
  const Grid grid = make_grid(static_cast<std::size_t>(a.n));
  const Signal clean = gen_signal(grid, preset_signal(a.kind));
  const Signal noisy = add_noise(clean, NoiseSpec{a.sigma, a.seed, a.zero_mean});
  save_signal(clean, a.out_clean);
  save_signal(noisy, a.out_noisy);
  print("n", static_cast<double>(a.n));
  print("noise_l2_sq", l2_dist_sq(noisy, clean));
  return kOk;
}

// --- denoise ----------------------------------------------------------------

struct DenoiseArgs {
  std::string in, clean, out;
  std::vector<double> alpha;
  double r = 1.0;
  SolverFlags solver;
};

int run_denoise(const CLI::App* app, DenoiseArgs a) {
  const KeyValueConfig cfg = a.solver.load_config();
  from_config(app, "--in", cfg, "in", a.in);
  from_config(app, "--clean", cfg, "clean", a.clean);
  from_config(app, "--out", cfg, "out", a.out);
  from_config(app, "--r", cfg, "r", a.r);
  if (a.alpha.empty())
    if (auto v = cfg.get("alpha")) a.alpha = parse_range(*v);
  if (a.in.empty() || a.out.empty() || a.alpha.empty())
    throw std::invalid_argument("denoise needs --in, --out and --alpha");
  const SolverOptions options = a.solver.resolve(app, cfg);
  require_readable(a.in);
  if (!a.clean.empty()) require_readable(a.clean);
  require_writable(a.out);

  const Signal noisy = load_signal(a.in);
  const FracOrder order(a.r);
  DenoiseProblem problem{noisy, order, make_weights(a.alpha, order), options};
  std::optional<Signal> clean;
  if (!a.clean.empty()) {
    clean = load_signal(a.clean);
    if (!(clean->grid() == noisy.grid()))
      throw std::invalid_argument("--clean and --in have different lengths");
  }
  const DenoiseResult result = solve(problem);
  save_signal(result.u_opt, a.out);
  print("energy", result.energy);
  print("tgv", result.tgv_value);
  print("fidelity", result.fidelity);
  print("iterations", static_cast<double>(result.iterations));
  print("converged", result.converged ? "true" : "false");
  if (clean) print("cost", l2_dist_sq(result.u_opt, *clean));
  return kOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string noisy, clean, out_landscape, out_signal;
  double P = 0.005;
  std::string alpha_grid = "0:0.005:2.5";
  std::string r_grid = "1:0.0025:2";
  unsigned jobs = 1;
  bool vector_alpha = false;
  SolverFlags solver;
};

int run_train(const CLI::App* app, TrainArgs a) {
  const KeyValueConfig cfg = a.solver.load_config();
  from_config(app, "--noisy", cfg, "noisy", a.noisy);
  from_config(app, "--clean", cfg, "clean", a.clean);
  from_config(app, "--out-landscape", cfg, "out_landscape", a.out_landscape);
  from_config(app, "--out-signal", cfg, "out_signal", a.out_signal);
  from_config(app, "--p", cfg, "p", a.P);
  from_config(app, "--alpha-grid", cfg, "alpha_grid", a.alpha_grid);
  from_config(app, "--r-grid", cfg, "r_grid", a.r_grid);
  from_config(app, "--jobs", cfg, "jobs", a.jobs);
  if (app->count("--vector-alpha") == 0)
    if (auto v = cfg.get_bool("vector_alpha")) a.vector_alpha = *v;
  if (a.noisy.empty() || a.clean.empty() || a.out_landscape.empty())
    throw std::invalid_argument("train needs --noisy, --clean and --out-landscape");
  const SolverOptions options = a.solver.resolve(app, cfg);

  BoxGrid box;
  box.P = a.P;
  box.alpha_values = parse_range(a.alpha_grid);
  box.r_values = parse_range(a.r_grid);
  box.vector_mode = a.vector_alpha;
  validate(box);
  require_readable(a.noisy);
  require_readable(a.clean);
  require_writable(a.out_landscape);
  if (!a.out_signal.empty()) require_writable(a.out_signal);

  const Signal noisy = load_signal(a.noisy);
  const Signal clean = load_signal(a.clean);
  if (!(clean.grid() == noisy.grid()))
    throw std::invalid_argument("--clean and --noisy have different lengths");

  const Landscape landscape = grid_search(box, noisy, clean, options, std::max(1u, a.jobs));
  export_landscape(landscape, a.out_landscape);
  const LandscapeCell& best = landscape.best();
  if (!a.out_signal.empty()) {
    Signal reconstruction = noisy;
    cost(best.alpha, best.r, noisy, clean, options, &reconstruction);
    save_signal(reconstruction, a.out_signal);
  }
  std::size_t failed = 0;
  for (const auto& c : landscape.cells) failed += c.failed ? 1 : 0;
  print("cells", static_cast<double>(landscape.cells.size()));
  print("failed", static_cast<double>(failed));
  print("digest", landscape.digest);
  std::string alpha;
  for (std::size_t i = 0; i < best.alpha.size(); ++i)
    alpha += (i ? ";" : "") + format_double(best.alpha[i]);
  std::cout << "argmin alpha=" << alpha << " r=" << format_double(best.r)
            << " cost=" << format_double(best.cost) << '\n';
  return kOk;
}

// --- limits -----------------------------------------------------------------

struct LimitsArgs {
  std::string check;
  std::string s_grid;
  long long n = 0;  // 0: per-check default
  double L = 50.0;
  long long m = 256;
  std::vector<double> alpha{1.0, 1.0};
  std::string kind = "corner";
  std::string out;
  SolverFlags solver;
};

struct CheckRow {
  double s, value, reference, rel_err;
};

int run_limits(const CLI::App* app, LimitsArgs a) {
  const KeyValueConfig cfg = a.solver.load_config();
  const SolverOptions options = a.solver.resolve(app, cfg);
  if (!a.out.empty()) require_writable(a.out);
  const Quadrature rule = options.quadrature;

  std::vector<SweepRow> rows;
  std::vector<CheckRow> checks;
  double tolerance = 0.0;
  bool ok = true;

  if (a.check == "bbm") {
    const auto s_list = s_values(a.s_grid.empty() ? "0.5,0.7,0.9,0.95,0.99" : a.s_grid);
    const Grid grid = make_grid(static_cast<std::size_t>(a.n ? a.n : 1024));
    const Signal u = gen_signal(grid, preset_signal("affine"));
    rows = bbm_sweep(u, s_list, rule);
    tolerance = 0.03;
    for (const auto& r : rows) {
      const double ref = analytic::linear_bbm_value(r.s);
      checks.push_back({r.s, r.value, ref, std::abs(r.value / ref - 1.0)});
    }
    // (1-s)|u|_{W^{s,1}} tends to 2 tv(u) in one dimension; reported only.
    print("tv", tv(u));
    print("ratio_to_tv_at_max_s", rows.back().value / tv(u));
  } else if (a.check == "ms") {
    const auto s_list = s_values(a.s_grid.empty() ? "0.2,0.3,0.5" : a.s_grid);
    const auto m = static_cast<std::size_t>(a.m);
    const Grid grid = make_grid(static_cast<std::size_t>(a.n ? a.n : a.m));
    const Signal u = gen_signal(grid, preset_signal("flat"));
    rows = ms_sweep(u, s_list, a.L, m, rule);
    tolerance = 0.02;
    for (const auto& r : rows) {
      const double ref = r.s * analytic::indicator_truncated_seminorm(r.s, a.L);
      checks.push_back({r.s, r.value, ref, std::abs(r.value / ref - 1.0)});
      if (std::abs(r.s * analytic::indicator_line_seminorm(r.s) - analytic::indicator_ms_value(r.s)) >
          1e-12 * analytic::indicator_ms_value(r.s))
        ok = false;
    }
  } else if (a.check == "tgv") {
    const auto s_list = s_values(a.s_grid.empty() ? "0.01,0.25,0.5,0.75,0.99" : a.s_grid);
    if (a.alpha.size() != 2) throw std::invalid_argument("--alpha needs two values for the tgv check");
    const Grid grid = make_grid(static_cast<std::size_t>(a.n ? a.n : 256));
    const Signal u = gen_signal(grid, preset_signal(a.kind));
    const TgvSweep sweep = limit_sweep_tgv(u, a.alpha, s_list, options);
    rows = sweep.rows;
    tolerance = 0.05;
    print("tgv2", sweep.tgv2);
    print("alpha0_tv", sweep.alpha0_tv);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].s < rows[lo].s) lo = i;
      if (rows[i].s > rows[hi].s) hi = i;
      if (rows[i].value > sweep.alpha0_tv * (1.0 + 1e-4)) ok = false;
    }
    checks.push_back({rows[hi].s, rows[hi].value, sweep.tgv2,
                      std::abs(rows[hi].value / sweep.tgv2 - 1.0)});
    checks.push_back({rows[lo].s, rows[lo].value, sweep.alpha0_tv,
                      std::abs(rows[lo].value / sweep.alpha0_tv - 1.0)});
  } else {
    throw std::invalid_argument("--check must be bbm, ms or tgv");
  }

  if (!a.out.empty()) write_sweep_csv(rows, a.out);
  double worst = 0.0;
  for (const auto& c : checks) {
    worst = std::max(worst, c.rel_err);
    if (!(c.rel_err <= tolerance)) ok = false;
  }
  print("check", a.check);
  print("points", static_cast<double>(rows.size()));
  print("max_rel_err", worst);
  print("tolerance", tolerance);
  print("status", ok ? "pass" : "fail");
  return ok ? kOk : kCheckFailed;
}

// --- seminorm ---------------------------------------------------------------

struct SeminormArgs {
  std::string in;
  double s = 0.5;
  std::optional<double> p;
  bool tgv = false;
  std::vector<double> alpha;
  double r = 1.5;
  SolverFlags solver;
};

int run_seminorm(const CLI::App* app, const SeminormArgs& a) {
  const KeyValueConfig cfg = a.solver.load_config();
  const SolverOptions options = a.solver.resolve(app, cfg);
  require_readable(a.in);
  const Signal u = load_signal(a.in);
  double value = 0.0;
  if (a.tgv) {
    if (a.alpha.empty()) throw std::invalid_argument("--tgv needs --alpha");
    const FracOrder order(a.r);
    value = tgv_seminorm(u, order, make_weights(a.alpha, order), options);
  } else {
    GagliardoParams params = GagliardoParams::for_fraction(a.s);
    if (a.p) params.p = *a.p;
    value = gagliardo_seminorm(u, params, options.quadrature);
  }
  print("value", value);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-order TGV denoising and bilevel (alpha, r) training for 1D signals"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a clean test signal and a noisy copy");
  generate->add_option("--kind", gen.kind, "step | corner | flat | affine | sine")
      ->required()
      ->check(CLI::IsMember({"step", "corner", "flat", "affine", "sine"}));
  generate->add_option("--n", gen.n, "Number of samples");
  generate->add_option("--sigma", gen.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed, "Noise seed (mt19937_64)");
  generate->add_flag("--zero-mean", gen.zero_mean, "Shift the noise to zero mean");
  generate->add_option("--out-clean", gen.out_clean)->required();
  generate->add_option("--out-noisy", gen.out_noisy)->required();

  DenoiseArgs den;
  auto* denoise = app.add_subcommand("denoise", "Solve the lower-level problem for one (alpha, r)");
  denoise->add_option("--in", den.in, "Noisy signal CSV");
  denoise->add_option("--clean", den.clean, "Clean signal CSV; prints the cost when given");
  denoise->add_option("--alpha", den.alpha, "alpha_0 ... alpha_k, or one value to broadcast");
  denoise->add_option("--r", den.r, "Order r >= 1");
  denoise->add_option("--out", den.out, "Reconstruction CSV");
  den.solver.attach(denoise);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Grid search of the cost over (alpha, r)");
  train->add_option("--noisy", tr.noisy);
  train->add_option("--clean", tr.clean);
  train->add_option("--p", tr.P, "Box constant P in (0,1)");
  train->add_option("--alpha-grid", tr.alpha_grid, "min:step:max or a comma list");
  train->add_option("--r-grid", tr.r_grid, "min:step:max or a comma list");
  train->add_option("--out-landscape", tr.out_landscape);
  train->add_option("--out-signal", tr.out_signal, "Optimal reconstruction CSV");
  train->add_option("--jobs", tr.jobs, "Worker threads");
  train->add_flag("--vector-alpha", tr.vector_alpha, "Independent alpha_j (Cartesian grid)");
  tr.solver.attach(train);

  LimitsArgs lim;
  auto* limits = app.add_subcommand("limits", "Check the s->1 / s->0 limits numerically");
  limits->add_option("--check", lim.check, "bbm | ms | tgv")->required();
  limits->add_option("--s-grid", lim.s_grid, "s values: min:step:max or a comma list");
  limits->add_option("--n", lim.n, "Samples (bbm: 1024, ms: m, tgv: 256)");
  limits->add_option("--L", lim.L, "ms: truncation half-width");
  limits->add_option("--m", lim.m, "ms: samples per unit length");
  limits->add_option("--alpha", lim.alpha, "tgv: alpha_0 alpha_1");
  limits->add_option("--kind", lim.kind, "tgv: test signal");
  limits->add_option("--out", lim.out, "Sweep CSV (s,value)");
  lim.solver.attach(limits);

  SeminormArgs sem;
  auto* seminorm = app.add_subcommand("seminorm", "Gagliardo or TGV^r seminorm of a signal");
  seminorm->add_option("--in", sem.in)->required();
  seminorm->add_option("--s", sem.s, "Fractional exponent in (0,1)");
  seminorm->add_option("--p", sem.p, "Integrability exponent (default 1 + s(1-s))");
  seminorm->add_flag("--tgv", sem.tgv, "Evaluate TGV^r_alpha instead");
  seminorm->add_option("--alpha", sem.alpha);
  seminorm->add_option("--r", sem.r);
  sem.solver.attach(seminorm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*denoise) return run_denoise(denoise, den);
    if (*train) return run_train(train, tr);
    if (*limits) return run_limits(limits, lim);
    if (*seminorm) return run_seminorm(seminorm, sem);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kTraining;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
