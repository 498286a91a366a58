#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "fractgv/errors.hpp"
#include "fractgv/fracnorm.hpp"
#include "fractgv/prox.hpp"
#include "fractgv/signal.hpp"
#include "fractgv/solver.hpp"
#include "fractgv/trainer.hpp"

namespace py = pybind11;
using namespace fractgv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Signal to_signal(const Array& a) {
  std::vector<double> v = to_vector(a);
  const Grid grid = make_grid(v.size());
  return Signal(grid, std::move(v));
}

Quadrature quadrature_from(const std::string& name) {
  if (name == "cell_exact") return Quadrature::cell_exact;
  if (name == "midpoint") return Quadrature::midpoint;
  throw std::invalid_argument("quadrature must be 'cell_exact' or 'midpoint'");
}

SolverOptions options_from(int max_iter, double tol_rel, const std::string& quadrature) {
  SolverOptions o;
  o.max_iter = max_iter;
  o.tol_rel = tol_rel;
  o.quadrature = quadrature_from(quadrature);
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fractional-order TGV denoising for 1D signals";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  m.def("grid_nodes", [](std::size_t n) { return to_array(make_grid(n).nodes()); }, py::arg("n"),
        "Cell midpoints (i + 1/2)/n.");

  m.def(
      "generate",
      [](const std::string& kind, std::size_t n, double sigma, std::uint64_t seed, bool zero_mean) {
        const Signal clean = gen_signal(make_grid(n), preset_signal(kind));
        const Signal noisy = add_noise(clean, NoiseSpec{sigma, seed, zero_mean});
        return py::make_tuple(to_array(clean.values()), to_array(noisy.values()));
      },
      py::arg("kind"), py::arg("n") = 256, py::arg("sigma") = 0.05, py::arg("seed") = 0,
      py::arg("zero_mean") = false, "Returns (clean, noisy).");

  m.def("tv", [](const Array& u) { return tv(to_vector(u)); }, py::arg("u"));
  m.def("l2_dist_sq", [](const Array& u, const Array& v) {
    return l2_dist_sq(to_signal(u), to_signal(v));
  });

  m.def(
      "gagliardo_seminorm",
      [](const Array& u, double s, std::optional<double> p, const std::string& quadrature) {
        GagliardoParams params = GagliardoParams::for_fraction(s);
        if (p) params.p = *p;
        return gagliardo_seminorm(to_signal(u), params, quadrature_from(quadrature));
      },
      py::arg("u"), py::arg("s"), py::arg("p") = py::none(), py::arg("quadrature") = "cell_exact");

  m.def(
      "project_lq_ball",
      [](const Array& z, double q, double radius, double tol) {
        return to_array(project_lq_ball(to_vector(z), q, radius, tol));
      },
      py::arg("z"), py::arg("q"), py::arg("radius"), py::arg("tol") = 1e-10);

  m.def(
      "denoise",
      [](const Array& u_eta, std::vector<double> alpha, double r, int max_iter, double tol_rel,
         const std::string& quadrature) {
        const FracOrder order(r);
        DenoiseProblem problem{to_signal(u_eta), order, make_weights(alpha, order),
                               options_from(max_iter, tol_rel, quadrature)};
        std::optional<DenoiseResult> solved;
        {
          py::gil_scoped_release release;
          solved = solve(problem);
        }
        const DenoiseResult& res = *solved;
        py::dict out;
        out["u"] = to_array(res.u_opt.values());
        out["energy"] = res.energy;
        out["tgv"] = res.tgv_value;
        out["fidelity"] = res.fidelity;
        out["iterations"] = res.iterations;
        out["converged"] = res.converged;
        return out;
      },
      py::arg("u_eta"), py::arg("alpha"), py::arg("r"), py::arg("max_iter") = 20000,
      py::arg("tol_rel") = 1e-6, py::arg("quadrature") = "cell_exact");

  m.def(
      "tv_denoise_exact",
      [](const Array& u_eta, double alpha0) {
        return to_array(tv_denoise_exact(to_signal(u_eta), alpha0).values());
      },
      py::arg("u_eta"), py::arg("alpha0"));

  m.def(
      "tgv_seminorm",
      [](const Array& u, std::vector<double> alpha, double r, int max_iter, double tol_rel) {
        const FracOrder order(r);
        py::gil_scoped_release release;
        return tgv_seminorm(to_signal(u), order, make_weights(alpha, order),
                            options_from(max_iter, tol_rel, "cell_exact"));
      },
      py::arg("u"), py::arg("alpha"), py::arg("r"), py::arg("max_iter") = 20000,
      py::arg("tol_rel") = 1e-6);

  m.def(
      "train",
      [](const Array& u_eta, const Array& u_c, const std::string& alpha_grid,
         const std::string& r_grid, double P, unsigned jobs, int max_iter) {
        BoxGrid box;
        box.alpha_values = parse_range(alpha_grid);
        box.r_values = parse_range(r_grid);
        box.P = P;
        validate(box);
        SolverOptions options;
        options.max_iter = max_iter;
        const Signal noisy = to_signal(u_eta), clean = to_signal(u_c);
        std::optional<Landscape> searched;
        {
          py::gil_scoped_release release;
          searched = grid_search(box, noisy, clean, options, jobs);
        }
        const Landscape& land = *searched;
        const LandscapeCell& best = land.best();
        py::dict out;
        out["alpha"] = best.alpha;
        out["r"] = best.r;
        out["cost"] = best.cost;
        out["csv"] = landscape_csv(land);
        return out;
      },
      py::arg("u_eta"), py::arg("u_c"), py::arg("alpha_grid"), py::arg("r_grid"),
      py::arg("P") = 0.005, py::arg("jobs") = 1, py::arg("max_iter") = 20000);
}
