// Python bindings: thin class wrappers around the field types plus free
// functions mirroring the C++ surface. Arrays cross the boundary as copies;
// fields are small enough that zero-copy views are not worth the lifetime
// rules they would impose.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <utility>

#include "varlp/diffops.hpp"
#include "varlp/exponent_builder.hpp"
#include "varlp/exponent_map.hpp"
#include "varlp/grid.hpp"
#include "varlp/kernels.hpp"
#include "varlp/metrics.hpp"
#include "varlp/modular.hpp"
#include "varlp/noise.hpp"
#include "varlp/parallel.hpp"
#include "varlp/phantom.hpp"
#include "varlp/solver.hpp"
#include "varlp/tomo.hpp"

namespace py = pybind11;
using namespace varlp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> values_from(const Array& a, std::int64_t rows, std::int64_t cols,
                                const char* what) {
  if (a.ndim() != 2 || a.shape(0) != rows || a.shape(1) != cols)
    throw std::invalid_argument(std::string(what) + ": array shape does not match the grid");
  const double* src = a.data();
  return std::vector<double>(src, src + static_cast<std::size_t>(rows * cols));
}

ScalarField field_from(const GridSpec& spec, const Array& a) {
  return ScalarField(spec, values_from(a, spec.rows, spec.cols, "ScalarField"));
}

py::array_t<double> to_numpy(const ScalarField& f) {
  py::array_t<double> out({f.rows(), f.cols()});
  std::memcpy(out.mutable_data(), f.data(), static_cast<std::size_t>(f.size()) * sizeof(double));
  return out;
}

py::array_t<double> to_numpy(const Sinogram& s) {
  const auto& g = s.geometry();
  py::array_t<double> out({static_cast<std::int64_t>(g.num_angles),
                           static_cast<std::int64_t>(g.num_detectors)});
  std::memcpy(out.mutable_data(), s.values().data(),
              static_cast<std::size_t>(s.size()) * sizeof(double));
  return out;
}

FbpConfig make_fbp(const std::string& filter, double cutoff) {
  FbpConfig cfg;
  cfg.cutoff = cutoff;
  if (filter == "ram_lak")
    cfg.filter = FbpConfig::Filter::ram_lak;
  else if (filter == "hann")
    cfg.filter = FbpConfig::Filter::hann;
  else
    throw std::invalid_argument("filter must be ram_lak or hann, got '" + filter + "'");
  cfg.validate();
  return cfg;
}

ExponentRecipe make_recipe(double sigma1, double sigma2, std::optional<double> clip_scale,
                           double percentile, double truncation, double delta_snap) {
  ExponentRecipe r;
  r.sigma1_cells = sigma1;
  r.sigma2_cells = sigma2;
  r.clip_scale = clip_scale;
  r.auto_percentile = percentile;
  r.truncation = truncation;
  r.delta_snap = delta_snap;
  r.validate();
  return r;
}

SolverConfig make_config(double lam, double lambda1, double lambda2, int iterations, double theta,
                         double step_scale, int opnorm_iters, int log_every) {
  SolverConfig cfg;
  cfg.lambda = lam;
  cfg.lambda1 = lambda1;
  cfg.lambda2 = lambda2;
  cfg.iterations = iterations;
  cfg.theta = theta;
  cfg.step_scale = step_scale;
  cfg.opnorm_iters = opnorm_iters;
  cfg.log_every = log_every;
  return cfg;
}

py::dict log_dict(const ConvergenceLog& log) {
  py::list entries;
  for (const auto& e : log.entries)
    entries.append(py::make_tuple(e.iteration, e.objective, e.primal_step, e.dual_step));
  py::dict d;
  d["entries"] = std::move(entries);
  d["operator_norm"] = log.operator_norm;
  d["sigma"] = log.sigma;
  d["tau"] = log.tau;
  d["initialization"] = log.initialization;
  return d;
}

py::dict run_problem(ProblemSpec prob) {
  py::dict out;
  if (prob.regularizer == Regularizer::tgv2) {
    Tgv2Result r = solve_tgv2(prob);
    out["image"] = std::move(r.image);
    out["slope"] = std::move(r.slope);
    out["log"] = log_dict(r.log);
  } else {
    SolveResult r = solve(prob);
    out["image"] = std::move(r.image);
    out["log"] = log_dict(r.log);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_varlp, m) {
  m.doc() = "Variable-exponent total variation: kernels, operators, solvers";
  m.attr("__version__") = "0.1.0";

  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<std::int64_t, std::int64_t, double, double, double, double>(),
           py::arg("rows"), py::arg("cols"), py::arg("x0"), py::arg("x1"), py::arg("y0"),
           py::arg("y1"))
      .def_static("unit_cells", &GridSpec::unit_cells, py::arg("rows"), py::arg("cols"))
      .def_static("square", &GridSpec::square, py::arg("n"), py::arg("half_extent"))
      .def_readonly("rows", &GridSpec::rows)
      .def_readonly("cols", &GridSpec::cols)
      .def_readonly("x0", &GridSpec::x0)
      .def_readonly("x1", &GridSpec::x1)
      .def_readonly("y0", &GridSpec::y0)
      .def_readonly("y1", &GridSpec::y1)
      .def_property_readonly("size", &GridSpec::size)
      .def("cell_width", &GridSpec::cell_width)
      .def("cell_height", &GridSpec::cell_height)
      .def("cell_area", &GridSpec::cell_area)
      .def("circumradius", &GridSpec::circumradius)
      .def(py::self == py::self)
      .def("__repr__", [](const GridSpec& s) {
        return "GridSpec(" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + ", [" +
               std::to_string(s.x0) + "," + std::to_string(s.x1) + "]x[" + std::to_string(s.y0) +
               "," + std::to_string(s.y1) + "])";
      });

  py::class_<ScalarField>(m, "ScalarField")
      .def(py::init<const GridSpec&, double>(), py::arg("spec"), py::arg("fill") = 0.0)
      .def(py::init(&field_from), py::arg("spec"), py::arg("values"))
      .def(py::init([](const Array& a) {
             if (a.ndim() != 2) throw std::invalid_argument("ScalarField: need a 2d array");
             const GridSpec spec = GridSpec::unit_cells(a.shape(0), a.shape(1));
             return field_from(spec, a);
           }),
           py::arg("values"))
      .def_property_readonly("spec", &ScalarField::spec)
      .def("numpy", [](const ScalarField& f) { return to_numpy(f); })
      .def("minimum", &ScalarField::minimum)
      .def("maximum", &ScalarField::maximum)
      .def("__repr__", [](const ScalarField& f) {
        return "ScalarField(" + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) + ")";
      });

  py::class_<VectorField>(m, "VectorField")
      .def(py::init<ScalarField, ScalarField>(), py::arg("x"), py::arg("y"))
      .def_property_readonly("spec", &VectorField::spec)
      .def("x", [](const VectorField& v) { return v.x(); })
      .def("y", [](const VectorField& v) { return v.y(); })
      .def("norm_field", &VectorField::norm_field);

  py::class_<ExponentMap>(m, "ExponentMap")
      .def(py::init<const ScalarField&, double>(), py::arg("values"),
           py::arg("delta_snap") = ExponentMap::default_snap)
      .def_static("constant", &ExponentMap::constant, py::arg("spec"), py::arg("p"),
                  py::arg("delta_snap") = ExponentMap::default_snap)
      .def_property_readonly("spec", &ExponentMap::spec)
      .def_property_readonly("delta_snap", &ExponentMap::delta_snap)
      .def("numpy", [](const ExponentMap& p) { return to_numpy(p.to_field()); });

  // scalar kernels, numpy-vectorized
  m.def("conj_integrand",
        py::vectorize([](double z, double p) { return conj_integrand(z, p); }), py::arg("z_norm"),
        py::arg("p"));
  m.def("newton_alpha",
        py::vectorize([](double z, double p, double tau) { return newton_alpha(z, p, tau); }),
        py::arg("z_norm"), py::arg("p"), py::arg("tau"));
  m.def("moreau_integrand",
        py::vectorize([](double z, double p, double tau) { return moreau_integrand(z, p, tau); }),
        py::arg("z_norm"), py::arg("p"), py::arg("tau"));
  m.def("prox_factor",
        py::vectorize([](double z, double p, double tau) { return prox_factor(z, p, tau); }),
        py::arg("z_norm"), py::arg("p"), py::arg("tau"));
  m.def("prox_factor_conj",
        py::vectorize([](double z, double p, double tau) { return prox_factor_conj(z, p, tau); }),
        py::arg("z_norm"), py::arg("p"), py::arg("tau"));

  // modular and proximal maps
  m.def("modular", py::overload_cast<const ScalarField&, const ExponentMap&>(&modular),
        py::arg("f"), py::arg("p"));
  m.def("modular", py::overload_cast<const VectorField&, const ExponentMap&>(&modular),
        py::arg("f"), py::arg("p"));
  m.def("modular_conjugate",
        py::overload_cast<const ScalarField&, const ExponentMap&>(&modular_conjugate),
        py::arg("f"), py::arg("p"));
  m.def("modular_conjugate",
        py::overload_cast<const VectorField&, const ExponentMap&>(&modular_conjugate),
        py::arg("f"), py::arg("p"));
  m.def(
      "moreau_envelope",
      [](const ScalarField& f, const ExponentMap& p, double tau) {
        return moreau_envelope(f, p, tau);
      },
      py::arg("f"), py::arg("p"), py::arg("tau"));
  m.def(
      "prox_modular",
      [](const ScalarField& f, const ExponentMap& p, double tau) {
        return prox_modular(f, p, tau);
      },
      py::arg("f"), py::arg("p"), py::arg("tau"));
  m.def(
      "prox_modular",
      [](const VectorField& f, const ExponentMap& p, double tau) {
        return prox_modular(f, p, tau);
      },
      py::arg("f"), py::arg("p"), py::arg("tau"));
  m.def(
      "prox_modular_conj",
      [](const ScalarField& f, const ExponentMap& p, double tau) {
        return prox_modular_conj(f, p, tau);
      },
      py::arg("f"), py::arg("p"), py::arg("tau"));
  m.def(
      "prox_modular_conj",
      [](const VectorField& f, const ExponentMap& p, double tau) {
        return prox_modular_conj(f, p, tau);
      },
      py::arg("f"), py::arg("p"), py::arg("tau"));

  // differential operators
  m.def("gradient", &gradient, py::arg("f"));
  m.def("divergence", &divergence, py::arg("g"));
  m.def("laplacian", &laplacian, py::arg("f"));
  m.def(
      "gaussian_smooth",
      [](const ScalarField& f, double sigma, double truncation) {
        return gaussian_smooth(f, KernelSpec{sigma, truncation});
      },
      py::arg("f"), py::arg("sigma"), py::arg("truncation") = 4.0);

  // test image, noise, quality metrics
  m.def("square_phantom", &square_phantom, py::arg("spec"));
  m.def(
      "add_noise",
      [](const ScalarField& f, double level, std::uint64_t seed) {
        NoiseResult r = add_noise(f, NoiseSpec{level, seed});
        return py::make_tuple(std::move(r.field), r.degenerate_range);
      },
      py::arg("f"), py::arg("level"), py::arg("seed") = 0);
  m.def("mse", &mse, py::arg("f"), py::arg("ref"));
  m.def("psnr", &psnr, py::arg("f"), py::arg("ref"));

  // exponent map construction
  m.def(
      "build_exponent",
      [](const ScalarField& f, double sigma1, double sigma2, std::optional<double> clip_scale,
         double percentile, double truncation, double delta_snap) {
        return build_exponent(
            f, make_recipe(sigma1, sigma2, clip_scale, percentile, truncation, delta_snap));
      },
      py::arg("f"), py::arg("sigma1") = 1.5, py::arg("sigma2") = 5.0,
      py::arg("clip_scale") = py::none(), py::arg("percentile") = 0.95,
      py::arg("truncation") = 4.0, py::arg("delta_snap") = ExponentMap::default_snap);

  // fan-beam tomography
  py::class_<FanBeamGeometry>(m, "FanBeamGeometry")
      .def_readonly("num_angles", &FanBeamGeometry::num_angles)
      .def_readonly("num_detectors", &FanBeamGeometry::num_detectors)
      .def_readonly("source_radius", &FanBeamGeometry::source_radius)
      .def_readonly("detector_radius", &FanBeamGeometry::detector_radius)
      .def_readonly("detector_extent", &FanBeamGeometry::detector_extent)
      .def("angle", &FanBeamGeometry::angle, py::arg("i"))
      .def("detector_offset", &FanBeamGeometry::detector_offset, py::arg("k"));

  py::class_<Sinogram>(m, "Sinogram")
      .def(py::init([](const FanBeamGeometry& g, const Array& a) {
             return Sinogram(g, values_from(a, g.num_angles, g.num_detectors, "Sinogram"));
           }),
           py::arg("geometry"), py::arg("values"))
      .def_property_readonly("geometry", &Sinogram::geometry)
      .def("numpy", [](const Sinogram& s) { return to_numpy(s); });

  m.def("default_fan_geometry", &default_fan_geometry, py::arg("image"),
        py::arg("num_angles") = 180, py::arg("num_detectors") = 192);
  m.def("forward", &forward, py::arg("f"), py::arg("geometry"));
  m.def("adjoint", &adjoint, py::arg("sinogram"), py::arg("image"));
  m.def(
      "fbp",
      [](const Sinogram& s, const GridSpec& image, const std::string& filter, double cutoff) {
        return fbp(s, make_fbp(filter, cutoff), image);
      },
      py::arg("sinogram"), py::arg("image"), py::arg("filter") = "ram_lak",
      py::arg("cutoff") = 1.0);
  m.def(
      "add_sinogram_noise",
      [](const Sinogram& s, double level, std::uint64_t seed) {
        SinogramNoiseResult r = add_noise(s, NoiseSpec{level, seed});
        return py::make_tuple(std::move(r.sinogram), r.degenerate_range);
      },
      py::arg("s"), py::arg("level"), py::arg("seed") = 0);
  m.def(
      "bootstrap_exponent",
      [](const Sinogram& data, const GridSpec& image, const std::string& filter, double cutoff,
         double sigma1, double sigma2, std::optional<double> clip_scale, double percentile,
         double truncation, double delta_snap) {
        return bootstrap_exponent(
            data, make_fbp(filter, cutoff), image,
            make_recipe(sigma1, sigma2, clip_scale, percentile, truncation, delta_snap));
      },
      py::arg("data"), py::arg("image"), py::arg("filter") = "ram_lak", py::arg("cutoff") = 1.0,
      py::arg("sigma1") = 1.5, py::arg("sigma2") = 5.0, py::arg("clip_scale") = py::none(),
      py::arg("percentile") = 0.95, py::arg("truncation") = 4.0,
      py::arg("delta_snap") = ExponentMap::default_snap);
  m.def(
      "bimodal_exponent",
      [](const Sinogram& secondary, const GridSpec& image, const std::string& filter,
         double cutoff, double sigma1, double sigma2, std::optional<double> clip_scale,
         double percentile, double truncation, double delta_snap) {
        return bimodal_exponent(
            secondary, make_fbp(filter, cutoff), image,
            make_recipe(sigma1, sigma2, clip_scale, percentile, truncation, delta_snap));
      },
      py::arg("secondary"), py::arg("image"), py::arg("filter") = "ram_lak",
      py::arg("cutoff") = 1.0, py::arg("sigma1") = 1.5, py::arg("sigma2") = 5.0,
      py::arg("clip_scale") = py::none(), py::arg("percentile") = 0.95,
      py::arg("truncation") = 4.0, py::arg("delta_snap") = ExponentMap::default_snap);

  // solvers: image-space (denoising) and sinogram-space (reconstruction)
  m.def(
      "denoise",
      [](const ScalarField& data, const std::string& regularizer,
         std::optional<ExponentMap> exponent, std::optional<ScalarField> initial, double lam,
         double lambda1, double lambda2, int iterations, double theta, double step_scale,
         int opnorm_iters, int log_every) {
        ProblemSpec prob;
        prob.regularizer = parse_regularizer(regularizer);
        prob.image_spec = data.spec();
        prob.image_data = data;
        prob.exponent = std::move(exponent);
        prob.initial = std::move(initial);
        prob.config = make_config(lam, lambda1, lambda2, iterations, theta, step_scale,
                                  opnorm_iters, log_every);
        return run_problem(std::move(prob));
      },
      py::arg("data"), py::arg("regularizer") = "tv", py::arg("exponent") = py::none(),
      py::arg("initial") = py::none(), py::arg("lam") = 0.1, py::arg("lambda1") = 0.1,
      py::arg("lambda2") = 0.2, py::arg("iterations") = 500, py::arg("theta") = 1.0,
      py::arg("step_scale") = 0.9, py::arg("opnorm_iters") = 50, py::arg("log_every") = 10);
  m.def(
      "reconstruct",
      [](const Sinogram& data, const GridSpec& image, const std::string& regularizer,
         std::optional<ExponentMap> exponent, std::optional<ScalarField> initial,
         const std::string& init_filter, double init_cutoff, double lam, double lambda1,
         double lambda2, int iterations, double theta, double step_scale, int opnorm_iters,
         int log_every) {
        ProblemSpec prob;
        prob.regularizer = parse_regularizer(regularizer);
        prob.image_spec = image;
        prob.sino_data = data;
        prob.exponent = std::move(exponent);
        prob.initial = std::move(initial);
        prob.init_fbp = make_fbp(init_filter, init_cutoff);
        prob.config = make_config(lam, lambda1, lambda2, iterations, theta, step_scale,
                                  opnorm_iters, log_every);
        return run_problem(std::move(prob));
      },
      py::arg("data"), py::arg("image"), py::arg("regularizer") = "tv",
      py::arg("exponent") = py::none(), py::arg("initial") = py::none(),
      py::arg("init_filter") = "ram_lak", py::arg("init_cutoff") = 1.0, py::arg("lam") = 0.1,
      py::arg("lambda1") = 0.1, py::arg("lambda2") = 0.2, py::arg("iterations") = 500,
      py::arg("theta") = 1.0, py::arg("step_scale") = 0.9, py::arg("opnorm_iters") = 50,
      py::arg("log_every") = 10);

  m.def("max_threads", &max_threads);
  m.def("set_max_threads", &set_max_threads, py::arg("n"));
}
