#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

#include "varlp/exponent_builder.hpp"
#include "varlp/image_io.hpp"
#include "varlp/kernels.hpp"
#include "varlp/metrics.hpp"
#include "varlp/modular.hpp"
#include "varlp/noise.hpp"
#include "varlp/parallel.hpp"
#include "varlp/phantom.hpp"
#include "varlp/solver.hpp"
#include "varlp/tomo.hpp"

namespace varlp::cli {
namespace {

namespace fs = std::filesystem;

// Shared key blocks. A command's schema is the concatenation of the
// blocks it actually reads; ResolvedConfig rejects everything else.
void add_common(std::vector<KeySpec>& s) {
  s.push_back({"output_dir", std::nullopt, "directory all outputs are written to"});
  s.push_back({"threads", "0", "worker threads, 0 = VARLP_THREADS env or hardware"});
  s.push_back({"seed", "1234", "seed for every pseudo-random draw"});
  s.push_back({"image.bits", "16", "PNG/PGM sample depth, 8 or 16"});
}

void add_grid(std::vector<KeySpec>& s) {
  s.push_back({"grid.rows", "256", "rows of the synthesized test image"});
  s.push_back({"grid.cols", "256", "columns of the synthesized test image"});
}

void add_input(std::vector<KeySpec>& s) {
  s.push_back({"input", "", "image to load (PNG/PGM/CSV); empty = synthesize the test image"});
  s.push_back({"image.luma", "0", "accept color PNG input and convert to Rec.601 luma"});
}

void add_noise_keys(std::vector<KeySpec>& s, const char* level_default) {
  s.push_back({"noise.level", level_default,
               "Gaussian noise standard deviation relative to the data range"});
}

void add_recipe(std::vector<KeySpec>& s) {
  s.push_back({"recipe.sigma1", "1.5", "pre-Laplacian smoothing width, in cells"});
  s.push_back({"recipe.sigma2", "5.0", "edge-strength aggregation width, in cells"});
  s.push_back({"recipe.clip_scale", "auto", "edge-strength scale c in p = 2 - min(c*a, 1)"});
  s.push_back({"recipe.percentile", "0.95", "percentile of a that maps to p = 1 when c is auto"});
  s.push_back({"recipe.truncation", "4", "Gaussian kernel truncation, in sigmas"});
  s.push_back({"recipe.delta_snap", "0.05", "exponents below 1 + delta are snapped to 1"});
}

void add_solver(std::vector<KeySpec>& s) {
  s.push_back({"regularizer", "tvp", "tv | tvp | tgv2 | tikhonov"});
  s.push_back({"lambda", "0.1", "regularization weight (tv/tvp/tikhonov)"});
  s.push_back({"lambda1", "0.1", "tgv2 first-order weight"});
  s.push_back({"lambda2", "0.2", "tgv2 second-order weight"});
  s.push_back({"solver.iterations", "500", "primal-dual iterations"});
  s.push_back({"solver.theta", "1.0", "over-relaxation parameter in [0,1]"});
  s.push_back({"solver.step_scale", "0.9", "sigma = tau = step_scale / ||K||"});
  s.push_back({"solver.opnorm_iters", "50", "power-iteration steps for ||K||"});
  s.push_back({"solver.log_every", "10", "objective logging stride"});
  s.push_back({"newton.tol", "1e-10", "kernel Newton residual tolerance"});
  s.push_back({"newton.max_iter", "20", "kernel Newton iteration cap"});
  s.push_back({"exponent.input", "", "CSV with a fixed exponent map; empty = build one"});
}

std::vector<KeySpec> make_phantom_schema() {
  std::vector<KeySpec> s;
  add_common(s);
  add_grid(s);
  add_noise_keys(s, "0");
  return s;
}

std::vector<KeySpec> make_exponent_schema() {
  std::vector<KeySpec> s;
  add_common(s);
  add_grid(s);
  add_input(s);
  add_noise_keys(s, "0.1");
  add_recipe(s);
  return s;
}

std::vector<KeySpec> make_denoise_schema() {
  std::vector<KeySpec> s;
  add_common(s);
  add_grid(s);
  add_input(s);
  add_noise_keys(s, "0.1");
  add_recipe(s);
  add_solver(s);
  return s;
}

std::vector<KeySpec> make_tomo_schema() {
  std::vector<KeySpec> s;
  add_common(s);
  add_grid(s);
  add_noise_keys(s, "0.02");
  add_recipe(s);
  add_solver(s);
  s.push_back({"geometry.angles", "180", "number of source positions on the full circle"});
  s.push_back({"geometry.detectors", "192", "detector cells"});
  s.push_back({"geometry.source_radius", "0", "source circle radius; 0 = twice the circumradius"});
  s.push_back({"geometry.detector_radius", "0", "detector distance; 0 = source_radius"});
  s.push_back({"geometry.extent", "0", "detector length; 0 = cover the image disk with margin"});
  s.push_back({"fbp.filter", "hann", "ramp filter window: ram_lak | hann"});
  s.push_back({"fbp.cutoff", "1.0", "filter cutoff as a fraction of detector Nyquist"});
  s.push_back({"exponent.mode", "bootstrap",
               "tvp exponent source: bootstrap (FBP of the data) | bimodal (second channel)"});
  s.push_back({"bimodal.noise_level", "0.002", "noise level of the secondary channel"});
  return s;
}

std::vector<KeySpec> make_bench_schema() {
  std::vector<KeySpec> s;
  add_common(s);
  s.push_back({"bench.points", "1000000", "evaluation points per kernel timing"});
  s.push_back({"bench.tau", "1.0", "prox parameter used in the timings"});
  s.push_back({"bench.newton_iters", "10", "forced Newton steps per prox evaluation"});
  return s;
}

fs::path prepare_output_dir(const ResolvedConfig& cfg) {
  const fs::path dir(cfg.get_string("output_dir"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  cfg.write((dir / "resolved.cfg").string());
  return dir;
}

void apply_threads(const ResolvedConfig& cfg) {
  const std::int64_t t = cfg.get_int("threads");
  if (t < 0) throw ConfigError("threads must be >= 0");
  set_max_threads(static_cast<int>(t));
}

int image_bits(const ResolvedConfig& cfg) {
  return cfg.get_choice("image.bits", {"8", "16"}) == "8" ? 8 : 16;
}

void write_field(const fs::path& dir, const std::string& name, const ScalarField& f, int bits) {
  ImageWriteOptions opts;
  opts.bit_depth = bits;
  write_image(f, (dir / (name + ".png")).string(), opts);
  write_csv(f, (dir / (name + ".csv")).string());
}

void write_metrics(const fs::path& dir,
                   const std::vector<std::pair<std::string, double>>& rows) {
  const fs::path path = dir / "metrics.csv";
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot write " + path.string());
  std::fprintf(fp, "name,value\n");
  for (const auto& [name, value] : rows) {
    std::fprintf(fp, "%s,%.17g\n", name.c_str(), value);
    std::printf("%s = %.17g\n", name.c_str(), value);
  }
  std::fclose(fp);
}

GridSpec phantom_spec(const ResolvedConfig& cfg) {
  return GridSpec(cfg.get_int("grid.rows"), cfg.get_int("grid.cols"), -10.0, 10.0, -10.0, 10.0);
}

struct SourceImage {
  ScalarField clean;
  bool synthesized;
};

SourceImage load_or_synthesize(const ResolvedConfig& cfg) {
  const std::string input = cfg.get_string("input");
  if (input.empty()) return {square_phantom(phantom_spec(cfg)), true};
  if (input.size() > 4 && input.substr(input.size() - 4) == ".csv")
    return {read_csv(input), false};
  ImageReadOptions opts;
  opts.color_to_luma = cfg.get_bool("image.luma");
  return {read_image(input, opts), false};
}

ExponentRecipe recipe_from(const ResolvedConfig& cfg) {
  ExponentRecipe r;
  r.sigma1_cells = cfg.get_double("recipe.sigma1");
  r.sigma2_cells = cfg.get_double("recipe.sigma2");
  if (cfg.get_string("recipe.clip_scale") != "auto")
    r.clip_scale = cfg.get_double("recipe.clip_scale");
  r.auto_percentile = cfg.get_double("recipe.percentile");
  r.truncation = cfg.get_double("recipe.truncation");
  r.delta_snap = cfg.get_double("recipe.delta_snap");
  r.validate();
  return r;
}

SolverConfig solver_from(const ResolvedConfig& cfg) {
  SolverConfig c;
  c.lambda = cfg.get_double("lambda");
  c.lambda1 = cfg.get_double("lambda1");
  c.lambda2 = cfg.get_double("lambda2");
  c.iterations = static_cast<int>(cfg.get_int("solver.iterations"));
  c.theta = cfg.get_double("solver.theta");
  c.step_scale = cfg.get_double("solver.step_scale");
  c.opnorm_iters = static_cast<int>(cfg.get_int("solver.opnorm_iters"));
  c.log_every = static_cast<int>(cfg.get_int("solver.log_every"));
  c.newton.tol = cfg.get_double("newton.tol");
  c.newton.max_iter = static_cast<int>(cfg.get_int("newton.max_iter"));
  c.validate();
  return c;
}

FbpConfig fbp_from(const ResolvedConfig& cfg) {
  FbpConfig f;
  f.filter = cfg.get_choice("fbp.filter", {"ram_lak", "hann"}) == "hann" ? FbpConfig::Filter::hann
                                                                         : FbpConfig::Filter::ram_lak;
  f.cutoff = cfg.get_double("fbp.cutoff");
  f.validate();
  return f;
}

std::optional<ExponentMap> fixed_exponent(const ResolvedConfig& cfg, const GridSpec& spec,
                                          double delta_snap) {
  const std::string path = cfg.get_string("exponent.input");
  if (path.empty()) return std::nullopt;
  ScalarField p = read_csv(path, spec);
  return ExponentMap(p, delta_snap);
}

// Runs the configured solver and writes the image, the convergence log
// and (for tgv2) the slope field. Returns the reconstruction.
ScalarField run_solver(ProblemSpec prob, const fs::path& dir, const std::string& out_name,
                       int bits) {
  if (prob.regularizer == Regularizer::tgv2) {
    Tgv2Result res = solve_tgv2(prob);
    write_field(dir, out_name, res.image, bits);
    write_csv(res.slope.x(), (dir / "slope_x.csv").string());
    write_csv(res.slope.y(), (dir / "slope_y.csv").string());
    res.log.write_csv((dir / "convergence.csv").string());
    return std::move(res.image);
  }
  SolveResult res = solve(prob);
  write_field(dir, out_name, res.image, bits);
  res.log.write_csv((dir / "convergence.csv").string());
  return std::move(res.image);
}

int cmd_phantom(const ResolvedConfig& cfg) {
  apply_threads(cfg);
  const fs::path dir = prepare_output_dir(cfg);
  const int bits = image_bits(cfg);
  const ScalarField ph = square_phantom(phantom_spec(cfg));
  write_field(dir, "phantom", ph, bits);
  std::vector<std::pair<std::string, double>> rows = {
      {"min", ph.minimum()}, {"max", ph.maximum()}};
  const double level = cfg.get_double("noise.level");
  if (level > 0.0) {
    const NoiseResult n = add_noise(ph, {level, static_cast<std::uint64_t>(cfg.get_int("seed"))});
    write_field(dir, "noisy", n.field, bits);
    rows.emplace_back("psnr_noisy", psnr(n.field, ph));
  }
  write_metrics(dir, rows);
  return 0;
}

int cmd_exponent(const ResolvedConfig& cfg) {
  apply_threads(cfg);
  const fs::path dir = prepare_output_dir(cfg);
  const int bits = image_bits(cfg);
  const SourceImage src = load_or_synthesize(cfg);
  const double level = cfg.get_double("noise.level");
  const NoiseResult noisy =
      add_noise(src.clean, {level, static_cast<std::uint64_t>(cfg.get_int("seed"))});
  if (src.synthesized) write_field(dir, "clean", src.clean, bits);
  write_field(dir, "source", noisy.field, bits);

  const ExponentStages stages = build_exponent_stages(noisy.field, recipe_from(cfg));
  write_csv(stages.smoothed_laplacian, (dir / "smoothed_laplacian.csv").string());
  write_csv(stages.edge_strength, (dir / "edge_strength.csv").string());
  write_csv(stages.clipped, (dir / "clipped.csv").string());
  const ScalarField p = stages.exponent.to_field();
  write_field(dir, "exponent", p, bits);

  std::int64_t at_one = 0, at_two = 0;
  for (std::int64_t k = 0; k < p.size(); ++k) {
    if (p[k] == 1.0) ++at_one;
    if (p[k] == 2.0) ++at_two;
  }
  const double n = static_cast<double>(p.size());
  write_metrics(dir, {{"clip_scale_used", stages.clip_scale_used},
                      {"p_min", p.minimum()},
                      {"p_max", p.maximum()},
                      {"fraction_p_eq_1", static_cast<double>(at_one) / n},
                      {"fraction_p_eq_2", static_cast<double>(at_two) / n}});
  return 0;
}

int cmd_denoise(const ResolvedConfig& cfg) {
  apply_threads(cfg);
  const fs::path dir = prepare_output_dir(cfg);
  const int bits = image_bits(cfg);
  const SourceImage src = load_or_synthesize(cfg);
  const NoiseResult noisy = add_noise(
      src.clean, {cfg.get_double("noise.level"), static_cast<std::uint64_t>(cfg.get_int("seed"))});
  if (src.synthesized) write_field(dir, "clean", src.clean, bits);
  write_field(dir, "noisy", noisy.field, bits);

  ProblemSpec prob;
  prob.regularizer = parse_regularizer(
      cfg.get_choice("regularizer", {"tv", "tvp", "tgv2", "tikhonov"}));
  prob.image_spec = src.clean.spec();
  prob.image_data = noisy.field;
  prob.config = solver_from(cfg);

  double clip_scale_used = 0.0;
  if (prob.regularizer == Regularizer::tvp) {
    const ExponentRecipe recipe = recipe_from(cfg);
    if (auto fixed = fixed_exponent(cfg, prob.image_spec, recipe.delta_snap)) {
      prob.exponent = std::move(*fixed);
    } else {
      ExponentStages stages = build_exponent_stages(noisy.field, recipe);
      clip_scale_used = stages.clip_scale_used;
      prob.exponent = std::move(stages.exponent);
    }
    write_field(dir, "exponent", prob.exponent->to_field(), bits);
  }

  const ScalarField out = run_solver(std::move(prob), dir, "denoised", bits);

  std::vector<std::pair<std::string, double>> rows;
  if (src.clean.maximum() > src.clean.minimum()) {
    rows.emplace_back("psnr_noisy", psnr(noisy.field, src.clean));
    rows.emplace_back("psnr_denoised", psnr(out, src.clean));
  }
  if (clip_scale_used > 0.0) rows.emplace_back("clip_scale_used", clip_scale_used);
  write_metrics(dir, rows);
  return 0;
}

int cmd_tomo(const ResolvedConfig& cfg) {
  apply_threads(cfg);
  const fs::path dir = prepare_output_dir(cfg);
  const int bits = image_bits(cfg);
  const GridSpec spec = phantom_spec(cfg);
  const ScalarField ph = square_phantom(spec);
  write_field(dir, "phantom", ph, bits);

  FanBeamGeometry geom;
  geom.num_angles = static_cast<int>(cfg.get_int("geometry.angles"));
  geom.num_detectors = static_cast<int>(cfg.get_int("geometry.detectors"));
  const double r = spec.circumradius();
  const double rs = cfg.get_double("geometry.source_radius");
  geom.source_radius = rs > 0.0 ? rs : 2.0 * r;
  const double rd = cfg.get_double("geometry.detector_radius");
  geom.detector_radius = rd > 0.0 ? rd : geom.source_radius;
  const double ext = cfg.get_double("geometry.extent");
  geom.detector_extent =
      ext > 0.0 ? ext
                : 2.0 * 1.05 * (geom.source_radius + geom.detector_radius) * r /
                      std::sqrt(geom.source_radius * geom.source_radius - r * r);
  geom.validate(spec);

  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const Sinogram sino = forward(ph, geom);
  const SinogramNoiseResult noisy = add_noise(sino, {cfg.get_double("noise.level"), seed});
  write_field(dir, "sinogram", noisy.sinogram.as_field(), bits);

  const FbpConfig fbp_cfg = fbp_from(cfg);
  const ScalarField fbp_img = fbp(noisy.sinogram, fbp_cfg, spec);
  write_field(dir, "fbp", fbp_img, bits);

  ProblemSpec prob;
  prob.regularizer = parse_regularizer(
      cfg.get_choice("regularizer", {"tv", "tvp", "tgv2", "tikhonov"}));
  prob.image_spec = spec;
  prob.sino_data = noisy.sinogram;
  prob.init_fbp = fbp_cfg;
  prob.config = solver_from(cfg);

  if (prob.regularizer == Regularizer::tvp) {
    const ExponentRecipe recipe = recipe_from(cfg);
    if (auto fixed = fixed_exponent(cfg, spec, recipe.delta_snap)) {
      prob.exponent = std::move(*fixed);
    } else if (cfg.get_choice("exponent.mode", {"bootstrap", "bimodal"}) == "bimodal") {
      // Secondary low-noise channel of the same object, own noise stream.
      const SinogramNoiseResult secondary =
          add_noise(sino, {cfg.get_double("bimodal.noise_level"), seed + 1});
      prob.exponent = bimodal_exponent(secondary.sinogram, fbp_cfg, spec, recipe);
    } else {
      prob.exponent = bootstrap_exponent(noisy.sinogram, fbp_cfg, spec, recipe);
    }
    write_field(dir, "exponent", prob.exponent->to_field(), bits);
  }

  const ScalarField out = run_solver(std::move(prob), dir, "recon", bits);
  write_metrics(dir, {{"psnr_fbp", psnr(fbp_img, ph)}, {"psnr_recon", psnr(out, ph)}});
  return 0;
}

int cmd_bench(const ResolvedConfig& cfg) {
  apply_threads(cfg);
  const fs::path dir = prepare_output_dir(cfg);
  const std::int64_t n = cfg.get_int("bench.points");
  if (n <= 0) throw ConfigError("bench.points must be positive");
  const double tau = cfg.get_double("bench.tau");
  const int iters = static_cast<int>(cfg.get_int("bench.newton_iters"));
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.get_int("seed")));
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<double> z(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    z[static_cast<std::size_t>(k)] = 10.0 * uniform() + 1e-12;
    p[static_cast<std::size_t>(k)] = 1.05 + 0.9 * uniform();
  }

  using clock = std::chrono::steady_clock;
  double sink = 0.0;

  auto t0 = clock::now();
  for (std::int64_t k = 0; k < n; ++k)
    sink += newton_alpha_fixed_iters(z[static_cast<std::size_t>(k)],
                                     p[static_cast<std::size_t>(k)], tau, iters);
  const double prox_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  for (std::int64_t k = 0; k < n; ++k)
    sink += conj_integrand(z[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)]);
  const double conj_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  // Production path through the field prox, serial vs. chunked.
  const std::int64_t side = std::max<std::int64_t>(
      8, static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n)))));
  const GridSpec spec = GridSpec::unit_cells(side, side);
  ScalarField zf(spec), pf(spec);
  for (std::int64_t k = 0; k < spec.size(); ++k) {
    zf[k] = 10.0 * uniform() + 1e-12;
    pf[k] = 1.05 + 0.9 * uniform();
  }
  const ExponentMap pmap(pf, 0.0);
  const int threads = max_threads();

  set_max_threads(1);
  t0 = clock::now();
  const ScalarField serial = prox_modular(zf, pmap, tau);
  const double field_serial_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  set_max_threads(threads);
  t0 = clock::now();
  const ScalarField parallel = prox_modular(zf, pmap, tau);
  const double field_parallel_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  for (std::int64_t k = 0; k < spec.size(); ++k) sink += parallel[k] - serial[k];

  write_metrics(dir, {{"points", static_cast<double>(n)},
                      {"prox_newton_seconds", prox_seconds},
                      {"conjugate_seconds", conj_seconds},
                      {"field_prox_serial_seconds", field_serial_seconds},
                      {"field_prox_parallel_seconds", field_parallel_seconds},
                      {"threads", static_cast<double>(threads)},
                      {"speedup", field_serial_seconds / field_parallel_seconds},
                      {"checksum", sink}});
  return 0;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"phantom", "exponent", "denoise", "tomo",
                                                 "bench"};
  return names;
}

const std::vector<KeySpec>& schema_for(const std::string& command) {
  static const std::map<std::string, std::vector<KeySpec>> schemas = {
      {"phantom", make_phantom_schema()},
      {"exponent", make_exponent_schema()},
      {"denoise", make_denoise_schema()},
      {"tomo", make_tomo_schema()},
      {"bench", make_bench_schema()}};
  const auto it = schemas.find(command);
  if (it == schemas.end()) throw std::logic_error("unknown command " + command);
  return it->second;
}

int run(const std::string& command, const ResolvedConfig& cfg) {
  if (command == "phantom") return cmd_phantom(cfg);
  if (command == "exponent") return cmd_exponent(cfg);
  if (command == "denoise") return cmd_denoise(cfg);
  if (command == "tomo") return cmd_tomo(cfg);
  if (command == "bench") return cmd_bench(cfg);
  throw std::logic_error("unknown command " + command);
}

}  // namespace varlp::cli
