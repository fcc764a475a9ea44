#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "varlp/exponent_map.hpp"
#include "varlp/grid.hpp"
#include "varlp/kernels.hpp"
#include "varlp/tomo.hpp"

namespace varlp {

/// Raised when an iteration degenerates (non-finite iterate, vanishing
/// operator norm).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Regularizer { tv, tvp, tikhonov, tgv2 };
Regularizer parse_regularizer(const std::string& name);
std::string to_string(Regularizer r);

struct SolverConfig {
  double lambda = 0.1;   // tv/tvp/tikhonov weight, >= 0 (0 = pure least squares)
  double lambda1 = 0.1;  // tgv2 first-order weight, > 0
  double lambda2 = 0.2;  // tgv2 second-order weight, > 0
  int iterations = 500;
  double theta = 1.0;       // over-relaxation in [0,1]
  double step_scale = 0.9;  // sigma = tau = step_scale / ||K||
  int opnorm_iters = 50;    // power-iteration steps for ||K||
  std::uint64_t opnorm_seed = 0x5eed;
  int log_every = 10;
  NewtonConfig newton;
  void validate() const;
};

struct ConvergenceLog {
  struct Entry {
    int iteration;
    double objective;
    double primal_step;  // norm of the last primal update at this iteration
    double dual_step;
  };
  std::vector<Entry> entries;
  double operator_norm = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  std::string initialization;
  void write_csv(const std::string& path) const;
};

/// One inverse problem: squared-norm data fidelity plus one of the
/// regularizers, minimized by a fully dualized primal-dual iteration.
/// Exactly one of image_data (identity forward model) or sino_data
/// (fan-beam forward model) must be set.
struct ProblemSpec {
  Regularizer regularizer = Regularizer::tv;
  GridSpec image_spec;
  std::optional<ScalarField> image_data;
  std::optional<Sinogram> sino_data;
  std::optional<ExponentMap> exponent;  // required for tvp
  std::optional<ScalarField> initial;   // default: zero (identity), FBP (fan-beam)
  FbpConfig init_fbp;                   // settings for the default FBP start
  SolverConfig config;
  void validate() const;
};

struct SolveResult {
  ScalarField image;
  ConvergenceLog log;
};

struct Tgv2Result {
  ScalarField image;
  VectorField slope;
  ConvergenceLog log;
};

/// Minimizes ||T f - g||^2 + lambda * modular(gradient(f)) with the
/// exponent map fixed to 1 (tv), 2 (tikhonov) or the given map (tvp).
/// The tv and tikhonov paths run the identical code with a constant
/// map, so tv results are bit-for-bit those of tvp with p == 1.
/// A tgv2 problem is forwarded to solve_tgv2.
SolveResult solve(const ProblemSpec& prob);

/// Second-order variant: minimizes over (f, v)
///   ||T f - g||^2 + lambda1 * sum |gradient(f) - v|
///                 + lambda2 * sum |vector_gradient(v)|  (Frobenius)
Tgv2Result solve_tgv2(const ProblemSpec& prob);

/// Power-iteration estimate of ||K|| from the normal operator K*K,
/// deterministic for a fixed seed. The estimate never exceeds the true
/// norm, so steps derived from it are safe.
double operator_norm(const std::function<ScalarField(const ScalarField&)>& normal_op,
                     const GridSpec& spec, int iters, std::uint64_t seed);

}  // namespace varlp
