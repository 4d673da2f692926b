#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/config.hpp"
#include "spdhg/sampling.hpp"
#include "spdhg/solvers.hpp"

namespace spdhg {

enum class ExperimentId { pet_tv, tv_denoise, huber_deblur, pet_linear, scalar_toy };
enum class Scale { desk, paper };

std::string to_string(ExperimentId id);
ExperimentId parse_experiment(const std::string& text);
Scale parse_scale(const std::string& text);

struct SamplingSpec {
  std::string kind = "serial";  // full, serial or arbitrary
  Vector probabilities;         // serial; empty means uniform
  std::vector<std::vector<std::size_t>> atoms;
  Vector atom_probabilities;
  Vector eso_v;  // needed for arbitrary samplings
};

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::scalar_toy;
  std::string name;  // output stem; defaults to the experiment id

  // problem
  std::size_t rows = 32;
  std::size_t cols = 32;
  std::size_t blocks = 4;
  std::size_t angles = 20;
  std::size_t bins = 0;  // 0: image width
  double alpha = 0.2;
  double mu = 0.5;
  double eta = 1.0;
  double intensity = 1.0;
  double background = 2.0;
  double background_ratio = 0.0;  // huber_deblur: r = ratio * mean(A_1 x_true) when > 0
  double upper = 100.0;           // huber_deblur box
  double noise = 0.1;             // tv_denoise Gaussian sigma
  std::size_t kernel = 5;
  int fgp_iters = 20;
  std::uint64_t data_seed = 1;

  // scalar toy: f_i(z) = 1/2 (z - b_i)^2 or |z - b_i|, A_i = a_i, g = mu_g/2 x^2
  std::string loss = "quadratic";
  Vector toy_a{1.0, 2.0, 0.5, 1.5};
  Vector toy_b{1.0, -1.0, 0.5, 2.0};
  double toy_mu_g = 1.0;

  SamplingSpec sampling;

  // solver
  Variant variant = Variant::plain;
  std::string planner = "recipe";  // recipe, uniform, importance, optimal, explicit
  double gamma = 0.99;
  double rho = 0.99;
  double tau = 0.0;  // explicit plans
  Vector sigma;
  double theta = 1.0;
  double sigma_tilde = 0.0;
  double epochs = 20.0;
  std::size_t iterations = 0;  // overrides epochs when > 0
  std::string checkpoints = "epoch";  // epoch or log
  std::size_t per_decade = 10;
  std::size_t cache_check_every = 0;

  std::size_t seeds = 20;
  std::uint64_t seed_offset = 0;
  std::size_t threads = 0;  // 0: hardware concurrency

  std::string reference;  // stem; empty: <out>/<name>.ref
  std::size_t reference_iterations = 20000;
  double reference_tolerance = 1e-8;

  std::string out_dir;
  double fit_min = 0.0;  // iteration window for fitted rates; 0 picks a default
  double fit_max = 0.0;

  int eso_trials = 20;
  int eso_probes = 20;
};

/// Defaults for an experiment at the given scale.
ExperimentConfig default_config(ExperimentId id, Scale scale = Scale::desk);
/// Reads `experiment` and the [problem], [toy], [sampling], [solver], [run], [reference]
/// and [output] sections over the defaults. Unknown keys are rejected.
ExperimentConfig experiment_config(const Config& cfg, Scale scale = Scale::desk);

struct Experiment {
  SaddleProblem problem;
  Vector x_true;  // empty for the scalar toy
  /// Known saddle point, when it has a closed form.
  std::optional<std::pair<Vector, BlockVector>> exact_saddle;
  std::string description;
};

Experiment build_pet_tv(const ExperimentConfig& cfg);
Experiment build_tv_denoise(const ExperimentConfig& cfg);
Experiment build_huber_deblur(const ExperimentConfig& cfg);
Experiment build_pet_linear(const ExperimentConfig& cfg);
Experiment build_scalar_toy(const ExperimentConfig& cfg);
Experiment build_experiment(const ExperimentConfig& cfg);

Sampling make_sampling(const SamplingSpec& spec, std::size_t n);
/// Step sizes for the configured variant and planner, checked with validate_plan.
StepPlan make_plan(const ExperimentConfig& cfg, const SaddleProblem& problem);

}  // namespace spdhg
