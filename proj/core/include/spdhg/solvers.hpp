#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/operators.hpp"
#include "spdhg/prox.hpp"
#include "spdhg/random.hpp"
#include "spdhg/sampling.hpp"

namespace spdhg {

/// min_x sum_i f_i(A_i x) + g(x), solved through max_y min_x sum_i <A_i x, y_i> - f_i^*(y_i) + g(x).
struct SaddleProblem {
  BlockOperator A;
  std::vector<ProxPtr> f_conj;
  ProxPtr g;
  /// Primal f_i, only needed for objective values; may be empty.
  std::vector<ProxPtr> f;

  std::size_t n() const noexcept { return A.num_blocks(); }
  double mu_g() const { return g->mu(); }
  double mu(std::size_t i) const { return f_conj.at(i)->mu(); }
  Vector mus() const;

  /// Throws StructureError if block counts or shapes disagree.
  void validate() const;
  /// sum_i f_i(A_i x) + g(x); needs f.
  double objective(std::span<const double> x) const;
  /// Same problem with every A_i wrapped in a call counter.
  SaddleProblem instrumented() const;
  /// Clears warm-start state held by g and the f_i^*.
  void reset_state() const;

  Vector zero_primal() const { return Vector(A.in_shape().size(), 0.0); }
  BlockVector zero_dual() const { return BlockVector(A.out_shapes()); }
};

enum class Variant { plain, primal_accel, dual_accel, linear };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct StepPlan {
  Variant variant = Variant::plain;
  double tau = 0.0;
  Vector sigma;
  double theta = 1.0;
  double sigma_tilde = 0.0;  // dual_accel only
  Sampling sampling = Sampling::full(1);
  /// ESO parameters for samplings without a closed form.
  std::optional<Vector> eso_v;
};

struct StepSizes {
  double tau = 0.0;
  Vector sigma;
};

/// Full sampling: sigma_i = tau = gamma/||A||. Serial: sigma_i = gamma/||A_i||,
/// tau = gamma min_i p_i / max_i ||A_i|| (gamma/(n max_i ||A_i||) when uniform).
StepSizes initial_step_sizes_general(const BlockOperator& A, const Sampling& sampling, double gamma);

/// tau_0 = min_i p_i / max_i ||A_i|| and the largest sigma~_0 keeping v_i <= p_i.
std::pair<double, double> dual_accel_initial_steps(const BlockOperator& A, const Sampling& sampling,
                                                   std::span<const double> mu);

/// DA step size for block i.
double dual_accel_sigma(double sigma_tilde, double mu_i, double p_i);

/// ESO parameters of the plan's initial step sizes (closed form or user-supplied).
EsoParams plan_eso(const SaddleProblem& problem, const StepPlan& plan);

/// Throws ConfigError when the plan violates the variant's convergence conditions.
void validate_plan(const SaddleProblem& problem, const StepPlan& plan);

struct SolverState {
  Vector x;
  BlockVector y;
  BlockVector y_bar;
  Vector aty;      // A^* y
  Vector aty_bar;  // A^* y_bar
  double tau = 0.0;
  Vector sigma;
  double theta = 1.0;
  double sigma_tilde = 0.0;
  std::size_t k = 0;
  Rng rng;
  std::vector<std::size_t> last_selected;
  std::uint64_t blocks_selected = 0;

  /// Running sums of w^(1..k). Dual blocks are summed lazily: y_sum[i] covers
  /// iterates up to y_synced[i] and y_i has been constant since.
  bool track_ergodic = false;
  Vector x_sum;
  BlockVector y_sum;
  std::vector<std::size_t> y_synced;
  std::size_t ergodic_count = 0;

  Vector ergodic_x() const;
  BlockVector ergodic_y() const;
};

/// Builds the k = 0 state; y_bar = y0 and both caches equal A^* y0.
SolverState make_state(const SaddleProblem& problem, const StepPlan& plan, Vector x0, BlockVector y0,
                       std::uint64_t seed, bool track_ergodic = false);

/// Given A^* y_old in aty, writes A^* y_new into aty and A^* y_bar_new into aty_bar, where
/// y_bar_new = y_new + theta Q (y_new - y_old) and y_new differs from y_old only on S.
void adjoint_cache_update(const BlockOperator& A, std::span<double> aty, std::span<double> aty_bar,
                          const BlockVector& y_new, const BlockVector& y_old, std::span<const std::size_t> S,
                          double theta, std::span<const double> p);

void spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan);
void pa_spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan);
void da_spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan);
/// Dispatches on plan.variant.
void step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan);

using Metrics = std::vector<std::pair<std::string, double>>;
using MetricCallback = std::function<Metrics(std::size_t iteration, double epoch, const SolverState& state)>;

struct TrajectoryPoint {
  std::size_t iteration = 0;
  double epoch = 0.0;
  Metrics metrics;
};

struct RunOptions {
  std::size_t iterations = 1;
  /// Iterations at which the callback fires; empty means every epoch (and at 0 and the end).
  std::vector<std::size_t> checkpoints;
  MetricCallback callback;
  /// Compare the adjoint cache with a direct A^* y every this many iterations (0 = never).
  std::size_t cache_check_every = 0;
};

struct RunResult {
  std::vector<TrajectoryPoint> trajectory;
  std::size_t iterations = 0;
  double epochs = 0.0;
  std::uint64_t blocks_selected = 0;
};

/// Iterations per epoch: n / E|S|.
double iterations_per_epoch(const Sampling& s);

RunResult run(const SaddleProblem& problem, const StepPlan& plan, SolverState& state, const RunOptions& options);

/// Largest deviation of the cache from a direct A^* y, relative to 1 + ||A^* y||.
double adjoint_cache_error(const SaddleProblem& problem, const SolverState& state);

}  // namespace spdhg
