#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>

#include "spdhg/blockspace.hpp"
#include "spdhg/sampling.hpp"
#include "spdhg/solvers.hpp"

namespace spdhg {

/// Approximate saddle point w# = (x#, y#) with the quantities the distances need.
struct SaddleReference {
  Vector x;
  BlockVector y;
  Vector aty;        // A^* y#
  BlockVector ax;    // A x#
  double g_value = 0.0;
  Vector fconj_values;  // f_i^*(y#_i)
  /// Warm-start state of g at the end of the reference run (inexact proxes only).
  Vector g_state;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
};

/// Fills the cached products and values for (x, y).
SaddleReference make_reference(const SaddleProblem& problem, Vector x, BlockVector y);

/// Relative change ||T(w) - w|| / max(1, ||w||) under one deterministic PDHG step T with
/// sigma = tau = 0.99/||A||.
double fixed_point_residual(const SaddleProblem& problem, std::span<const double> x, const BlockVector& y);

struct ReferenceOptions {
  std::size_t max_iterations = 20000;
  double tolerance = 1e-8;
  std::size_t check_every = 200;
  /// Spend the first half of the budget in an accelerated variant when the problem allows it.
  bool accelerate = true;
};

/// Long deterministic run from zero until the fixed-point residual drops below the tolerance.
SaddleReference compute_reference(const SaddleProblem& problem, const ReferenceOptions& options = {});

/// Writes <stem>.bin (x, then y blocks, then g_state as float64) and <stem>.meta.
void save_reference(const SaddleReference& ref, const std::filesystem::path& stem);
/// Reads a reference and rejects it when its residual on `problem` exceeds `tolerance`.
SaddleReference load_reference(const SaddleProblem& problem, const std::filesystem::path& stem, double tolerance);

/// sum_i f_i^*(y_i) - f_i^*(y#_i) - <A_i x#, y_i - y#_i>
double dist_F(const BlockVector& y, const SaddleReference& ref, const SaddleProblem& problem);
/// sum_i (1/p_i - 1) F_i
double dist_F_p(const BlockVector& y, const SaddleReference& ref, const SaddleProblem& problem,
                std::span<const double> p);
/// g(x) - g(x#) + <A^* y#, x - x#>
double dist_G(std::span<const double> x, const SaddleReference& ref, const SaddleProblem& problem);
/// dist_G + dist_F: the Bregman distance of h(w) = g(x) + f^*(y) at w#.
double bregman_gap(std::span<const double> x, const BlockVector& y, const SaddleReference& ref,
                   const SaddleProblem& problem);

/// 1/2 ||x0 - x#||^2 / tau + 1/2 sum_i ||y0_i - y#_i||^2 / (p_i sigma_i) + F^p(y0).
double theorem1_constant(std::span<const double> x0, const BlockVector& y0, const SaddleReference& ref,
                         const SaddleProblem& problem, double tau, std::span<const double> sigma,
                         std::span<const double> p);

/// Squared distances to w# in plain and variant-specific metrics. Always emits primal_dist_sq and
/// dual_dist_sq; dual_accel adds dual_dist_Y0; linear adds primal_dist_X, dual_dist_Y and lyapunov.
/// gamma_sq is only used by the linear variant.
Metrics metric_distances(std::span<const double> x, const BlockVector& y, const SaddleReference& ref,
                         const SaddleProblem& problem, const StepPlan& plan, double gamma_sq = 0.0);

enum class RateMode { polynomial, linear };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// exp(slope) in linear mode.
  double contraction = 0.0;
  std::size_t points = 0;
  std::size_t dropped = 0;
  std::string warning;
};

/// Least-squares slope of log(value) against log(k) (polynomial) or k (linear) over k in [k_min, k_max].
/// Nonpositive or non-finite values are dropped with a warning; fewer than 10 usable points throws.
RateFit fit_rate(std::span<const double> k, std::span<const double> value, RateMode mode,
                 double k_min = -std::numeric_limits<double>::infinity(),
                 double k_max = std::numeric_limits<double>::infinity());

}  // namespace spdhg
