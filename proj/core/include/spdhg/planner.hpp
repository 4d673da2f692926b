#pragma once

#include <string>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/solvers.hpp"

namespace spdhg {

/// Strong convexity data of a fully strongly convex problem.
class ConditionProfile {
 public:
  ConditionProfile(double mu_g, Vector mu, Vector norms, double rho = 0.99);
  /// Profile with mu_g = mu_i = 1 and ||A_i|| = sqrt(kappa_i).
  static ConditionProfile from_kappa(const Vector& kappa, double rho = 0.99);
  static ConditionProfile from_problem(const SaddleProblem& problem, double rho = 0.99);

  std::size_t n() const noexcept { return mu_.size(); }
  double mu_g() const noexcept { return mu_g_; }
  const Vector& mu() const noexcept { return mu_; }
  const Vector& norms() const noexcept { return norms_; }
  double rho() const noexcept { return rho_; }
  /// ||A_i||^2 / (mu_g mu_i)
  const Vector& kappa() const noexcept { return kappa_; }
  /// 1 + kappa_i / rho^2
  const Vector& kappa_tilde() const noexcept { return kappa_tilde_; }

 private:
  double mu_g_;
  Vector mu_;
  Vector norms_;
  double rho_;
  Vector kappa_;
  Vector kappa_tilde_;
};

/// Serial uniform sampling, p_i = 1/n.
StepPlan plan_uniform(const ConditionProfile& profile);
/// p_i proportional to sqrt(kappa_i).
StepPlan plan_importance(const ConditionProfile& profile);
/// Probabilities minimising the linear rate.
StepPlan plan_optimal(const ConditionProfile& profile);
/// Comparison rate 1 - 1/(n + n max_j sqrt(kappa_j)); needs equal mu_i.
double rate_zhang_xiao(const ConditionProfile& profile);

struct PlanCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct PlanReport {
  bool passed = true;
  std::vector<PlanCheck> checks;
  std::string describe() const;
};

/// Checks theta >= 1/(1 + 2 mu_g tau), theta >= (1 + 2(1-p_i) mu_i sigma_i)/(1 + 2 mu_i sigma_i)
/// and theta sigma_i tau ||A_i||^2 <= rho^2 p_i for a serial plan.
PlanReport verify_plan(const StepPlan& plan, const ConditionProfile& profile, double tol = 1e-12);

}  // namespace spdhg
