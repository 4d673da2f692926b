#include "spdhg/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

ConditionProfile::ConditionProfile(double mu_g, Vector mu, Vector norms, double rho)
    : mu_g_(mu_g), mu_(std::move(mu)), norms_(std::move(norms)), rho_(rho) {
  if (mu_.empty() || mu_.size() != norms_.size()) throw StructureError("profile needs one mu_i and one norm per block");
  if (!(mu_g_ > 0.0) || !std::isfinite(mu_g_)) throw DomainError("mu_g must be positive");
  if (!(rho_ > 0.0 && rho_ < 1.0) && rho_ != 1.0) throw DomainError("rho must lie in (0, 1]");
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    if (!(mu_[i] > 0.0) || !std::isfinite(mu_[i])) throw DomainError("mu_i must be positive");
    if (!(norms_[i] > 0.0) || !std::isfinite(norms_[i])) {
      throw DomainError("block " + std::to_string(i) + " has zero condition number");
    }
    kappa_.push_back(norms_[i] * norms_[i] / (mu_g_ * mu_[i]));
    kappa_tilde_.push_back(1.0 + kappa_.back() / (rho_ * rho_));
  }
}

ConditionProfile ConditionProfile::from_kappa(const Vector& kappa, double rho) {
  Vector norms;
  for (double k : kappa) norms.push_back(std::sqrt(k));
  return ConditionProfile(1.0, Vector(kappa.size(), 1.0), norms, rho);
}

ConditionProfile ConditionProfile::from_problem(const SaddleProblem& problem, double rho) {
  Vector norms;
  for (std::size_t i = 0; i < problem.n(); ++i) norms.push_back(op_norm(problem.A.row(i), 1e-10, 20000).safe(1e-10));
  return ConditionProfile(problem.mu_g(), problem.mus(), norms, rho);
}

namespace {

StepPlan linear_plan(Vector p, double theta, double tau, Vector sigma) {
  StepPlan plan;
  plan.variant = Variant::linear;
  plan.theta = theta;
  plan.tau = tau;
  plan.sigma = std::move(sigma);
  plan.sampling = Sampling::serial(std::move(p));
  return plan;
}

void require_nondegenerate(const ConditionProfile& profile) {
  for (double k : profile.kappa()) {
    if (!(k > 0.0)) throw DomainError("degenerate profile: kappa_i = 0");
  }
}

}  // namespace

StepPlan plan_uniform(const ConditionProfile& profile) {
  require_nondegenerate(profile);
  const auto n = static_cast<double>(profile.n());
  double m = 0.0;
  for (double kt : profile.kappa_tilde()) m = std::max(m, std::sqrt(kt));
  if (!(m > 1.0)) throw DomainError("degenerate profile: max sqrt(kappa_tilde) = 1");
  Vector sigma;
  for (double mu : profile.mu()) sigma.push_back(1.0 / (mu * (m - 1.0)));
  const double tau = 1.0 / (profile.mu_g() * (n - 2.0 + n * m));
  const double theta = 1.0 - 2.0 / (n + n * m);
  return linear_plan(Vector(profile.n(), 1.0 / n), theta, tau, std::move(sigma));
}

StepPlan plan_importance(const ConditionProfile& profile) {
  require_nondegenerate(profile);
  const std::size_t n = profile.n();
  Vector sk;
  for (double k : profile.kappa()) sk.push_back(std::sqrt(k));
  const double total = std::accumulate(sk.begin(), sk.end(), 0.0);
  double nu = kInf;
  for (std::size_t i = 0; i < n; ++i) nu = std::min(nu, sk[i] / (1.0 + std::sqrt(profile.kappa_tilde()[i])));
  Vector p, sigma;
  for (std::size_t i = 0; i < n; ++i) {
    p.push_back(sk[i] / total);
    const double denom = sk[i] - 2.0 * nu;
    if (!(denom > 0.0)) throw DomainError("degenerate profile: importance step size for block " + std::to_string(i) + " is not positive");
    sigma.push_back(nu / (profile.mu()[i] * denom));
  }
  const double tau = nu / (profile.mu_g() * (total - 2.0 * nu));
  const double theta = 1.0 - 2.0 * nu / total;
  return linear_plan(std::move(p), theta, tau, std::move(sigma));
}

StepPlan plan_optimal(const ConditionProfile& profile) {
  require_nondegenerate(profile);
  const std::size_t n = profile.n();
  Vector skt;
  for (double kt : profile.kappa_tilde()) {
    if (!(kt > 1.0)) throw DomainError("degenerate profile: kappa_tilde_i = 1");
    skt.push_back(std::sqrt(kt));
  }
  const double total = std::accumulate(skt.begin(), skt.end(), 0.0);
  const double denom = static_cast<double>(n) + total;
  Vector p, sigma;
  for (std::size_t i = 0; i < n; ++i) {
    p.push_back((1.0 + skt[i]) / denom);
    sigma.push_back(1.0 / (profile.mu()[i] * (skt[i] - 1.0)));
  }
  // Remove the rounding residue so the probabilities sum to one.
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  const double tau = 1.0 / (profile.mu_g() * (static_cast<double>(n) - 2.0 + total));
  const double theta = 1.0 - 2.0 / denom;
  return linear_plan(std::move(p), theta, tau, std::move(sigma));
}

double rate_zhang_xiao(const ConditionProfile& profile) {
  const auto& mu = profile.mu();
  if (std::any_of(mu.begin(), mu.end(), [&](double m) { return std::fabs(m - mu.front()) > 1e-14 * mu.front(); })) {
    throw DomainError("comparison rate assumes equal mu_i");
  }
  double r = 0.0;
  for (double v : profile.norms()) r = std::max(r, v);
  const auto n = static_cast<double>(profile.n());
  return 1.0 - 1.0 / (n + n * r / std::sqrt(profile.mu_g() * mu.front()));
}

PlanReport verify_plan(const StepPlan& plan, const ConditionProfile& profile, double tol) {
  if (plan.sampling.kind() == SamplingKind::arbitrary) throw UnsupportedSamplingError("verify_plan needs a serial plan");
  const std::size_t n = profile.n();
  if (plan.sigma.size() != n || plan.sampling.n() != n) throw StructureError("plan and profile block counts differ");
  PlanReport report;
  const auto add = [&](std::string name, double lhs, double rhs) {
    const bool holds = lhs >= rhs - tol * std::max(1.0, std::fabs(rhs));
    report.checks.push_back({std::move(name), lhs, rhs, holds});
    report.passed = report.passed && holds;
  };
  const double theta = plan.theta;
  add("theta >= 1/(1+2 mu_g tau)", theta, 1.0 / (1.0 + 2.0 * profile.mu_g() * plan.tau));
  for (std::size_t i = 0; i < n; ++i) {
    const double ms = profile.mu()[i] * plan.sigma[i];
    const double p = plan.sampling.p(i);
    add("theta >= (1+2(1-p_i) mu_i sigma_i)/(1+2 mu_i sigma_i), i=" + std::to_string(i), theta,
        (1.0 + 2.0 * (1.0 - p) * ms) / (1.0 + 2.0 * ms));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double v = plan.sigma[i] * plan.tau * profile.norms()[i] * profile.norms()[i];
    const double r2 = profile.rho() * profile.rho();
    // stored as rhs >= lhs so the same comparison applies
    add("rho^2 p_i >= theta sigma_i tau ||A_i||^2, i=" + std::to_string(i), r2 * plan.sampling.p(i), theta * v);
  }
  return report;
}

std::string PlanReport::describe() const {
  std::ostringstream os;
  os.precision(12);
  for (const auto& c : checks) {
    os << (c.holds ? "ok    " : "FAIL  ") << c.name << ": " << c.lhs << " vs " << c.rhs << " (margin "
       << c.lhs - c.rhs << ")\n";
  }
  return os.str();
}

}  // namespace spdhg
