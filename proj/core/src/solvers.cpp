#include "spdhg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

namespace {

constexpr std::uint64_t kSolverStream = 0x736f6c766572ULL;

const LinearOp& raw(const LinearOp& op) {
  if (auto c = dynamic_cast<const CountingOp*>(&op)) return raw(*c->inner());
  return op;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

Vector SaddleProblem::mus() const {
  Vector m(n());
  for (std::size_t i = 0; i < n(); ++i) m[i] = mu(i);
  return m;
}

void SaddleProblem::validate() const {
  if (A.num_blocks() == 0) throw StructureError("problem has no blocks");
  if (f_conj.size() != n()) throw StructureError("f_conj count does not match block count");
  if (!f.empty() && f.size() != n()) throw StructureError("f count does not match block count");
  if (!g) throw StructureError("problem has no g");
  const auto check = [](const ProxPtr& h, const Shape& s, const char* what) {
    if (!h) throw StructureError(std::string("null ") + what);
    if (h->dimension() != 0 && h->dimension() != s.size()) {
      throw StructureError(std::string(what) + " length does not match operator shape " + s.to_string());
    }
  };
  check(g, A.in_shape(), "g");
  for (std::size_t i = 0; i < n(); ++i) {
    check(f_conj[i], A.row(i).out_shape(), "f_conj");
    if (!f.empty()) check(f[i], A.row(i).out_shape(), "f");
  }
}

double SaddleProblem::objective(std::span<const double> x) const {
  if (f.size() != n()) throw ConfigError("objective needs the primal f_i");
  double s = g->value(x);
  for (std::size_t i = 0; i < n() && std::isfinite(s); ++i) s += f[i]->value(raw(A.row(i)).apply(x));
  return s;
}

SaddleProblem SaddleProblem::instrumented() const {
  SaddleProblem p = *this;
  p.A = instrument(A);
  return p;
}

void SaddleProblem::reset_state() const {
  g->reset_state();
  for (const auto& h : f_conj) h->reset_state();
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::primal_accel: return "primal_accel";
    case Variant::dual_accel: return "dual_accel";
    case Variant::linear: return "linear";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "plain") return Variant::plain;
  if (text == "primal_accel" || text == "pa") return Variant::primal_accel;
  if (text == "dual_accel" || text == "da") return Variant::dual_accel;
  if (text == "linear") return Variant::linear;
  throw ConfigError("unknown variant '" + text + "' (plain, primal_accel, dual_accel, linear)");
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kNormTol = 1e-10;

double block_norm(const BlockOperator& A, std::size_t i) { return op_norm(A.row(i), kNormTol, 20000).safe(kNormTol); }

}  // namespace

StepSizes initial_step_sizes_general(const BlockOperator& A, const Sampling& sampling, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (A.num_blocks() != sampling.n()) throw StructureError("sampling and operator block counts differ");
  StepSizes out;
  switch (sampling.kind()) {
    case SamplingKind::full: {
      const double norm = op_norm(A, kNormTol, 20000).safe(kNormTol);
      out.tau = gamma / norm;
      out.sigma.assign(A.num_blocks(), gamma / norm);
      break;
    }
    case SamplingKind::serial: {
      double max_norm = 0.0;
      double min_p = 1.0;
      for (std::size_t i = 0; i < A.num_blocks(); ++i) {
        const double ni = block_norm(A, i);
        out.sigma.push_back(gamma / ni);
        max_norm = std::max(max_norm, ni);
        min_p = std::min(min_p, sampling.p(i));
      }
      out.tau = gamma * min_p / max_norm;
      break;
    }
    case SamplingKind::arbitrary:
      throw UnsupportedSamplingError("no step-size recipe for arbitrary samplings");
  }
  return out;
}

double dual_accel_sigma(double sigma_tilde, double mu_i, double p_i) {
  return sigma_tilde / (mu_i * (p_i - 2.0 * (1.0 - p_i) * sigma_tilde));
}

std::pair<double, double> dual_accel_initial_steps(const BlockOperator& A, const Sampling& sampling,
                                                   std::span<const double> mu) {
  if (mu.size() != A.num_blocks() || sampling.n() != A.num_blocks()) throw StructureError("block counts disagree");
  for (double m : mu) {
    if (!(m > 0.0)) throw ConfigError("dual acceleration needs every f_i^* strongly convex");
  }
  if (sampling.kind() == SamplingKind::full) {
    std::vector<LinearOpPtr> rows;
    for (std::size_t i = 0; i < A.num_blocks(); ++i) rows.push_back(std::make_shared<ScaledOp>(A.row_ptr(i), 1.0 / std::sqrt(mu[i])));
    const double tau = 1.0 / op_norm(A, kNormTol, 20000).safe(kNormTol);
    const double scaled = op_norm(BlockOperator(rows), kNormTol, 20000).safe(kNormTol);
    return {tau, 1.0 / (tau * scaled * scaled)};
  }
  if (sampling.kind() != SamplingKind::serial) throw UnsupportedSamplingError("no step-size recipe for arbitrary samplings");
  Vector norms;
  double max_norm = 0.0, min_p = 1.0;
  for (std::size_t i = 0; i < A.num_blocks(); ++i) {
    norms.push_back(block_norm(A, i));
    max_norm = std::max(max_norm, norms.back());
    min_p = std::min(min_p, sampling.p(i));
  }
  const double tau = min_p / max_norm;
  double st = kInf;
  for (std::size_t i = 0; i < A.num_blocks(); ++i) {
    const double p = sampling.p(i);
    st = std::min(st, mu[i] * p * p / (tau * norms[i] * norms[i] + 2.0 * mu[i] * p * (1.0 - p)));
  }
  return {tau, st};
}

EsoParams plan_eso(const SaddleProblem& problem, const StepPlan& plan) {
  Vector sigma = plan.sigma;
  if (plan.variant == Variant::dual_accel) {
    sigma.resize(problem.n());
    for (std::size_t i = 0; i < problem.n(); ++i) {
      sigma[i] = dual_accel_sigma(plan.sigma_tilde, problem.mu(i), plan.sampling.p(i));
    }
  }
  if (plan.eso_v) return make_eso(*plan.eso_v, plan.sampling);
  return eso_params(plan.sampling, problem.A, plan.tau, sigma);
}

void validate_plan(const SaddleProblem& problem, const StepPlan& plan) {
  problem.validate();
  const std::size_t n = problem.n();
  const Sampling& s = plan.sampling;
  if (s.n() != n) throw ConfigError("sampling has " + std::to_string(s.n()) + " blocks, problem has " + std::to_string(n));
  if (!(plan.tau > 0.0) || !std::isfinite(plan.tau)) throw ConfigError("tau must be positive");
  if (plan.variant != Variant::dual_accel) {
    if (plan.sigma.size() != n) throw ConfigError("need one sigma per block");
    for (double v : plan.sigma) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("sigma_i must be positive");
    }
  }
  // Computed after the variant checks so an out-of-range sigma~ is reported as such.
  const auto check_eso = [&](bool strict, double scale) {
    const auto eso = plan_eso(problem, plan);
    for (std::size_t i = 0; i < n; ++i) {
      const double bound = s.p(i) * scale;
      const bool ok = strict ? eso.v[i] < bound : eso.v[i] <= bound * (1.0 + 1e-12);
      if (!ok) {
        throw ConfigError("ESO condition fails for block " + std::to_string(i) + ": v_i = " + fmt(eso.v[i]) +
                          (strict ? " not < " : " not <= ") + fmt(bound));
      }
    }
  };
  switch (plan.variant) {
    case Variant::plain:
      if (plan.theta != 1.0) throw ConfigError("plain variant uses theta = 1");
      check_eso(true, 1.0);
      break;
    case Variant::primal_accel:
      if (!(problem.mu_g() > 0.0)) throw ConfigError("primal acceleration needs a strongly convex g (mu_g > 0)");
      check_eso(false, 1.0);
      break;
    case Variant::dual_accel: {
      for (std::size_t i = 0; i < n; ++i) {
        if (!(problem.mu(i) > 0.0)) throw ConfigError("dual acceleration needs every f_i^* strongly convex");
      }
      if (!(plan.sigma_tilde > 0.0)) throw ConfigError("sigma_tilde must be positive");
      for (std::size_t i = 0; i < n; ++i) {
        const double p = s.p(i);
        if (p < 1.0 && !(plan.sigma_tilde < p / (2.0 * (1.0 - p)))) {
          throw ConfigError("sigma_tilde = " + fmt(plan.sigma_tilde) + " must be below min_i p_i/(2(1-p_i)) = " +
                            fmt(p / (2.0 * (1.0 - p))));
        }
      }
      check_eso(false, 1.0);
      break;
    }
    case Variant::linear: {
      if (!(problem.mu_g() > 0.0)) throw ConfigError("linear variant needs mu_g > 0");
      if (!(plan.theta > 0.0 && plan.theta < 1.0)) throw ConfigError("linear variant needs theta in (0, 1)");
      const double slack = 1e-12;
      if (plan.theta < (1.0 - slack) / (1.0 + 2.0 * problem.mu_g() * plan.tau)) {
        throw ConfigError("theta below 1/(1 + 2 mu_g tau)");
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double m = problem.mu(i);
        if (!(m > 0.0)) throw ConfigError("linear variant needs every f_i^* strongly convex");
        const double sig = plan.sigma[i];
        const double lb = (1.0 + 2.0 * (1.0 - s.p(i)) * m * sig) / (1.0 + 2.0 * m * sig);
        if (plan.theta < lb * (1.0 - slack)) throw ConfigError("theta below the dual bound for block " + std::to_string(i));
      }
      check_eso(true, 1.0 / plan.theta);
      break;
    }
  }
}

// ---------------------------------------------------------------------------

Vector SolverState::ergodic_x() const {
  if (!track_ergodic || ergodic_count == 0) throw ConfigError("no ergodic average recorded");
  Vector out = x_sum;
  for (double& v : out) v /= static_cast<double>(ergodic_count);
  return out;
}

BlockVector SolverState::ergodic_y() const {
  if (!track_ergodic || ergodic_count == 0) throw ConfigError("no ergodic average recorded");
  BlockVector out = y_sum;
  for (std::size_t i = 0; i < out.num_blocks(); ++i) {
    axpy_inplace(static_cast<double>(ergodic_count - y_synced[i]), y.block(i), out.block(i));
    for (double& v : out.block(i)) v /= static_cast<double>(ergodic_count);
  }
  return out;
}

SolverState make_state(const SaddleProblem& problem, const StepPlan& plan, Vector x0, BlockVector y0,
                       std::uint64_t seed, bool track_ergodic) {
  problem.validate();
  if (x0.size() != problem.A.in_shape().size()) throw StructureError("x0 has the wrong length");
  if (y0.shapes() != problem.A.out_shapes()) throw StructureError("y0 does not match the operator blocks");
  SolverState st;
  st.aty = Vector(x0.size(), 0.0);
  Vector tmp(x0.size());
  for (std::size_t i = 0; i < problem.n(); ++i) {
    raw(problem.A.row(i)).adjoint(y0.block(i), tmp);
    axpy_inplace(1.0, tmp, st.aty);
  }
  st.aty_bar = st.aty;
  st.x = std::move(x0);
  st.y_bar = y0;
  st.y = std::move(y0);
  st.tau = plan.tau;
  st.sigma = plan.sigma;
  st.sigma.resize(problem.n(), 0.0);
  st.theta = plan.theta;
  st.sigma_tilde = plan.sigma_tilde;
  if (plan.variant == Variant::dual_accel) {
    for (std::size_t i = 0; i < problem.n(); ++i) {
      st.sigma[i] = dual_accel_sigma(plan.sigma_tilde, problem.mu(i), plan.sampling.p(i));
    }
  }
  st.rng = Rng(seed, kSolverStream);
  st.track_ergodic = track_ergodic;
  if (track_ergodic) {
    st.x_sum.assign(st.x.size(), 0.0);
    st.y_sum = st.y.zeros_like();
    st.y_synced.assign(problem.n(), 0);
  }
  return st;
}

namespace {

struct DualUpdate {
  std::size_t block;
  Vector delta;
};

void cache_update(const BlockOperator& A, std::span<double> aty, std::span<double> aty_bar,
                  const std::vector<DualUpdate>& updates, double theta, std::span<const double> p) {
  Vector u(aty.size());
  Vector extra(aty.size(), 0.0);
  for (const auto& up : updates) {
    A.row(up.block).adjoint(up.delta, u);
    axpy_inplace(1.0, u, aty);
    axpy_inplace(theta / p[up.block], u, extra);
  }
  for (std::size_t j = 0; j < aty.size(); ++j) aty_bar[j] = aty[j] + extra[j];
}

enum class Schedule { fixed, primal, dual };

// One iteration shared by all variants; the schedule decides how steps and theta evolve.
void generic_step(const SaddleProblem& problem, SolverState& st, const StepPlan& plan, Schedule schedule) {
  const std::size_t next_k = st.k + 1;
  const Sampling& s = plan.sampling;

  Vector z(st.x.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = st.x[j] - st.tau * st.aty_bar[j];
  Vector x_new(z.size());
  problem.g->prox(st.tau, z, x_new);
  if (!all_finite(x_new)) throw DivergenceError(next_k, "non-finite primal iterate");

  const auto& S = s.draw(st.rng);
  std::vector<DualUpdate> updates;
  updates.reserve(S.size());
  std::vector<Vector> y_new;
  y_new.reserve(S.size());
  for (auto i : S) {
    double sig = st.sigma[i];
    if (schedule == Schedule::dual) sig = dual_accel_sigma(st.sigma_tilde, problem.mu(i), s.p(i));
    const Vector ax = problem.A.row(i).apply(x_new);
    const auto yi = st.y.block(i);
    Vector w(ax.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = yi[j] + sig * ax[j];
    Vector yn(w.size());
    problem.f_conj[i]->prox(sig, w, yn);
    if (!all_finite(yn)) throw DivergenceError(next_k, "non-finite dual iterate in block " + std::to_string(i));
    if (schedule == Schedule::dual) st.sigma[i] = sig;
    Vector d(w.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = yn[j] - yi[j];
    updates.push_back({i, std::move(d)});
    y_new.push_back(std::move(yn));
  }

  double theta = plan.theta;
  switch (schedule) {
    case Schedule::fixed:
      break;
    case Schedule::primal:
      theta = 1.0 / std::sqrt(1.0 + 2.0 * problem.mu_g() * st.tau);
      st.tau *= theta;
      for (double& v : st.sigma) v /= theta;
      break;
    case Schedule::dual:
      theta = 1.0 / std::sqrt(1.0 + 2.0 * st.sigma_tilde);
      st.tau /= theta;
      st.sigma_tilde *= theta;
      break;
  }
  st.theta = theta;

  cache_update(problem.A, st.aty, st.aty_bar, updates, theta, s.marginals());

  // y_bar equals y outside the blocks touched in this iteration.
  for (auto j : st.last_selected) {
    if (std::find(S.begin(), S.end(), j) == S.end()) st.y_bar.data(j) = st.y.data(j);
  }
  for (std::size_t k = 0; k < S.size(); ++k) {
    const std::size_t i = S[k];
    const double c = theta / s.p(i);
    auto yb = st.y_bar.block(i);
    for (std::size_t j = 0; j < yb.size(); ++j) yb[j] = y_new[k][j] + c * updates[k].delta[j];
    if (st.track_ergodic) {
      axpy_inplace(static_cast<double>(st.k - st.y_synced[i]), st.y.block(i), st.y_sum.block(i));
      st.y_synced[i] = st.k;
    }
    st.y.data(i) = std::move(y_new[k]);
  }
  st.x = std::move(x_new);
  st.last_selected.assign(S.begin(), S.end());
  st.blocks_selected += S.size();
  st.k = next_k;

  if (st.track_ergodic) {
    axpy_inplace(1.0, st.x, st.x_sum);
    ++st.ergodic_count;
  }
}

}  // namespace

void adjoint_cache_update(const BlockOperator& A, std::span<double> aty, std::span<double> aty_bar,
                          const BlockVector& y_new, const BlockVector& y_old, std::span<const std::size_t> S,
                          double theta, std::span<const double> p) {
  if (!y_new.same_structure(y_old) || y_new.num_blocks() != A.num_blocks() || p.size() != A.num_blocks()) {
    throw StructureError("adjoint_cache_update: block structure mismatch");
  }
  std::vector<DualUpdate> updates;
  for (auto i : S) {
    Vector d(y_new.data(i).size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = y_new.data(i)[j] - y_old.data(i)[j];
    updates.push_back({i, std::move(d)});
  }
  cache_update(A, aty, aty_bar, updates, theta, p);
}

void spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan) {
  generic_step(problem, state, plan, Schedule::fixed);
}

void pa_spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan) {
  if (!(problem.mu_g() > 0.0)) throw ConfigError("primal acceleration needs mu_g > 0; use the plain variant");
  generic_step(problem, state, plan, Schedule::primal);
}

void da_spdhg_step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan) {
  for (std::size_t i = 0; i < problem.n(); ++i) {
    if (!(problem.mu(i) > 0.0)) throw ConfigError("dual acceleration needs every f_i^* strongly convex");
  }
  generic_step(problem, state, plan, Schedule::dual);
}

void step(const SaddleProblem& problem, SolverState& state, const StepPlan& plan) {
  switch (plan.variant) {
    case Variant::plain:
    case Variant::linear: spdhg_step(problem, state, plan); break;
    case Variant::primal_accel: pa_spdhg_step(problem, state, plan); break;
    case Variant::dual_accel: da_spdhg_step(problem, state, plan); break;
  }
}

double iterations_per_epoch(const Sampling& s) { return static_cast<double>(s.n()) / s.expected_size(); }

double adjoint_cache_error(const SaddleProblem& problem, const SolverState& state) {
  Vector direct(state.aty.size(), 0.0), tmp(state.aty.size());
  for (std::size_t i = 0; i < problem.n(); ++i) {
    raw(problem.A.row(i)).adjoint(state.y.block(i), tmp);
    axpy_inplace(1.0, tmp, direct);
  }
  return std::sqrt(dist_sq(direct, state.aty)) / (1.0 + std::sqrt(norm_sq(direct)));
}

RunResult run(const SaddleProblem& problem, const StepPlan& plan, SolverState& state, const RunOptions& options) {
  if (options.iterations < 1) throw ConfigError("run needs at least one iteration");
  std::vector<std::size_t> marks = options.checkpoints;
  const double per_epoch = iterations_per_epoch(plan.sampling);
  const std::size_t start = state.k;
  const std::size_t end = start + options.iterations;
  if (marks.empty()) {
    for (double e = 0.0;; e += 1.0) {
      const auto it = static_cast<std::size_t>(std::llround(e * per_epoch));
      if (it > end) break;
      if (it >= start) marks.push_back(it);
    }
    marks.push_back(end);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  RunResult result;
  auto mark = marks.begin();
  const auto fire = [&] {
    while (mark != marks.end() && *mark < state.k) ++mark;
    if (mark != marks.end() && *mark == state.k) {
      if (options.callback) {
        const double epoch = static_cast<double>(state.k) / per_epoch;
        result.trajectory.push_back({state.k, epoch, options.callback(state.k, epoch, state)});
      }
      ++mark;
    }
  };
  fire();
  while (state.k < end) {
    step(problem, state, plan);
    if (options.cache_check_every != 0 && state.k % options.cache_check_every == 0) {
      const double err = adjoint_cache_error(problem, state);
      if (err > 1e-8) throw std::runtime_error("adjoint cache drifted by " + fmt(err) + " at iteration " + std::to_string(state.k));
    }
    fire();
  }
  result.iterations = state.k - start;
  result.epochs = static_cast<double>(state.k) / per_epoch;
  result.blocks_selected = state.blocks_selected;
  return result;
}

}  // namespace spdhg
