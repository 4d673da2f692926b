#include "spdhg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

SaddleReference make_reference(const SaddleProblem& problem, Vector x, BlockVector y) {
  problem.validate();
  if (x.size() != problem.A.in_shape().size() || y.shapes() != problem.A.out_shapes()) {
    throw StructureError("reference does not match the problem layout");
  }
  SaddleReference ref;
  ref.aty = problem.A.adjoint(y);
  ref.ax = problem.A.apply(x);
  ref.g_value = problem.g->value(x);
  for (std::size_t i = 0; i < problem.n(); ++i) ref.fconj_values.push_back(problem.f_conj[i]->value(y.block(i)));
  if (problem.f.size() == problem.n()) ref.objective = problem.objective(x);
  ref.x = std::move(x);
  ref.y = std::move(y);
  return ref;
}

namespace {

double residual_with_step(const SaddleProblem& problem, std::span<const double> x, const BlockVector& y,
                          double step) {
  const Vector aty = problem.A.adjoint(y);
  Vector z(x.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = x[j] - step * aty[j];
  const Vector xn = problem.g->prox(step, z);
  Vector xe(x.size());
  for (std::size_t j = 0; j < xe.size(); ++j) xe[j] = 2.0 * xn[j] - x[j];
  double change = dist_sq(xn, x);
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const Vector ax = problem.A.row(i).apply(xe);
    const auto yi = y.block(i);
    Vector w(ax.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = yi[j] + step * ax[j];
    change += dist_sq(problem.f_conj[i]->prox(step, w), yi);
  }
  const double size = std::sqrt(norm_sq(x) + norm_sq(y));
  return std::sqrt(change) / std::max(1.0, size);
}

double pdhg_step_size(const SaddleProblem& problem) { return 0.99 / op_norm(problem.A, 1e-10, 20000).safe(1e-10); }

}  // namespace

double fixed_point_residual(const SaddleProblem& problem, std::span<const double> x, const BlockVector& y) {
  return residual_with_step(problem, x, y, pdhg_step_size(problem));
}

SaddleReference compute_reference(const SaddleProblem& problem, const ReferenceOptions& options) {
  problem.validate();
  if (options.max_iterations < 1 || options.check_every < 1) throw ConfigError("reference run needs iterations");
  problem.reset_state();
  const double step = pdhg_step_size(problem);
  const std::size_t n = problem.n();
  Vector x = problem.zero_primal();
  BlockVector y = problem.zero_dual();
  std::size_t used = 0;
  double residual = kInf;

  const auto advance = [&](const StepPlan& plan, std::size_t budget) {
    SolverState st = make_state(problem, plan, x, y, 0);
    while (used < budget) {
      RunOptions opts;
      opts.iterations = std::min(options.check_every, budget - used);
      run(problem, plan, st, opts);
      used += opts.iterations;
      residual = residual_with_step(problem, st.x, st.y, step);
      if (residual <= options.tolerance) break;
    }
    x = st.x;
    y = st.y;
  };

  const Vector mu = problem.mus();
  const bool dual_strong = std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; });
  if (options.accelerate && (problem.mu_g() > 0.0 || dual_strong)) {
    StepPlan acc;
    acc.sampling = Sampling::full(n);
    if (problem.mu_g() > 0.0 && dual_strong) {
      // Balanced linear-rate steps: tau = c/mu_g, sigma_i = c/mu_i with c^2 ||M^{-1/2} A||^2 / mu_g < 1.
      std::vector<LinearOpPtr> rows;
      for (std::size_t i = 0; i < n; ++i) rows.push_back(std::make_shared<ScaledOp>(problem.A.row_ptr(i), 1.0 / std::sqrt(mu[i])));
      const double l = op_norm(BlockOperator(rows), 1e-10, 20000).safe(1e-10);
      const double c = 0.99 * std::sqrt(problem.mu_g()) / l;
      acc.variant = Variant::linear;
      acc.tau = c / problem.mu_g();
      for (std::size_t i = 0; i < n; ++i) acc.sigma.push_back(c / mu[i]);
      acc.theta = 1.0 / (1.0 + 2.0 * c);
    } else if (problem.mu_g() > 0.0) {
      acc.variant = Variant::primal_accel;
      acc.tau = step;
      acc.sigma.assign(n, step);
    } else {
      acc.variant = Variant::dual_accel;
      const auto [tau0, st0] = dual_accel_initial_steps(problem.A, acc.sampling, mu);
      acc.tau = tau0;
      acc.sigma_tilde = st0;
    }
    advance(acc, options.max_iterations / 2);
  }
  if (residual > options.tolerance) {
    StepPlan plain;
    plain.sampling = Sampling::full(n);
    plain.tau = step;
    plain.sigma.assign(n, step);
    advance(plain, options.max_iterations);
  }
  Vector g_state = problem.g->warm_state();
  problem.reset_state();
  SaddleReference ref = make_reference(problem, std::move(x), std::move(y));
  ref.g_state = std::move(g_state);
  ref.residual = residual;
  ref.tolerance = options.tolerance;
  ref.iterations = used;
  return ref;
}

// ---------------------------------------------------------------------------

void save_reference(const SaddleReference& ref, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path meta = stem;
  meta += ".meta";
  {
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + bin.string());
    os.write(reinterpret_cast<const char*>(ref.x.data()), static_cast<std::streamsize>(ref.x.size() * sizeof(double)));
    for (std::size_t i = 0; i < ref.y.num_blocks(); ++i) {
      const auto& b = ref.y.data(i);
      os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
    }
    os.write(reinterpret_cast<const char*>(ref.g_state.data()),
             static_cast<std::streamsize>(ref.g_state.size() * sizeof(double)));
  }
  std::ofstream os(meta);
  if (!os) throw std::runtime_error("cannot write " + meta.string());
  os.precision(17);
  os << "format float64\n";
  os << "x_size " << ref.x.size() << '\n';
  os << "blocks " << ref.y.num_blocks() << '\n';
  for (std::size_t i = 0; i < ref.y.num_blocks(); ++i) os << "y_shape " << ref.y.shape(i).to_string() << '\n';
  os << "g_state_size " << ref.g_state.size() << '\n';
  os << "residual " << ref.residual << '\n';
  os << "tolerance " << ref.tolerance << '\n';
  os << "objective " << ref.objective << '\n';
  os << "iterations " << ref.iterations << '\n';
}

SaddleReference load_reference(const SaddleProblem& problem, const std::filesystem::path& stem, double tolerance) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path meta = stem;
  meta += ".meta";
  std::ifstream ms(meta);
  if (!ms) throw std::runtime_error("missing reference metadata " + meta.string());
  std::vector<Shape> y_shapes;
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(ms, line)) {
    std::istringstream ls(line);
    std::string key, val;
    ls >> key >> val;
    if (key == "y_shape") {
      y_shapes.push_back(Shape::parse(val));
    } else if (!key.empty()) {
      fields[key] = val;
    }
  }
  if (fields["format"] != "float64") throw StructureError("unknown reference format in " + meta.string());
  if (y_shapes != problem.A.out_shapes() || fields["x_size"] != std::to_string(problem.A.in_shape().size())) {
    throw StructureError("reference layout does not match the problem");
  }
  std::ifstream bs(bin, std::ios::binary);
  if (!bs) throw std::runtime_error("missing reference data " + bin.string());
  Vector x(problem.A.in_shape().size());
  bs.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
  BlockVector y(y_shapes);
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    auto& b = y.data(i);
    bs.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  Vector g_state(fields.count("g_state_size") ? std::stoull(fields["g_state_size"]) : 0);
  bs.read(reinterpret_cast<char*>(g_state.data()), static_cast<std::streamsize>(g_state.size() * sizeof(double)));
  if (!bs || bs.peek() != std::char_traits<char>::eof()) throw StructureError("reference data has the wrong length");
  problem.reset_state();
  if (!g_state.empty()) problem.g->set_warm_state(g_state);
  const double residual = fixed_point_residual(problem, x, y);
  problem.reset_state();
  if (!(residual <= tolerance)) {
    std::ostringstream os;
    os << "reference residual " << residual << " exceeds tolerance " << tolerance;
    throw ConfigError(os.str());
  }
  SaddleReference ref = make_reference(problem, std::move(x), std::move(y));
  ref.g_state = std::move(g_state);
  ref.residual = residual;
  ref.tolerance = tolerance;
  if (fields.count("iterations")) ref.iterations = std::stoull(fields["iterations"]);
  return ref;
}

// ---------------------------------------------------------------------------

namespace {

double f_block(const BlockVector& y, const SaddleReference& ref, const SaddleProblem& problem, std::size_t i) {
  const double v = problem.f_conj[i]->value(y.block(i));
  if (v == kInf) return kInf;
  double ip = 0.0;
  const auto yi = y.block(i);
  const auto ys = ref.y.block(i);
  const auto ax = ref.ax.block(i);
  for (std::size_t j = 0; j < yi.size(); ++j) ip += ax[j] * (yi[j] - ys[j]);
  return v - ref.fconj_values[i] - ip;
}

void check_dual(const BlockVector& y, const SaddleReference& ref) {
  if (!y.same_structure(ref.y)) throw StructureError("dual variable does not match the reference");
}

}  // namespace

double dist_F(const BlockVector& y, const SaddleReference& ref, const SaddleProblem& problem) {
  check_dual(y, ref);
  double s = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) s += f_block(y, ref, problem, i);
  return s;
}

double dist_F_p(const BlockVector& y, const SaddleReference& ref, const SaddleProblem& problem,
                std::span<const double> p) {
  check_dual(y, ref);
  if (p.size() != problem.n()) throw StructureError("need one probability per block");
  double s = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const double w = 1.0 / p[i] - 1.0;
    if (w == 0.0) continue;
    s += w * f_block(y, ref, problem, i);
  }
  return s;
}

double dist_G(std::span<const double> x, const SaddleReference& ref, const SaddleProblem& problem) {
  if (x.size() != ref.x.size()) throw StructureError("primal variable does not match the reference");
  const double v = problem.g->value(x);
  if (v == kInf) return kInf;
  double ip = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) ip += ref.aty[j] * (x[j] - ref.x[j]);
  return v - ref.g_value + ip;
}

double bregman_gap(std::span<const double> x, const BlockVector& y, const SaddleReference& ref,
                   const SaddleProblem& problem) {
  return dist_G(x, ref, problem) + dist_F(y, ref, problem);
}

double theorem1_constant(std::span<const double> x0, const BlockVector& y0, const SaddleReference& ref,
                         const SaddleProblem& problem, double tau, std::span<const double> sigma,
                         std::span<const double> p) {
  if (sigma.size() != problem.n() || p.size() != problem.n()) throw StructureError("need one sigma and p per block");
  double c = 0.5 * dist_sq(x0, ref.x) / tau;
  for (std::size_t i = 0; i < problem.n(); ++i) c += 0.5 * dist_sq(y0.block(i), ref.y.block(i)) / (p[i] * sigma[i]);
  return c + dist_F_p(y0, ref, problem, p);
}

Metrics metric_distances(std::span<const double> x, const BlockVector& y, const SaddleReference& ref,
                         const SaddleProblem& problem, const StepPlan& plan, double gamma_sq) {
  check_dual(y, ref);
  const double dx = dist_sq(x, ref.x);
  Vector dy(problem.n());
  double dy_total = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    dy[i] = dist_sq(y.block(i), ref.y.block(i));
    dy_total += dy[i];
  }
  Metrics m{{"primal_dist_sq", dx}, {"dual_dist_sq", dy_total}};
  const auto& s = plan.sampling;
  if (plan.variant == Variant::dual_accel) {
    double d = 0.0;
    for (std::size_t i = 0; i < problem.n(); ++i) {
      const double p = s.p(i);
      const double mu = problem.mu(i);
      const double sig0 = dual_accel_sigma(plan.sigma_tilde, mu, p);
      d += (1.0 / (p * sig0) + 2.0 * mu * (1.0 / p - 1.0)) * dy[i];
    }
    m.emplace_back("dual_dist_Y0", d);
  } else if (plan.variant == Variant::linear) {
    const double px = (1.0 / plan.tau + 2.0 * problem.mu_g()) * dx;
    double d = 0.0;
    for (std::size_t i = 0; i < problem.n(); ++i) d += (1.0 / plan.sigma[i] + 2.0 * problem.mu(i)) / s.p(i) * dy[i];
    m.emplace_back("primal_dist_X", px);
    m.emplace_back("dual_dist_Y", d);
    m.emplace_back("lyapunov", (1.0 - gamma_sq * plan.theta) * px + d);
  }
  return m;
}

RateFit fit_rate(std::span<const double> k, std::span<const double> value, RateMode mode, double k_min,
                 double k_max) {
  if (k.size() != value.size()) throw StructureError("fit_rate: series lengths differ");
  RateFit fit;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < k_min || k[j] > k_max) continue;
    if (!(value[j] > 0.0) || !std::isfinite(value[j]) || (mode == RateMode::polynomial && !(k[j] > 0.0))) {
      ++fit.dropped;
      continue;
    }
    xs.push_back(mode == RateMode::polynomial ? std::log(k[j]) : k[j]);
    ys.push_back(std::log(value[j]));
  }
  if (fit.dropped > 0) fit.warning = std::to_string(fit.dropped) + " nonpositive or non-finite points dropped";
  if (xs.size() < 10) throw DomainError("fit_rate needs at least 10 usable points, got " + std::to_string(xs.size()));
  const auto m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate needs distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.contraction = std::exp(fit.slope);
  fit.points = xs.size();
  return fit;
}

}  // namespace spdhg
