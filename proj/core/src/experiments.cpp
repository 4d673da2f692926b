#include "spdhg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdhg/errors.hpp"
#include "spdhg/phantoms.hpp"
#include "spdhg/planner.hpp"

namespace spdhg {

namespace {

constexpr std::uint64_t kDataStream = 0x64617461ULL;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::pet_tv: return "pet_tv";
    case ExperimentId::tv_denoise: return "tv_denoise";
    case ExperimentId::huber_deblur: return "huber_deblur";
    case ExperimentId::pet_linear: return "pet_linear";
    case ExperimentId::scalar_toy: return "scalar_toy";
  }
  return "?";
}

ExperimentId parse_experiment(const std::string& text) {
  for (auto id : {ExperimentId::pet_tv, ExperimentId::tv_denoise, ExperimentId::huber_deblur, ExperimentId::pet_linear,
                  ExperimentId::scalar_toy}) {
    if (text == to_string(id)) return id;
  }
  throw ConfigError("unknown experiment '" + text + "' (pet_tv, tv_denoise, huber_deblur, pet_linear, scalar_toy)");
}

Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::desk;
  if (text == "paper") return Scale::paper;
  throw ConfigError("unknown scale '" + text + "' (desk, paper)");
}

ExperimentConfig default_config(ExperimentId id, Scale scale) {
  ExperimentConfig c;
  c.experiment = id;
  c.name = to_string(id);
  const bool paper = scale == Scale::paper;
  switch (id) {
    case ExperimentId::pet_tv:
      c.rows = c.cols = paper ? 250 : 32;
      c.angles = paper ? 200 : 20;
      c.blocks = paper ? 50 : 4;
      c.alpha = 0.2;
      c.intensity = paper ? 4.0 : 1.0;
      c.background = 2.0;
      c.variant = Variant::plain;
      c.epochs = 50;
      break;
    case ExperimentId::pet_linear:
      c.rows = c.cols = paper ? 250 : 32;
      c.angles = paper ? 200 : 20;
      c.blocks = paper ? 50 : 4;
      c.alpha = 0.05;
      c.mu = 0.5;
      c.intensity = 5.0;
      c.background = 20.0;
      c.variant = Variant::linear;
      c.planner = "uniform";
      c.epochs = 50;
      break;
    case ExperimentId::tv_denoise:
      c.rows = paper ? 442 : 32;
      c.cols = paper ? 331 : 32;
      c.blocks = 2;
      c.alpha = 0.12;
      c.noise = 0.1;
      c.variant = Variant::primal_accel;
      c.epochs = 50;
      break;
    case ExperimentId::huber_deblur:
      c.rows = paper ? 408 : 32;
      c.cols = paper ? 544 : 32;
      c.kernel = paper ? 15 : 5;
      c.blocks = 3;
      c.alpha = 0.1;
      c.eta = 1.0;
      c.intensity = 100.0;
      c.upper = 100.0;
      c.background_ratio = 200.0 / 494.3;
      c.variant = Variant::dual_accel;
      c.epochs = 50;
      break;
    case ExperimentId::scalar_toy:
      c.blocks = c.toy_a.size();
      c.variant = Variant::plain;
      c.epochs = 2500;
      c.checkpoints = "log";
      break;
  }
  return c;
}

ExperimentConfig experiment_config(const Config& cfg, Scale scale) {
  const std::string id_text = cfg.string("experiment", "");
  if (id_text.empty()) throw ConfigError(cfg.source() + ": missing top-level key 'experiment'");
  ExperimentConfig c = default_config(parse_experiment(id_text), scale);
  c.name = cfg.string("name", c.name);

  if (cfg.has("problem.size")) {
    const Vector s = cfg.numbers("problem.size");
    require(s.size() == 1 || s.size() == 2, "problem.size is a number or [rows, cols]");
    for (double v : s) require(v >= 1.0 && v == std::floor(v), "problem.size must hold positive integers");
    c.rows = static_cast<std::size_t>(s[0]);
    c.cols = static_cast<std::size_t>(s.back());
  }
  c.blocks = cfg.count("problem.blocks", c.blocks);
  c.angles = cfg.count("problem.angles", c.angles);
  c.bins = cfg.count("problem.bins", c.bins);
  c.alpha = cfg.number("problem.alpha", c.alpha);
  c.mu = cfg.number("problem.mu", c.mu);
  c.eta = cfg.number("problem.eta", c.eta);
  c.intensity = cfg.number("problem.intensity", c.intensity);
  c.background = cfg.number("problem.background", c.background);
  if (cfg.has("problem.background")) c.background_ratio = 0.0;
  c.background_ratio = cfg.number("problem.background_ratio", c.background_ratio);
  c.upper = cfg.number("problem.upper", c.upper);
  c.noise = cfg.number("problem.noise", c.noise);
  c.kernel = cfg.count("problem.kernel", c.kernel);
  c.fgp_iters = static_cast<int>(cfg.count("problem.fgp_iters", static_cast<std::size_t>(c.fgp_iters)));
  c.data_seed = cfg.count("problem.data_seed", c.data_seed);

  c.loss = cfg.string("toy.loss", c.loss);
  if (cfg.has("toy.a")) c.toy_a = cfg.numbers("toy.a");
  if (cfg.has("toy.b")) c.toy_b = cfg.numbers("toy.b");
  c.toy_mu_g = cfg.number("toy.mu_g", c.toy_mu_g);
  if (c.experiment == ExperimentId::scalar_toy && !cfg.has("problem.blocks")) c.blocks = c.toy_a.size();

  c.sampling.kind = cfg.string("sampling.kind", c.sampling.kind);
  c.sampling.probabilities = cfg.numbers("sampling.probabilities");
  c.sampling.atoms = cfg.index_lists("sampling.atoms");
  c.sampling.atom_probabilities = cfg.numbers("sampling.atom_probabilities");
  c.sampling.eso_v = cfg.numbers("sampling.eso_v");

  if (cfg.has("solver.variant")) c.variant = parse_variant(cfg.string("solver.variant", ""));
  c.planner = cfg.string("solver.planner", c.planner);
  c.gamma = cfg.number("solver.gamma", c.gamma);
  c.rho = cfg.number("solver.rho", c.rho);
  c.tau = cfg.number("solver.tau", c.tau);
  c.sigma = cfg.numbers("solver.sigma");
  c.theta = cfg.number("solver.theta", c.theta);
  c.sigma_tilde = cfg.number("solver.sigma_tilde", c.sigma_tilde);

  c.epochs = cfg.number("run.epochs", c.epochs);
  c.iterations = cfg.count("run.iterations", c.iterations);
  c.checkpoints = cfg.string("run.checkpoints", c.checkpoints);
  c.per_decade = cfg.count("run.per_decade", c.per_decade);
  c.cache_check_every = cfg.count("run.cache_check_every", c.cache_check_every);
  c.seeds = cfg.count("run.seeds", c.seeds);
  c.seed_offset = cfg.count("run.seed_offset", c.seed_offset);
  c.threads = cfg.count("run.threads", c.threads);

  c.reference = cfg.string("reference.path", c.reference);
  c.reference_iterations = cfg.count("reference.iterations", c.reference_iterations);
  c.reference_tolerance = cfg.number("reference.tolerance", c.reference_tolerance);

  c.out_dir = cfg.string("output.dir", c.out_dir);
  c.fit_min = cfg.number("output.fit_min", c.fit_min);
  c.fit_max = cfg.number("output.fit_max", c.fit_max);

  c.eso_trials = static_cast<int>(cfg.count("eso.trials", static_cast<std::size_t>(c.eso_trials)));
  c.eso_probes = static_cast<int>(cfg.count("eso.probes", static_cast<std::size_t>(c.eso_probes)));

  require(c.seeds >= 1, "run.seeds must be at least 1");
  require(c.epochs > 0.0 || c.iterations > 0, "run.epochs must be positive");
  require(c.checkpoints == "epoch" || c.checkpoints == "log", "run.checkpoints is \"epoch\" or \"log\"");
  require(c.per_decade >= 1, "run.per_decade must be at least 1");
  require(c.reference_tolerance > 0.0, "reference.tolerance must be positive");
  cfg.reject_unused();
  return c;
}

// ---------------------------------------------------------------------------

namespace {

Shape image_shape(const ExperimentConfig& cfg) {
  require(cfg.rows >= 2 && cfg.cols >= 2, "image must be at least 2 x 2");
  return Shape{cfg.rows, cfg.cols};
}

struct PetData {
  std::vector<LinearOpPtr> rows;
  std::vector<Vector> b;
  std::vector<Vector> r;
  Vector x_true;
};

PetData pet_data(const ExperimentConfig& cfg) {
  const Shape img = image_shape(cfg);
  require(cfg.rows >= 16 && cfg.cols >= 16, "PET images must be at least 16 x 16");
  require(cfg.blocks >= 1, "problem.blocks must be at least 1");
  require(cfg.intensity > 0.0, "problem.intensity must be positive");
  require(cfg.background > 0.0, "problem.background must be positive");
  if (cfg.angles % cfg.blocks != 0) {
    throw ConfigError(std::to_string(cfg.angles) + " angles cannot be split into " + std::to_string(cfg.blocks) +
                      " equal blocks");
  }
  const std::size_t bins = cfg.bins ? cfg.bins : std::max(cfg.rows, cfg.cols);
  const ToyRadon radon(img, cfg.angles, bins);

  PetData d;
  d.x_true = emission_phantom(img);
  for (double& v : d.x_true) v *= cfg.intensity;
  const Vector ax = radon.full()->apply(d.x_true);
  Vector mean(ax.size());
  for (std::size_t j = 0; j < ax.size(); ++j) mean[j] = ax[j] + cfg.background;
  Rng rng(cfg.data_seed, kDataStream);
  const Vector b = poisson_sample(mean, rng);

  d.rows = radon.partition(cfg.blocks);
  for (std::size_t i = 0; i < cfg.blocks; ++i) {
    Vector bi;
    for (std::size_t a = i; a < cfg.angles; a += cfg.blocks) {
      bi.insert(bi.end(), b.begin() + static_cast<std::ptrdiff_t>(a * bins),
                b.begin() + static_cast<std::ptrdiff_t>((a + 1) * bins));
    }
    d.r.emplace_back(bi.size(), cfg.background);
    d.b.push_back(std::move(bi));
  }
  return d;
}

}  // namespace

Experiment build_pet_tv(const ExperimentConfig& cfg) {
  require(cfg.alpha > 0.0, "problem.alpha must be positive");
  PetData d = pet_data(cfg);
  Experiment e;
  e.problem.A = BlockOperator(d.rows);
  for (std::size_t i = 0; i < cfg.blocks; ++i) {
    auto pair = kl(d.b[i], d.r[i]);
    e.problem.f.push_back(pair.primal);
    e.problem.f_conj.push_back(pair.conjugate);
  }
  e.problem.g = tv_prox_fgp(image_shape(cfg), cfg.alpha, true, cfg.fgp_iters);
  e.x_true = std::move(d.x_true);
  e.description = "PET with KL data term and TV + nonnegativity, " + std::to_string(cfg.blocks) + " angle blocks";
  e.problem.validate();
  return e;
}

Experiment build_pet_linear(const ExperimentConfig& cfg) {
  require(cfg.alpha > 0.0 && cfg.mu > 0.0, "problem.alpha and problem.mu must be positive");
  PetData d = pet_data(cfg);
  Experiment e;
  e.problem.A = BlockOperator(d.rows);
  for (std::size_t i = 0; i < cfg.blocks; ++i) {
    if (std::any_of(d.b[i].begin(), d.b[i].end(), [](double v) { return v <= 0.0; })) {
      throw ConfigError("smoothed KL needs positive counts; raise problem.background or problem.intensity");
    }
    auto pair = smoothed_kl(d.b[i], d.r[i]);
    e.problem.f.push_back(pair.primal);
    e.problem.f_conj.push_back(pair.conjugate);
  }
  e.problem.g = add_sq_l2(tv_prox_fgp(image_shape(cfg), cfg.alpha, true, cfg.fgp_iters), cfg.mu);
  e.x_true = std::move(d.x_true);
  e.description = "PET with smoothed KL and strongly convex TV, " + std::to_string(cfg.blocks) + " angle blocks";
  e.problem.validate();
  return e;
}

Experiment build_tv_denoise(const ExperimentConfig& cfg) {
  require(cfg.blocks == 2, "tv_denoise has exactly 2 blocks; use sampling.kind = \"full\" for the deterministic case");
  require(cfg.alpha > 0.0 && cfg.noise >= 0.0, "problem.alpha must be positive and problem.noise nonnegative");
  const Shape img = image_shape(cfg);
  Experiment e;
  e.x_true = blocky_phantom(img);
  Rng rng(cfg.data_seed, kDataStream);
  const Vector b = gaussian_noise(e.x_true, cfg.noise, rng);
  e.problem.A = BlockOperator({grad2d(img, Direction::horizontal), grad2d(img, Direction::vertical)});
  const auto l1 = l1_norm(1.0);
  e.problem.f = {l1.primal, l1.primal};
  e.problem.f_conj = {l1.conjugate, l1.conjugate};
  e.problem.g = sq_l2_datafit(b, cfg.alpha).primal;
  e.description = "anisotropic TV denoising, Gaussian noise";
  e.problem.validate();
  return e;
}

Experiment build_huber_deblur(const ExperimentConfig& cfg) {
  require(cfg.blocks == 3, "huber_deblur has exactly 3 blocks");
  require(cfg.kernel >= 1 && cfg.kernel <= std::min(cfg.rows, cfg.cols), "kernel larger than the image");
  require(cfg.intensity > 0.0 && cfg.upper > 0.0, "problem.intensity and problem.upper must be positive");
  const Shape img = image_shape(cfg);
  Experiment e;
  e.x_true = blocky_phantom(img);
  for (double& v : e.x_true) v = std::min(v * cfg.intensity, cfg.upper);
  const auto blur = conv2d(motion_blur(cfg.kernel), img);
  const Vector ax = blur->apply(e.x_true);
  const double mean_ax = std::accumulate(ax.begin(), ax.end(), 0.0) / static_cast<double>(ax.size());
  const double r0 = cfg.background_ratio > 0.0 ? cfg.background_ratio * mean_ax : cfg.background;
  require(r0 > 0.0, "background must be positive");
  Vector mean(ax.size());
  for (std::size_t j = 0; j < ax.size(); ++j) mean[j] = ax[j] + r0;
  Rng rng(cfg.data_seed, kDataStream);
  const Vector b = poisson_sample(mean, rng);
  if (std::any_of(b.begin(), b.end(), [](double v) { return v <= 0.0; })) {
    throw ConfigError("smoothed KL needs positive counts; raise problem.background or problem.intensity");
  }
  e.problem.A = BlockOperator({blur, grad2d(img, Direction::horizontal), grad2d(img, Direction::vertical)});
  const auto data = smoothed_kl(b, Vector(b.size(), r0));
  const auto hub = huber(cfg.alpha, cfg.eta);
  e.problem.f = {data.primal, hub.primal, hub.primal};
  e.problem.f_conj = {data.conjugate, hub.conjugate, hub.conjugate};
  e.problem.g = box_indicator(0.0, cfg.upper);
  e.description = "deblurring with smoothed KL, Huber TV and a box constraint";
  e.problem.validate();
  return e;
}

namespace {

// argmin mu/2 x^2 + sum_i |a_i x - b_i| and a matching dual point, if unique.
std::optional<std::pair<double, Vector>> l1_toy_saddle(const Vector& a, const Vector& b, double mu) {
  const std::size_t n = a.size();
  const auto phi = [&](double x) {
    double s = 0.5 * mu * x * x;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] * x - b[i]);
    return s;
  };
  Vector cand;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != 0.0) cand.push_back(b[i] / a[i]);
  }
  Vector kinks = cand;
  std::sort(kinks.begin(), kinks.end());
  if (mu > 0.0) {
    // Stationary point on each linear piece.
    Vector probes;
    if (kinks.empty()) {
      probes.push_back(0.0);
    } else {
      probes.push_back(kinks.front() - 1.0);
      for (std::size_t k = 0; k + 1 < kinks.size(); ++k) probes.push_back(0.5 * (kinks[k] + kinks[k + 1]));
      probes.push_back(kinks.back() + 1.0);
    }
    for (double t : probes) {
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = a[i] * t - b[i];
        slope += a[i] * (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0));
      }
      cand.push_back(-slope / mu);
    }
  }
  if (cand.empty()) return std::nullopt;
  double x = cand.front();
  for (double t : cand) {
    if (phi(t) < phi(x)) x = t;
  }
  Vector y(n, 0.0);
  std::vector<std::size_t> at_kink;
  double rest = mu * x;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a[i] * x - b[i];
    if (std::fabs(r) <= 1e-12 * (1.0 + std::fabs(b[i]))) {
      at_kink.push_back(i);
    } else {
      y[i] = r > 0.0 ? 1.0 : -1.0;
      rest += a[i] * y[i];
    }
  }
  if (at_kink.size() > 1) return std::nullopt;
  if (at_kink.size() == 1) {
    const std::size_t k = at_kink.front();
    y[k] = -rest / a[k];
    if (std::fabs(y[k]) > 1.0 + 1e-12) return std::nullopt;
    y[k] = std::clamp(y[k], -1.0, 1.0);
  } else if (std::fabs(rest) > 1e-10 * (1.0 + std::fabs(mu * x))) {
    return std::nullopt;
  }
  return std::make_pair(x, y);
}

}  // namespace

Experiment build_scalar_toy(const ExperimentConfig& cfg) {
  const Vector& a = cfg.toy_a;
  const Vector& b = cfg.toy_b;
  require(!a.empty() && a.size() == b.size(), "toy.a and toy.b need the same positive length");
  require(cfg.blocks == a.size(), "problem.blocks must equal the length of toy.a");
  require(cfg.toy_mu_g >= 0.0, "toy.mu_g must be nonnegative");
  require(cfg.loss == "quadratic" || cfg.loss == "l1", "toy.loss is \"quadratic\" or \"l1\"");
  const std::size_t n = a.size();
  Experiment e;
  std::vector<LinearOpPtr> rows;
  for (std::size_t i = 0; i < n; ++i) {
    require(a[i] != 0.0, "toy.a entries must be nonzero");
    rows.push_back(sparse_matrix_op({{0, 0, a[i]}}, Shape{1}, Shape{1}));
  }
  e.problem.A = BlockOperator(rows);
  e.problem.g = add_sq_l2(zero_function(), cfg.toy_mu_g);
  std::vector<Vector> ys(n);
  double xs = 0.0;
  if (cfg.loss == "quadratic") {
    for (std::size_t i = 0; i < n; ++i) {
      auto pair = sq_l2_datafit({b[i]}, 1.0);
      e.problem.f.push_back(pair.primal);
      e.problem.f_conj.push_back(pair.conjugate);
    }
    const double den = cfg.toy_mu_g + std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
    require(den > 0.0, "toy problem has no unique solution");
    xs = std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / den;
    for (std::size_t i = 0; i < n; ++i) ys[i] = {a[i] * xs - b[i]};
    e.exact_saddle = std::make_pair(Vector{xs}, BlockVector::from_blocks(ys));
    e.description = "scalar toy, quadratic losses";
  } else {
    const auto l1 = l1_norm(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      e.problem.f.push_back(translate(l1.primal, {b[i]}));
      e.problem.f_conj.push_back(add_linear(l1.conjugate, {b[i]}));
    }
    if (const auto s = l1_toy_saddle(a, b, cfg.toy_mu_g)) {
      for (std::size_t i = 0; i < n; ++i) ys[i] = {s->second[i]};
      e.exact_saddle = std::make_pair(Vector{s->first}, BlockVector::from_blocks(ys));
    }
    e.description = "scalar toy, absolute losses";
  }
  e.problem.validate();
  return e;
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentId::pet_tv: return build_pet_tv(cfg);
    case ExperimentId::tv_denoise: return build_tv_denoise(cfg);
    case ExperimentId::huber_deblur: return build_huber_deblur(cfg);
    case ExperimentId::pet_linear: return build_pet_linear(cfg);
    case ExperimentId::scalar_toy: return build_scalar_toy(cfg);
  }
  throw ConfigError("unknown experiment");
}

// ---------------------------------------------------------------------------

Sampling make_sampling(const SamplingSpec& spec, std::size_t n) {
  if (spec.kind == "full") return Sampling::full(n);
  if (spec.kind == "serial") {
    if (spec.probabilities.empty()) return Sampling::uniform_serial(n);
    require(spec.probabilities.size() == n, "sampling.probabilities needs one entry per block");
    return Sampling::serial(spec.probabilities);
  }
  if (spec.kind == "arbitrary") {
    require(!spec.atoms.empty() && spec.atoms.size() == spec.atom_probabilities.size(),
            "sampling.atoms and sampling.atom_probabilities must have the same positive length");
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < spec.atoms.size(); ++k) atoms.push_back({spec.atoms[k], spec.atom_probabilities[k]});
    return Sampling::arbitrary(n, std::move(atoms));
  }
  throw ConfigError("unknown sampling kind '" + spec.kind + "' (full, serial, arbitrary)");
}

StepPlan make_plan(const ExperimentConfig& cfg, const SaddleProblem& problem) {
  const std::size_t n = problem.n();
  StepPlan plan;
  plan.variant = cfg.variant;
  plan.sampling = make_sampling(cfg.sampling, n);
  if (!cfg.sampling.eso_v.empty()) {
    require(cfg.sampling.eso_v.size() == n, "sampling.eso_v needs one entry per block");
    plan.eso_v = cfg.sampling.eso_v;
  }
  const std::string& planner = cfg.planner;
  if (planner == "explicit") {
    plan.tau = cfg.tau;
    plan.theta = cfg.theta;
    plan.sigma_tilde = cfg.sigma_tilde;
    if (cfg.variant != Variant::dual_accel) {
      require(cfg.sigma.size() == 1 || cfg.sigma.size() == n, "solver.sigma needs one value or one per block");
      plan.sigma = cfg.sigma.size() == 1 ? Vector(n, cfg.sigma[0]) : cfg.sigma;
    }
  } else if (cfg.variant == Variant::linear) {
    if (plan.sampling.kind() == SamplingKind::full) {
      require(planner == "recipe" || planner == "uniform", "full sampling only has the balanced linear plan");
      require(problem.mu_g() > 0.0, "the linear variant needs mu_g > 0");
      const Vector mu = problem.mus();
      std::vector<LinearOpPtr> rows;
      for (std::size_t i = 0; i < n; ++i) {
        require(mu[i] > 0.0, "the linear variant needs every f_i^* strongly convex");
        rows.push_back(std::make_shared<ScaledOp>(problem.A.row_ptr(i), 1.0 / std::sqrt(mu[i])));
      }
      const double l = op_norm(BlockOperator(rows), 1e-10, 20000).safe(1e-10);
      const double c = cfg.rho * std::sqrt(problem.mu_g()) / l;
      plan.tau = c / problem.mu_g();
      for (std::size_t i = 0; i < n; ++i) plan.sigma.push_back(c / mu[i]);
      plan.theta = 1.0 / (1.0 + 2.0 * c);
    } else {
      require(plan.sampling.kind() == SamplingKind::serial, "the planner needs a serial sampling");
      const auto profile = ConditionProfile::from_problem(problem, cfg.rho);
      StepPlan p;
      if (planner == "recipe" || planner == "uniform") {
        p = plan_uniform(profile);
      } else if (planner == "importance") {
        p = plan_importance(profile);
      } else if (planner == "optimal") {
        p = plan_optimal(profile);
      } else {
        throw ConfigError("unknown planner '" + planner + "' (recipe, uniform, importance, optimal, explicit)");
      }
      p.eso_v = plan.eso_v;
      plan = std::move(p);
    }
  } else {
    require(planner == "recipe", "planner '" + planner + "' needs the linear variant (or use \"recipe\")");
    if (cfg.variant == Variant::dual_accel) {
      const auto [tau, st] = dual_accel_initial_steps(problem.A, plan.sampling, problem.mus());
      plan.tau = tau;
      plan.sigma_tilde = st;
    } else {
      const StepSizes s = initial_step_sizes_general(problem.A, plan.sampling, cfg.gamma);
      plan.tau = s.tau;
      plan.sigma = s.sigma;
    }
  }
  validate_plan(problem, plan);
  return plan;
}

}  // namespace spdhg
