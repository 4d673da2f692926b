#include "spdhg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "spdhg/errors.hpp"

namespace spdhg {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void MetricTable::write_csv(std::ostream& os) const {
  os << "seed,epoch,iteration,metric,value\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << num(r.epoch) << ',' << r.iteration << ',' << r.metric << ',' << num(r.value) << '\n';
  }
}

std::vector<std::string> MetricTable::metric_names() const {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    if (std::find(names.begin(), names.end(), r.metric) == names.end()) names.push_back(r.metric);
  }
  return names;
}

std::vector<std::pair<std::size_t, double>> MetricTable::mean_series(const std::string& metric) const {
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rows) {
    if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
    if (r.metric != metric) continue;
    auto& a = acc[r.iteration];
    a.first += r.value;
    ++a.second;
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& [k, a] : acc) {
    if (a.second == seeds.size()) out.emplace_back(k, a.first / static_cast<double>(a.second));
  }
  return out;
}

std::filesystem::path default_out_dir() {
  const char* env = std::getenv("SPDHG_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("spdhg-out");
}

std::filesystem::path out_dir(const ExperimentConfig& cfg) {
  return cfg.out_dir.empty() ? default_out_dir() : std::filesystem::path(cfg.out_dir);
}

std::filesystem::path reference_stem(const ExperimentConfig& cfg) {
  if (!cfg.reference.empty()) return cfg.reference;
  return out_dir(cfg) / (cfg.name + ".ref");
}

SaddleReference obtain_reference(const ExperimentConfig& cfg, const Experiment& experiment, bool refresh,
                                 std::filesystem::path* used, bool* computed) {
  const SaddleProblem& problem = experiment.problem;
  if (computed) *computed = false;
  if (used) used->clear();
  if (experiment.exact_saddle && !refresh) {
    SaddleReference ref = make_reference(problem, experiment.exact_saddle->first, experiment.exact_saddle->second);
    ref.residual = fixed_point_residual(problem, ref.x, ref.y);
    ref.tolerance = cfg.reference_tolerance;
    problem.reset_state();
    return ref;
  }
  const std::filesystem::path stem = reference_stem(cfg);
  if (used) *used = stem;
  std::filesystem::path meta = stem;
  meta += ".meta";
  if (!refresh && std::filesystem::exists(meta)) return load_reference(problem, stem, cfg.reference_tolerance);

  ReferenceOptions opts;
  opts.max_iterations = cfg.reference_iterations;
  opts.tolerance = cfg.reference_tolerance;
  SaddleReference ref = compute_reference(problem, opts);
  if (!(ref.residual <= cfg.reference_tolerance)) {
    throw ConfigError("reference run stopped at residual " + num(ref.residual) + " above tolerance " +
                      num(cfg.reference_tolerance) + "; raise reference.iterations or reference.tolerance");
  }
  save_reference(ref, stem);
  if (computed) *computed = true;
  // Reload so a fresh and a cached reference are bit-identical downstream.
  return load_reference(problem, stem, cfg.reference_tolerance);
}

std::vector<std::size_t> checkpoint_schedule(const ExperimentConfig& cfg, std::size_t iterations, double per_epoch) {
  std::vector<std::size_t> marks{0};
  if (cfg.checkpoints == "log") {
    for (std::size_t j = 0;; ++j) {
      const double v = std::round(std::pow(10.0, static_cast<double>(j) / static_cast<double>(cfg.per_decade)));
      if (v > static_cast<double>(iterations)) break;
      marks.push_back(static_cast<std::size_t>(v));
    }
  } else {
    for (double e = 1.0;; e += 1.0) {
      const double v = std::round(e * per_epoch);
      if (v > static_cast<double>(iterations)) break;
      marks.push_back(static_cast<std::size_t>(v));
    }
  }
  marks.push_back(iterations);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  return marks;
}

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct SeedOutcome {
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t calls = 0;
  std::uint64_t expected = 0;
};

SeedOutcome run_seed(const ExperimentConfig& cfg, const StepPlan& plan, const SaddleReference& ref, double gamma_sq,
                     std::size_t iterations, const std::vector<std::size_t>& marks, std::uint64_t seed) {
  // Fresh problem per seed: proxes may carry warm-start state.
  const Experiment e = build_experiment(cfg);
  const SaddleProblem& raw = e.problem;
  const SaddleProblem counted = raw.instrumented();
  const bool has_objective = raw.f.size() == raw.n();
  const double phi0 = has_objective ? raw.objective(raw.zero_primal()) : 0.0;
  const double scale = phi0 - ref.objective;

  SolverState st = make_state(counted, plan, raw.zero_primal(), raw.zero_dual(), seed, true);
  reset_counters(counted.A);

  RunOptions opts;
  opts.iterations = iterations;
  opts.checkpoints = marks;
  opts.cache_check_every = cfg.cache_check_every;
  opts.callback = [&](std::size_t k, double, const SolverState& s) {
    Metrics m;
    if (has_objective) {
      const double phi = raw.objective(s.x);
      m.emplace_back("objective", phi);
      if (scale > 0.0 && std::isfinite(scale)) m.emplace_back("relative_objective", (phi - ref.objective) / scale);
    }
    m.emplace_back("bregman_gap", bregman_gap(s.x, s.y, ref, raw));
    if (k > 0) m.emplace_back("ergodic_bregman_gap", bregman_gap(s.ergodic_x(), s.ergodic_y(), ref, raw));
    for (auto& d : metric_distances(s.x, s.y, ref, raw, plan, gamma_sq)) m.push_back(std::move(d));
    if (plan.variant == Variant::primal_accel) m.emplace_back("tau", s.tau);
    if (plan.variant == Variant::dual_accel) m.emplace_back("sigma_tilde", s.sigma_tilde);
    return m;
  };
  RunResult rr = run(counted, plan, st, opts);
  SeedOutcome out;
  out.trajectory = std::move(rr.trajectory);
  out.calls = total_calls(counted.A);
  out.expected = 2 * rr.blocks_selected;
  return out;
}

Json plan_json(const StepPlan& plan, const EsoParams& eso) {
  Json j;
  j["variant"] = to_string(plan.variant);
  j["tau"] = plan.tau;
  j["sigma"] = plan.sigma;
  j["theta"] = plan.theta;
  if (plan.variant == Variant::dual_accel) j["sigma_tilde"] = plan.sigma_tilde;
  j["sampling"] = to_string(plan.sampling.kind());
  j["probabilities"] = plan.sampling.marginals();
  j["eso_v"] = eso.v;
  j["gamma_sq"] = eso.gamma_sq;
  return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Experiment base = build_experiment(cfg);
  ExperimentResult res;
  res.config = cfg;
  res.plan = make_plan(cfg, base.problem);
  res.eso = plan_eso(base.problem, res.plan);
  base.problem.reset_state();
  res.reference = obtain_reference(cfg, base, false, &res.reference_path, &res.reference_computed);

  const double per_epoch = iterations_per_epoch(res.plan.sampling);
  res.iterations = cfg.iterations > 0
                       ? cfg.iterations
                       : static_cast<std::size_t>(std::max(1.0, std::round(cfg.epochs * per_epoch)));
  res.epochs = static_cast<double>(res.iterations) / per_epoch;
  const auto marks = checkpoint_schedule(cfg, res.iterations, per_epoch);

  res.theorem1_constant = std::numeric_limits<double>::quiet_NaN();
  if (res.plan.variant == Variant::plain) {
    res.theorem1_constant = theorem1_constant(base.problem.zero_primal(), base.problem.zero_dual(), res.reference,
                                              base.problem, res.plan.tau, res.plan.sigma, res.plan.sampling.marginals());
  }

  // Seeds in parallel; each writes only its own slot.
  std::vector<SeedOutcome> outcomes(cfg.seeds);
  std::vector<std::exception_ptr> errors(cfg.seeds);
  std::atomic<std::size_t> next{0};
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.seeds);
  const auto work = [&] {
    for (std::size_t s = next++; s < cfg.seeds; s = next++) {
      try {
        outcomes[s] = run_seed(cfg, res.plan, res.reference, res.eso.gamma_sq, res.iterations, marks,
                               cfg.seed_offset + s);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    res.operator_calls += outcomes[s].calls;
    res.expected_calls += outcomes[s].expected;
    for (const auto& pt : outcomes[s].trajectory) {
      for (const auto& [name, value] : pt.metrics) {
        res.table.rows.push_back({cfg.seed_offset + s, pt.epoch, pt.iteration, name, value});
      }
    }
  }

  // Summary. Nothing run-dependent (timings, whether the reference was cached) goes in here.
  Json j;
  j["experiment"] = to_string(cfg.experiment);
  j["name"] = cfg.name;
  j["description"] = base.description;
  j["planner"] = cfg.planner;
  j["plan"] = plan_json(res.plan, res.eso);
  j["seeds"] = cfg.seeds;
  j["seed_offset"] = cfg.seed_offset;
  j["iterations"] = res.iterations;
  j["epochs"] = res.epochs;
  j["iterations_per_epoch"] = per_epoch;
  Json ref;
  ref["path"] = res.reference_path.string();
  ref["closed_form"] = res.reference_path.empty();
  ref["residual"] = number_or_null(res.reference.residual);
  ref["tolerance"] = res.reference.tolerance;
  ref["objective"] = number_or_null(res.reference.objective);
  j["reference"] = ref;
  j["theorem1_constant"] = number_or_null(res.theorem1_constant);
  j["operator_calls"] = {{"counted", res.operator_calls},
                         {"expected", res.expected_calls},
                         {"match", res.operator_calls == res.expected_calls}};

  const RateMode mode = res.plan.variant == Variant::linear ? RateMode::linear : RateMode::polynomial;
  const double k_end = static_cast<double>(res.iterations);
  const double lo = cfg.fit_min > 0.0 ? cfg.fit_min : (mode == RateMode::linear ? 0.0 : std::max(1.0, k_end / 100.0));
  const double hi = cfg.fit_max > 0.0 ? cfg.fit_max : k_end;
  Json fits = Json::object();
  Json finals = Json::object();
  for (const auto& name : res.table.metric_names()) {
    const auto series = res.table.mean_series(name);
    Vector k, v;
    for (const auto& [it, val] : series) {
      k.push_back(static_cast<double>(it));
      v.push_back(val);
    }
    if (!series.empty()) finals[name] = number_or_null(series.back().second);
    Json f;
    f["mode"] = mode == RateMode::linear ? "linear" : "polynomial";
    f["window"] = {lo, hi};
    try {
      const RateFit fit = fit_rate(k, v, mode, lo, hi);
      f["slope"] = number_or_null(fit.slope);
      if (mode == RateMode::linear) f["contraction"] = number_or_null(fit.contraction);
      f["points"] = fit.points;
      f["dropped"] = fit.dropped;
      if (!fit.warning.empty()) f["warning"] = fit.warning;
    } catch (const DomainError& e) {
      f["error"] = e.what();
    }
    fits[name] = f;
  }
  j["fits"] = fits;
  j["final_mean"] = finals;
  res.summary = j.dump(2);
  return res;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = result.config.name;
  {
    std::ofstream os(dir / (stem + ".csv"));
    if (!os) throw std::runtime_error("cannot write " + (dir / (stem + ".csv")).string());
    result.table.write_csv(os);
  }
  std::ofstream os(dir / (stem + ".summary.json"));
  if (!os) throw std::runtime_error("cannot write " + (dir / (stem + ".summary.json")).string());
  os << result.summary << '\n';
}

}  // namespace spdhg
