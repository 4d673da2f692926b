// spdhg: run, plan and check SPDHG experiments described by a run-config file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdhg/config.hpp"
#include "spdhg/diagnostics.hpp"
#include "spdhg/errors.hpp"
#include "spdhg/experiments.hpp"
#include "spdhg/harness.hpp"
#include "spdhg/planner.hpp"
#include "spdhg/sampling.hpp"

using namespace spdhg;

namespace {

struct Options {
  std::string config;
  std::string config_flag;
  std::size_t seeds = 0;
  std::string out;
  std::string scale = "desk";
};

std::string list(const Vector& v) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str() + ']';
}

ExperimentConfig load_experiment(const Config& cfg, const Options& o) {
  ExperimentConfig ec = experiment_config(cfg, parse_scale(o.scale));
  if (o.seeds > 0) ec.seeds = o.seeds;
  if (!o.out.empty()) ec.out_dir = o.out;
  return ec;
}

void print_plan(const StepPlan& plan, std::ostream& os) {
  os.precision(12);
  os << "variant     " << to_string(plan.variant) << '\n';
  os << "sampling    " << to_string(plan.sampling.kind()) << ", p = " << list(plan.sampling.marginals()) << '\n';
  os << "tau         " << plan.tau << '\n';
  if (plan.variant == Variant::dual_accel) {
    os << "sigma~      " << plan.sigma_tilde << '\n';
  } else {
    os << "sigma       " << list(plan.sigma) << '\n';
  }
  os << "theta       " << plan.theta << '\n';
}

// Config lines that reproduce the plan with planner = "explicit".
void print_plan_config(const StepPlan& plan, std::ostream& os) {
  os << "\n# reproduce with:\n[solver]\nvariant = \"" << to_string(plan.variant) << "\"\nplanner = \"explicit\"\n";
  os << "tau = " << ConfigValue{plan.tau}.to_text() << '\n';
  if (plan.variant == Variant::dual_accel) {
    os << "sigma_tilde = " << ConfigValue{plan.sigma_tilde}.to_text() << '\n';
  } else {
    ConfigValue::Array s;
    for (double v : plan.sigma) s.push_back({v});
    os << "sigma = " << ConfigValue{s}.to_text() << '\n';
  }
  os << "theta = " << ConfigValue{plan.theta}.to_text() << '\n';
  os << "[sampling]\n";
  if (plan.sampling.kind() == SamplingKind::full) {
    os << "kind = \"full\"\n";
  } else if (plan.sampling.kind() == SamplingKind::serial) {
    ConfigValue::Array p;
    for (double v : plan.sampling.marginals()) p.push_back({v});
    os << "kind = \"serial\"\nprobabilities = " << ConfigValue{p}.to_text() << '\n';
  } else {
    ConfigValue::Array atoms, probs;
    for (const auto& a : plan.sampling.atoms()) {
      ConfigValue::Array idx;
      for (auto i : a.subset) idx.push_back({static_cast<double>(i)});
      atoms.push_back({idx});
      probs.push_back({a.prob});
    }
    os << "kind = \"arbitrary\"\natoms = " << ConfigValue{atoms}.to_text()
       << "\natom_probabilities = " << ConfigValue{probs}.to_text() << '\n';
  }
}

void print_profile_plans(const ConditionProfile& profile, std::ostream& os) {
  os.precision(12);
  os << "kappa       " << list(profile.kappa()) << "  (rho = " << profile.rho() << ")\n";
  const std::pair<const char*, StepPlan (*)(const ConditionProfile&)> planners[] = {
      {"uniform", plan_uniform}, {"importance", plan_importance}, {"optimal", plan_optimal}};
  for (const auto& [name, fn] : planners) {
    os << '\n' << "== " << name << '\n';
    try {
      const StepPlan plan = fn(profile);
      print_plan(plan, os);
      os << "theta^n     " << std::pow(plan.theta, static_cast<double>(profile.n())) << '\n';
      const PlanReport report = verify_plan(plan, profile);
      os << "verify_plan " << (report.passed ? "passed" : "FAILED") << '\n' << report.describe();
    } catch (const DomainError& e) {
      os << "not available: " << e.what() << '\n';
    }
  }
  try {
    os << "\ncomparison rate 1 - 1/(n + n max sqrt(kappa_i)) = " << rate_zhang_xiao(profile) << '\n';
  } catch (const DomainError&) {
  }
}

int cmd_plan(const Config& cfg, const Options& o) {
  if (cfg.has("profile.kappa") || cfg.has("profile.norms")) {
    const double rho = cfg.number("profile.rho", 0.99);
    std::optional<ConditionProfile> profile;
    if (cfg.has("profile.kappa")) {
      profile.emplace(ConditionProfile::from_kappa(cfg.numbers("profile.kappa"), rho));
    } else {
      const Vector norms = cfg.numbers("profile.norms");
      Vector mu = cfg.numbers("profile.mu");
      if (mu.size() == 1) mu.assign(norms.size(), mu[0]);
      profile.emplace(cfg.number("profile.mu_g", 1.0), mu, norms, rho);
    }
    cfg.reject_unused();
    print_profile_plans(*profile, std::cout);
    return 0;
  }
  const ExperimentConfig ec = load_experiment(cfg, o);
  const Experiment e = build_experiment(ec);
  const StepPlan plan = make_plan(ec, e.problem);
  std::cout << "experiment  " << ec.name << " (" << e.description << ")\n";
  print_plan(plan, std::cout);
  const EsoParams eso = plan_eso(e.problem, plan);
  std::cout << "eso v       " << list(eso.v) << ", gamma^2 = " << eso.gamma_sq << '\n';
  std::cout << "validate_plan passed\n";
  const Vector mu = e.problem.mus();
  const bool strong = e.problem.mu_g() > 0.0 && std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; });
  if (strong) {
    const auto profile = ConditionProfile::from_problem(e.problem, ec.rho);
    if (plan.variant == Variant::linear && plan.sampling.kind() == SamplingKind::serial) {
      const PlanReport report = verify_plan(plan, profile);
      std::cout << "verify_plan " << (report.passed ? "passed" : "FAILED") << '\n' << report.describe();
    }
    std::cout << "\nplanner options for this problem:\n";
    print_profile_plans(profile, std::cout);
  }
  print_plan_config(plan, std::cout);
  return 0;
}

int cmd_validate_eso(const Config& cfg, const Options& o) {
  const ExperimentConfig ec = load_experiment(cfg, o);
  const Experiment e = build_experiment(ec);
  const StepPlan plan = make_plan(ec, e.problem);
  Vector sigma = plan.sigma;
  if (plan.variant == Variant::dual_accel) {
    sigma.clear();
    for (std::size_t i = 0; i < e.problem.n(); ++i) {
      sigma.push_back(dual_accel_sigma(plan.sigma_tilde, e.problem.mu(i), plan.sampling.p(i)));
    }
  }
  const EsoParams eso = plan_eso(e.problem, plan);
  const EsoReport r =
      validate_eso(plan.sampling, e.problem.A, plan.tau, sigma, eso, ec.eso_trials, ec.eso_probes, ec.data_seed);
  std::cout.precision(12);
  std::cout << "sampling    " << to_string(plan.sampling.kind()) << '\n';
  std::cout << "eso v       " << list(eso.v) << '\n';
  std::cout << "max ratio   " << r.max_ratio << " over " << r.evaluations << " evaluations\n";
  std::cout << (r.passed ? "ESO holds" : "ESO VIOLATED") << (r.message.empty() ? "" : ": " + r.message) << '\n';
  return r.passed ? 0 : 1;
}

int cmd_reference(const Config& cfg, const Options& o) {
  const ExperimentConfig ec = load_experiment(cfg, o);
  const Experiment e = build_experiment(ec);
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::path path;
  const SaddleReference ref = obtain_reference(ec, e, true, &path);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout.precision(12);
  std::cout << "reference   " << path.string() << '\n';
  std::cout << "residual    " << ref.residual << " (tolerance " << ref.tolerance << ")\n";
  std::cout << "iterations  " << ref.iterations << '\n';
  std::cout << "objective   " << ref.objective << '\n';
  std::cout << "time        " << secs << " s\n";
  return 0;
}

int cmd_run(const Config& cfg, const Options& o) {
  const ExperimentConfig ec = load_experiment(cfg, o);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(ec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto dir = out_dir(ec);
  write_outputs(res, dir);
  std::cout.precision(6);
  std::cout << ec.name << ": " << ec.seeds << " seeds x " << res.iterations << " iterations (" << res.epochs
            << " epochs) in " << secs << " s\n";
  if (!res.reference_path.empty()) {
    std::cout << "reference " << (res.reference_computed ? "computed and saved to " : "loaded from ")
              << res.reference_path.string() << '\n';
  }
  std::cout << "operator evaluations " << res.operator_calls << " (expected " << res.expected_calls << ")\n";
  const auto summary = nlohmann::json::parse(res.summary);
  for (const auto& [name, fit] : summary["fits"].items()) {
    std::cout << "  " << name;
    if (fit.contains("error")) {
      std::cout << ": no fit (" << fit["error"].get<std::string>() << ")\n";
    } else if (fit["mode"] == "linear") {
      std::cout << ": contraction " << fit["contraction"] << " per iteration\n";
    } else {
      std::cout << ": slope " << fit["slope"] << '\n';
    }
  }
  std::cout << "wrote " << (dir / (ec.name + ".csv")).string() << " and " << (dir / (ec.name + ".summary.json")).string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPDHG experiments: run, plan, validate-eso, reference"};
  app.require_subcommand(1);
  Options o;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", o.config, "run-config file");
    sub->add_option("--config", o.config_flag, "run-config file");
    sub->add_option("--seeds", o.seeds, "number of seeds (overrides the config)");
    sub->add_option("--out", o.out, "output directory (default: $SPDHG_OUT_DIR or ./spdhg-out)");
    sub->add_option("--scale", o.scale, "default sizes")->check(CLI::IsMember({"desk", "paper"}));
    return sub;
  };
  auto* run = add_common(app.add_subcommand("run", "run an experiment and write its metric table"));
  auto* plan = add_common(app.add_subcommand("plan", "print step sizes, sampling and planner checks"));
  auto* eso = add_common(app.add_subcommand("validate-eso", "check the ESO inequality for the configured plan"));
  auto* ref = add_common(app.add_subcommand("reference", "compute and save the saddle reference"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const std::string path = o.config_flag.empty() ? o.config : o.config_flag;
  if (path.empty()) {
    std::cerr << "error: no config file given\n\n" << app.help();
    return 2;
  }
  try {
    const Config cfg = Config::load(path);
    if (run->parsed()) return cmd_run(cfg, o);
    if (plan->parsed()) return cmd_plan(cfg, o);
    if (eso->parsed()) return cmd_validate_eso(cfg, o);
    if (ref->parsed()) return cmd_reference(cfg, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
