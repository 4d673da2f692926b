#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spdhg/harness.hpp"

using namespace spdhg;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "spdhg_test_harness" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string csv(const ExperimentResult& r) {
  std::ostringstream os;
  r.table.write_csv(os);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentConfig small_toy(const std::filesystem::path& out) {
  auto cfg = default_config(ExperimentId::scalar_toy);
  cfg.name = "toy";
  cfg.iterations = 300;
  cfg.seeds = 4;
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("checkpoint schedules") {
  auto cfg = default_config(ExperimentId::scalar_toy);
  cfg.checkpoints = "log";
  cfg.per_decade = 10;
  const auto log = checkpoint_schedule(cfg, 100, 4.0);
  CHECK(log == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 8, 10, 13, 16, 20, 25, 32, 40, 50, 63, 79, 100});
  cfg.checkpoints = "epoch";
  CHECK(checkpoint_schedule(cfg, 10, 4.0) == std::vector<std::size_t>{0, 4, 8, 10});
  CHECK(checkpoint_schedule(cfg, 3, 1.5) == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("output directory") {
  ::setenv("SPDHG_OUT_DIR", "/tmp/somewhere", 1);
  CHECK(default_out_dir() == "/tmp/somewhere");
  ::unsetenv("SPDHG_OUT_DIR");
  CHECK(default_out_dir() == "spdhg-out");
  auto cfg = default_config(ExperimentId::tv_denoise);
  cfg.name = "tv";
  cfg.out_dir = "/x";
  CHECK(reference_stem(cfg) == "/x/tv.ref");
  cfg.reference = "/r/ref";
  CHECK(reference_stem(cfg) == "/r/ref");
}

TEST_CASE("metric table") {
  MetricTable t;
  t.rows = {{0, 0.0, 0, "a", 1.0}, {0, 0.0, 0, "b", 5.0}, {0, 1.0, 4, "a", 0.5},
            {1, 0.0, 0, "a", 3.0}, {1, 0.0, 0, "b", 7.0}};
  CHECK(t.metric_names() == std::vector<std::string>{"a", "b"});
  const auto a = t.mean_series("a");
  REQUIRE(a.size() == 1);  // iteration 4 is missing for seed 1
  CHECK(a[0].first == 0);
  CHECK(a[0].second == 2.0);
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str().rfind("seed,epoch,iteration,metric,value\n0,0,0,a,1\n", 0) == 0);
}

TEST_CASE("runs are deterministic and thread-independent") {
  const auto dir = scratch("det");
  auto cfg = small_toy(dir);
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_experiment(cfg);
  CHECK(csv(a) == csv(b));
  CHECK(a.summary == b.summary);
  CHECK(a.operator_calls == a.expected_calls);
  CHECK(a.operator_calls > 0);

  write_outputs(a, dir);
  const std::string text = slurp(dir / "toy.csv");
  CHECK(text == csv(a));
  CHECK(text.rfind("seed,epoch,iteration,metric,value\n", 0) == 0);
  CHECK(slurp(dir / "toy.summary.json") == a.summary + "\n");

  // Different seeds give different trajectories.
  cfg.seed_offset = 100;
  CHECK(csv(run_experiment(cfg)) != csv(a));
}

TEST_CASE("metrics at the start") {
  const auto cfg = small_toy(scratch("start"));
  const auto res = run_experiment(cfg);
  bool seen = false;
  for (const auto& row : res.table.rows) {
    if (row.iteration == 0 && row.metric == "relative_objective") {
      CHECK(row.value == doctest::Approx(1.0));
      seen = true;
    }
    if (row.metric == "relative_objective" && row.iteration == res.iterations) CHECK(std::abs(row.value) < 1e-2);
    if (row.metric == "ergodic_bregman_gap") CHECK(row.iteration > 0);
    if (row.metric == "bregman_gap") CHECK(row.value >= -1e-12);
  }
  CHECK(seen);
  CHECK(res.reference_path.empty());  // closed-form saddle point
  CHECK(res.theorem1_constant > 0.0);
}

TEST_CASE("computed references are persisted and reused") {
  const auto dir = scratch("ref");
  auto cfg = default_config(ExperimentId::tv_denoise);
  cfg.rows = cfg.cols = 8;
  cfg.name = "tv8";
  cfg.epochs = 5;
  cfg.seeds = 2;
  cfg.out_dir = dir.string();
  cfg.reference_iterations = 50000;
  const auto first = run_experiment(cfg);
  CHECK(first.reference_computed);
  CHECK(std::filesystem::exists(dir / "tv8.ref.meta"));
  const auto second = run_experiment(cfg);
  CHECK_FALSE(second.reference_computed);
  CHECK(csv(first) == csv(second));
  CHECK(first.summary == second.summary);
}

TEST_CASE("accelerated runs record their step sizes") {
  auto cfg = default_config(ExperimentId::tv_denoise);
  cfg.rows = cfg.cols = 8;
  cfg.name = "tv8pa";
  cfg.epochs = 3;
  cfg.seeds = 1;
  cfg.variant = Variant::primal_accel;
  cfg.out_dir = scratch("pa").string();
  const auto res = run_experiment(cfg);
  double last = 1e300;
  for (const auto& row : res.table.rows) {
    if (row.metric != "tau") continue;
    CHECK(row.value <= last);
    last = row.value;
  }
  CHECK(last < 1e300);
}
