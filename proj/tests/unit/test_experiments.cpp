#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "oracles.hpp"
#include "spdhg/diagnostics.hpp"
#include "spdhg/errors.hpp"
#include "spdhg/experiments.hpp"
#include "spdhg/phantoms.hpp"

using namespace spdhg;

namespace {

ExperimentConfig from_text(const std::string& text) { return experiment_config(Config::parse(text, "x.toml")); }

}  // namespace

TEST_CASE("angle blocks partition the sinogram") {
  auto cfg = default_config(ExperimentId::pet_tv);
  cfg.rows = cfg.cols = 16;
  cfg.angles = 20;
  cfg.blocks = 4;
  const auto e = build_pet_tv(cfg);
  REQUIRE(e.problem.n() == 4);
  const ToyRadon radon(Shape{16, 16}, 20, 16);
  const Vector full = radon.full()->apply(e.x_true);
  for (std::size_t i = 0; i < 4; ++i) {
    const Vector yi = e.problem.A.row(i).apply(e.x_true);
    REQUIRE(yi.size() == 5 * 16);
    for (std::size_t k = 0; k < 5; ++k) {
      const std::size_t angle = i + 4 * k;
      for (std::size_t j = 0; j < 16; ++j) CHECK(yi[k * 16 + j] == doctest::Approx(full[angle * 16 + j]));
    }
  }
  cfg.angles = 21;
  CHECK_THROWS_AS(build_pet_tv(cfg), ConfigError);
}

TEST_CASE("Poisson counts") {
  Rng rng(6);
  const std::size_t N = 20000;
  for (double lam : {0.5, 3.0, 40.0}) {
    const Vector mean(N, lam);
    const Vector b = poisson_sample(mean, rng);
    const double m = std::accumulate(b.begin(), b.end(), 0.0) / N;
    CHECK(std::abs(m - lam) <= 3.0 * std::sqrt(lam / N));
    for (double v : b) CHECK(v == std::floor(v));
  }
}

TEST_CASE("tv_denoise strong convexity") {
  for (double alpha : {0.12, 0.5}) {
    auto cfg = default_config(ExperimentId::tv_denoise);
    cfg.rows = cfg.cols = 8;
    cfg.alpha = alpha;
    const auto e = build_tv_denoise(cfg);
    CHECK(e.problem.mu_g() == doctest::Approx(1.0 / alpha));
    CHECK(e.problem.mu(0) == 0.0);
  }
  auto cfg = default_config(ExperimentId::tv_denoise);
  cfg.blocks = 3;
  CHECK_THROWS_AS(build_tv_denoise(cfg), ConfigError);
}

TEST_CASE("noiseless constant data is its own denoised image") {
  // TV of a constant image is zero, so x# = b and y# = 0 solve the problem.
  auto cfg = default_config(ExperimentId::tv_denoise);
  cfg.rows = cfg.cols = 6;
  auto e = build_tv_denoise(cfg);
  const Vector b(36, 0.4);
  e.problem.g = sq_l2_datafit(b, cfg.alpha).primal;
  const auto ref = compute_reference(e.problem);
  for (double v : ref.x) CHECK(v == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("scalar toy saddle points") {
  const auto quad = build_scalar_toy(default_config(ExperimentId::scalar_toy));
  REQUIRE(quad.exact_saddle);
  CHECK(fixed_point_residual(quad.problem, quad.exact_saddle->first, quad.exact_saddle->second) <= 1e-14);

  auto cfg = default_config(ExperimentId::scalar_toy);
  cfg.loss = "l1";
  cfg.toy_a = {1.0, 2.0, 1.0, 2.0};
  cfg.toy_b = {3.0, 4.0, -3.0, -4.0};
  const auto l1 = build_scalar_toy(cfg);
  REQUIRE(l1.exact_saddle);
  CHECK(fixed_point_residual(l1.problem, l1.exact_saddle->first, l1.exact_saddle->second) <= 1e-14);
  // Independent check of the primal point by a 1-D search.
  const auto phi = [&](double x) {
    double s = 0.5 * cfg.toy_mu_g * x * x;
    for (std::size_t i = 0; i < 4; ++i) s += std::abs(cfg.toy_a[i] * x - cfg.toy_b[i]);
    return s;
  };
  CHECK(std::abs(l1.exact_saddle->first[0] - oracle::golden_min(phi, -10.0, 10.0)) <= 1e-6);

  // Asymmetric data put x# on a kink; the dual of that block is then interior.
  cfg.toy_a = {1.0, 1.0, 1.0};
  cfg.toy_b = {0.5, 3.0, -3.0};
  cfg.blocks = 3;
  const auto kink = build_scalar_toy(cfg);
  REQUIRE(kink.exact_saddle);
  CHECK(fixed_point_residual(kink.problem, kink.exact_saddle->first, kink.exact_saddle->second) <= 1e-14);

  cfg.toy_a = {1.0, 0.0, 1.0};
  CHECK_THROWS_AS(build_scalar_toy(cfg), ConfigError);
  cfg.toy_a = {1.0, 1.0};
  CHECK_THROWS_AS(build_scalar_toy(cfg), ConfigError);
}

TEST_CASE("shipped configs load and plan") {
  for (const auto& entry : std::filesystem::directory_iterator(SPDHG_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    const auto doc = Config::load(entry.path());
    if (!doc.has("experiment")) continue;  // planner-only profiles
    CAPTURE(entry.path().string());
    auto cfg = experiment_config(doc);
    if (cfg.experiment != ExperimentId::scalar_toy) cfg.rows = cfg.cols = 16;
    const auto e = build_experiment(cfg);
    const auto plan = make_plan(cfg, e.problem);
    CHECK(plan.variant == cfg.variant);
    CHECK(plan.tau > 0.0);
  }
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(from_text("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(from_text("experiment = \"radio\"\n"), ConfigError);
  CHECK_THROWS_AS(from_text("experiment = \"pet_tv\"\n[problem]\nsizee = 3\n"), ConfigError);
  CHECK_THROWS_AS(from_text("experiment = \"pet_tv\"\n[run]\ncheckpoints = \"often\"\n"), ConfigError);
  CHECK_THROWS_AS(from_text("experiment = \"pet_tv\"\n[solver]\nvariant = \"fast\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_scale("huge"), ConfigError);
  CHECK(parse_experiment("huber_deblur") == ExperimentId::huber_deblur);

  const auto c = from_text("experiment = \"tv_denoise\"\n[problem]\nsize = [8, 12]\n");
  CHECK(c.rows == 8);
  CHECK(c.cols == 12);
  CHECK(c.name == "tv_denoise");

  try {
    from_text("experiment = \"pet_tv\"\n\n[run]\nseeds = 2\nsedes = 3\n");
    FAIL("typo accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.toml:5") != std::string::npos);
  }
}

TEST_CASE("plans from configs") {
  auto cfg = default_config(ExperimentId::scalar_toy);
  const auto e = build_scalar_toy(cfg);
  cfg.variant = Variant::linear;
  cfg.sampling.kind = "full";
  const auto full = make_plan(cfg, e.problem);
  CHECK(full.theta < 1.0);
  CHECK(full.theta == doctest::Approx(1.0 / (1.0 + 2.0 * full.tau * e.problem.mu_g())));

  cfg.sampling.kind = "serial";
  cfg.planner = "optimal";
  const auto opt = make_plan(cfg, e.problem);
  CHECK(opt.sampling.kind() == SamplingKind::serial);
  CHECK_FALSE(opt.sampling.is_uniform());

  cfg.variant = Variant::plain;
  CHECK_THROWS_AS(make_plan(cfg, e.problem), ConfigError);

  cfg.planner = "explicit";
  cfg.tau = 0.1;
  cfg.sigma = {0.1};
  const auto ex = make_plan(cfg, e.problem);
  CHECK(ex.sigma == Vector(4, 0.1));
  cfg.tau = 10.0;
  CHECK_THROWS_AS(make_plan(cfg, e.problem), ConfigError);

  cfg.planner = "recipe";
  cfg.sampling.kind = "arbitrary";
  cfg.sampling.atoms = {{0, 1}, {2, 3}};
  cfg.sampling.atom_probabilities = {0.5, 0.5};
  CHECK_THROWS_AS(make_plan(cfg, e.problem), UnsupportedSamplingError);
  cfg.sampling.kind = "weird";
  CHECK_THROWS_AS(make_plan(cfg, e.problem), ConfigError);
}
