#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>

#include "spdhg/diagnostics.hpp"
#include "spdhg/errors.hpp"
#include "spdhg/planner.hpp"

using namespace spdhg;

namespace {

// sum_i 1/2 (x - b_i)^2 + 1/2 x^2 with A_i = 1. Both Bregman distances are half squared distances.
SaddleProblem quadratic_toy(const Vector& b) {
  SaddleProblem p;
  std::vector<LinearOpPtr> rows;
  for (double bi : b) {
    rows.push_back(std::make_shared<IdentityOp>(Shape{1}));
    const auto pair = sq_l2_datafit(Vector{bi}, 1.0);
    p.f_conj.push_back(pair.conjugate);
    p.f.push_back(pair.primal);
  }
  p.A = BlockOperator(rows);
  p.g = add_sq_l2(zero_function(), 1.0);
  return p;
}

SaddleReference exact_toy_reference(const SaddleProblem& p, const Vector& b) {
  double xs = 0.0;
  for (double v : b) xs += v;
  xs /= static_cast<double>(b.size() + 1);
  std::vector<Vector> y;
  for (double v : b) y.push_back({xs - v});
  return make_reference(p, Vector{xs}, BlockVector::from_blocks(y));
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "spdhg_test_diagnostics";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("rate fits recover known rates") {
  std::vector<double> k, a, b, c;
  for (int j = 1; j <= 200; ++j) {
    k.push_back(j);
    a.push_back(7.0 / j);
    b.push_back(3.0 / (static_cast<double>(j) * j));
    c.push_back(5.0 * std::pow(0.9, j));
  }
  const auto fa = fit_rate(k, a, RateMode::polynomial);
  CHECK(fa.slope == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(fa.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-10));
  CHECK(fit_rate(k, b, RateMode::polynomial).slope == doctest::Approx(-2.0).epsilon(1e-10));
  const auto fc = fit_rate(k, c, RateMode::linear);
  CHECK(fc.contraction == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(fc.points == 200);

  const auto window = fit_rate(k, a, RateMode::polynomial, 50, 100);
  CHECK(window.points == 51);

  auto d = a;
  d[3] = 0.0;
  d[4] = std::nan("");
  const auto fd = fit_rate(k, d, RateMode::polynomial);
  CHECK(fd.dropped == 2);
  CHECK_FALSE(fd.warning.empty());
  CHECK(fd.slope == doctest::Approx(-1.0).epsilon(1e-10));

  CHECK_THROWS_AS(fit_rate(std::span(k).first(9), std::span(a).first(9), RateMode::polynomial), DomainError);
  CHECK_THROWS_AS(fit_rate(k, std::span(a).first(10), RateMode::polynomial), StructureError);
}

TEST_CASE("Bregman distances on the quadratic toy") {
  const Vector b{1.0, -2.0, 0.5};
  const auto p = quadratic_toy(b);
  const auto ref = exact_toy_reference(p, b);
  CHECK(fixed_point_residual(p, ref.x, ref.y) <= 1e-14);

  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector x{rng.normal()};
    std::vector<Vector> yb;
    double dy = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      yb.push_back({rng.normal()});
      dy += 0.5 * (yb[i][0] - ref.y.block(i)[0]) * (yb[i][0] - ref.y.block(i)[0]);
    }
    const auto y = BlockVector::from_blocks(yb);
    const double dx = 0.5 * (x[0] - ref.x[0]) * (x[0] - ref.x[0]);
    CHECK(dist_G(x, ref, p) == doctest::Approx(dx).epsilon(1e-12));
    CHECK(dist_F(y, ref, p) == doctest::Approx(dy).epsilon(1e-12));
    CHECK(bregman_gap(x, y, ref, p) == doctest::Approx(dx + dy).epsilon(1e-12));

    const Vector ones{1.0, 1.0, 1.0};
    CHECK(dist_F_p(y, ref, p, ones) == 0.0);
    const Vector halves{0.5, 0.5, 0.5};
    CHECK(dist_F_p(y, ref, p, halves) == doctest::Approx(dy).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dist_F(BlockVector::from_blocks({{1.0}}), ref, p), StructureError);
}

TEST_CASE("convergence constant") {
  const Vector b{1.0, -2.0};
  const auto p = quadratic_toy(b);
  const auto ref = exact_toy_reference(p, b);  // x# = -1/3, y# = (-4/3, 5/3)
  const Vector x0{0.0};
  const auto y0 = BlockVector::from_blocks({{0.0}, {0.0}});
  const Vector sigma{0.5, 0.25}, prob{0.5, 0.5};
  const double tau = 0.2;
  // 1/2 (1/9)/0.2 + 1/2 (16/9)/(0.25) + 1/2 (25/9)/(0.125) + F(y0) with F_i = 1/2 (y#_i)^2
  const double expect = 0.5 / 9.0 / 0.2 + 0.5 * 16.0 / 9.0 / 0.25 + 0.5 * 25.0 / 9.0 / 0.125 + 0.5 * (16.0 + 25.0) / 9.0;
  CHECK(theorem1_constant(x0, y0, ref, p, tau, sigma, prob) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("metric distances") {
  const Vector b{1.0, -2.0};
  const auto p = quadratic_toy(b);
  const auto ref = exact_toy_reference(p, b);
  const Vector x{ref.x[0] + 1.0};
  const auto y = BlockVector::from_blocks({{ref.y.block(0)[0] + 1.0}, {ref.y.block(1)[0]}});

  StepPlan plain{Variant::plain, 1.0, {1.0, 1.0}, 1.0, 0.0, Sampling::uniform_serial(2), {}};
  const auto m0 = metric_distances(x, y, ref, p, plain);
  REQUIRE(m0.size() == 2);
  CHECK(m0[0].second == doctest::Approx(1.0));
  CHECK(m0[1].second == doctest::Approx(1.0));

  // tau = 1 and mu_g = 1 give the primal weight 1/tau + 2 mu_g = 3.
  StepPlan lin{Variant::linear, 1.0, {1.0, 1.0}, 0.9, 0.0, Sampling::uniform_serial(2), {}};
  const auto m1 = metric_distances(x, y, ref, p, lin, 0.5);
  REQUIRE(m1.size() == 5);
  CHECK(m1[2].first == "primal_dist_X");
  CHECK(m1[2].second == doctest::Approx(3.0));
  CHECK(m1[3].second == doctest::Approx((1.0 + 2.0) / 0.5));
  CHECK(m1[4].second == doctest::Approx((1.0 - 0.45) * 3.0 + 6.0));

  StepPlan da{Variant::dual_accel, 1.0, {}, 1.0, 0.25, Sampling::uniform_serial(2), {}};
  const auto m2 = metric_distances(x, y, ref, p, da);
  REQUIRE(m2.size() == 3);
  const double sig0 = 0.25 / (0.5 - 0.25);
  CHECK(m2[2].second == doctest::Approx(1.0 / (0.5 * sig0) + 2.0));
}

TEST_CASE("reference computation and persistence") {
  const Vector b{1.0, -2.0, 0.5};
  const auto p = quadratic_toy(b);
  ReferenceOptions opt;
  opt.tolerance = 1e-11;
  const auto ref = compute_reference(p, opt);
  CHECK(ref.residual <= 1e-11);
  CHECK(ref.x[0] == doctest::Approx(-0.5 / 4.0).epsilon(1e-9));
  CHECK(ref.objective == doctest::Approx(p.objective(ref.x)).epsilon(1e-12));

  auto with_state = ref;
  with_state.g_state = {1.5, -2.5, 3.5};
  const auto stem = scratch("toy");
  save_reference(with_state, stem);
  const auto back = load_reference(p, stem, 1e-9);
  CHECK(back.x == with_state.x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.y.data(i) == with_state.y.data(i));
  CHECK(back.g_state == with_state.g_state);
  CHECK(back.iterations == with_state.iterations);

  auto off = ref;
  off.x[0] += 0.1;
  const auto bad = scratch("off");
  save_reference(off, bad);
  CHECK_THROWS_AS(load_reference(p, bad, 1e-9), ConfigError);
  CHECK_THROWS_AS(load_reference(quadratic_toy({1.0}), stem, 1e-9), StructureError);
  CHECK_THROWS(load_reference(p, scratch("missing"), 1e-9));
  std::filesystem::remove_all(stem.parent_path());
}
