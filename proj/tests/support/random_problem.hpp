#pragma once

// Random sparse saddle problems paired with dense oracle data for the same problem.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "oracles.hpp"
#include "spdhg/random.hpp"
#include "spdhg/solvers.hpp"

namespace fixture {

using namespace spdhg;

using DenseProx = std::function<Vector(double, const Vector&)>;

inline DenseProx soft_threshold(double a) {
  return [a](double t, const Vector& z) {
    Vector x(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) x[j] = std::copysign(std::max(std::abs(z[j]) - t * a, 0.0), z[j]);
    return x;
  };
}

// prox of sigma (alpha/2 ||y||^2 + <y, b>)
inline DenseProx sq_conj(Vector b, double alpha) {
  return [b = std::move(b), alpha](double s, const Vector& z) {
    Vector y(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) y[j] = (z[j] - s * b[j]) / (1.0 + s * alpha);
    return y;
  };
}

struct Random {
  SaddleProblem problem;
  std::vector<oracle::Dense> dense;
  DenseProx g;
  std::vector<DenseProx> fconj;
};

inline Random random_problem(std::size_t n, std::size_t d, Rng& rng) {
  Random r;
  std::vector<LinearOpPtr> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = 2 + i % 3;
    std::vector<Triplet> t;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < d; ++c)
        if (rng.uniform() < 0.7) t.push_back({a, c, rng.normal()});
    t.push_back({0, i % d, 1.0});
    rows.push_back(sparse_matrix_op(t, Shape{d}, Shape{m}));
    r.dense.push_back(oracle::dense_forward(*rows.back()));
    Vector b(m);
    for (double& v : b) v = rng.normal();
    const double alpha = rng.uniform(0.5, 2.0);
    r.problem.f_conj.push_back(sq_l2_datafit(b, alpha).conjugate);
    r.fconj.push_back(sq_conj(b, alpha));
  }
  r.problem.A = BlockOperator(rows);
  if (rng.uniform() < 0.5) {
    r.problem.g = l1_norm(0.3).primal;
    r.g = soft_threshold(0.3);
  } else {
    r.problem.g = box_indicator(-0.5, 0.5);
    r.g = [](double, const Vector& z) {
      Vector x(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) x[j] = std::clamp(z[j], -0.5, 0.5);
      return x;
    };
  }
  return r;
}

inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace fixture
