#pragma once

// Every prox in the library with the data a numeric oracle needs: the domain of each
// coordinate and, where the library provides one, the conjugate.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spdhg/prox.hpp"
#include "spdhg/random.hpp"

namespace catalog {

using spdhg::ProxPtr;
using spdhg::Vector;

struct Entry {
  std::string name;
  ProxPtr f;
  ProxPtr conj;  // may be null
  std::size_t dim = 4;
  Vector lo, hi;  // coordinate domain for the oracle search
  double z_scale = 3.0;
};

inline Vector fill(std::size_t n, double v) { return Vector(n, v); }

inline std::vector<Entry> entries() {
  constexpr std::size_t n = 4;
  constexpr double big = 1e3;
  const Vector b{0.5, 2.0, 1.0, 3.0};
  const Vector kb{0.0, 2.0, 1.0, 5.0};  // includes a zero count
  const Vector kr{0.5, 0.0, 1.0, 0.2};
  const Vector sr{0.5, 0.3, 1.0, 2.0};
  std::vector<Entry> out;
  const auto add = [&](std::string name, ProxPtr f, ProxPtr conj, Vector lo, Vector hi) {
    out.push_back({std::move(name), std::move(f), std::move(conj), n, std::move(lo), std::move(hi)});
  };
  const Vector all_lo = fill(n, -big), all_hi = fill(n, big);

  add("zero", spdhg::zero_function(), spdhg::zero_indicator(), all_lo, all_hi);
  add("zero_indicator", spdhg::zero_indicator(), spdhg::zero_function(), fill(n, 0.0), fill(n, 0.0));
  const auto sq = spdhg::sq_l2_datafit(b, 0.7);
  add("sq_l2_datafit", sq.primal, sq.conjugate, all_lo, all_hi);
  add("sq_l2_datafit*", sq.conjugate, sq.primal, all_lo, all_hi);
  const auto l1 = spdhg::l1_norm(1.3);
  add("l1_norm", l1.primal, l1.conjugate, all_lo, all_hi);
  add("l1_norm*", l1.conjugate, l1.primal, fill(n, -1.3), fill(n, 1.3));
  add("box", spdhg::box_indicator(-0.5, 2.0), nullptr, fill(n, -0.5), fill(n, 2.0));

  const auto k = spdhg::kl(kb, kr);
  Vector klo(n);
  for (std::size_t j = 0; j < n; ++j) klo[j] = -kr[j];
  add("kl", k.primal, k.conjugate, klo, all_hi);
  add("kl*", k.conjugate, k.primal, all_lo, fill(n, 1.0));

  const auto sk = spdhg::smoothed_kl(b, sr);
  add("smoothed_kl", sk.primal, sk.conjugate, all_lo, all_hi);
  add("smoothed_kl*", sk.conjugate, sk.primal, all_lo, fill(n, 1.0));

  const auto h = spdhg::huber(0.8, 0.6);
  add("huber", h.primal, h.conjugate, all_lo, all_hi);
  add("huber*", h.conjugate, h.primal, fill(n, -0.8), fill(n, 0.8));

  add("add_sq_l2(box)", spdhg::add_sq_l2(spdhg::box_indicator(0.0, spdhg::kInf), 1.5), nullptr, fill(n, 0.0),
      all_hi);
  add("add_sq_l2(huber)", spdhg::add_sq_l2(h.primal, 0.4), nullptr, all_lo, all_hi);
  add("add_linear(l1)", spdhg::add_linear(l1.primal, b), nullptr, all_lo, all_hi);
  Vector tlo(n), thi(n);
  for (std::size_t j = 0; j < n; ++j) {
    tlo[j] = b[j] - 1.3;
    thi[j] = b[j] + 1.3;
  }
  // The scalar-toy pair: f = |. - b| and f* = box + <., b>.
  add("translate(l1)", spdhg::translate(l1.primal, b), spdhg::add_linear(l1.conjugate, b), all_lo, all_hi);
  add("add_linear(box)", spdhg::add_linear(l1.conjugate, b), spdhg::translate(l1.primal, b), fill(n, -1.3),
      fill(n, 1.3));
  add("translate(box)", spdhg::translate(l1.conjugate, b), nullptr, tlo, thi);
  return out;
}

struct Draw {
  double sigma;
  Vector z;
};

inline Draw draw(spdhg::Rng& rng, std::size_t n, double z_scale) {
  Draw d;
  d.sigma = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
  d.z.resize(n);
  for (double& v : d.z) v = rng.uniform(-z_scale, z_scale);
  return d;
}

inline double max_diff(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

struct Errors {
  double oracle = 0.0;           // max |prox - numeric argmin|
  double moreau = 0.0;           // max |prox_f(z) + sigma prox_{f*/sigma}(z/sigma) - z|
  double fenchel_young = 0.0;    // |f(p) + f*(y) - <p, y>| at y = (z - p)/sigma
  double nonexpansive = 0.0;     // max of ||Pu - Pv||^2 - <Pu - Pv, u - v>, should be <= 0
};

// Runs `trials` random (sigma, z) for one entry.
inline Errors check(const Entry& e, int trials, spdhg::Rng& rng) {
  Errors err;
  for (int t = 0; t < trials; ++t) {
    const Draw d = draw(rng, e.dim, e.z_scale);
    const Vector p = e.f->prox(d.sigma, d.z);
    const Vector q = oracle::numeric_prox(*e.f, d.sigma, d.z, e.lo, e.hi);
    err.oracle = std::max(err.oracle, max_diff(p, q));

    if (e.conj) {
      Vector w(e.dim);
      for (std::size_t j = 0; j < e.dim; ++j) w[j] = d.z[j] / d.sigma;
      const Vector c = e.conj->prox(1.0 / d.sigma, w);
      Vector sum(e.dim);
      for (std::size_t j = 0; j < e.dim; ++j) sum[j] = p[j] + d.sigma * c[j];
      err.moreau = std::max(err.moreau, max_diff(sum, d.z));

      Vector y(e.dim);
      for (std::size_t j = 0; j < e.dim; ++j) y[j] = (d.z[j] - p[j]) / d.sigma;
      const double fy = e.f->value(p) + e.conj->value(y) - spdhg::dot(p, y);
      err.fenchel_young = std::max(err.fenchel_young, std::abs(fy) / (1.0 + std::abs(e.f->value(p))));
    }

    const Draw d2 = draw(rng, e.dim, e.z_scale);
    const Vector p2 = e.f->prox(d.sigma, d2.z);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < e.dim; ++j) {
      lhs += (p[j] - p2[j]) * (p[j] - p2[j]);
      rhs += (p[j] - p2[j]) * (d.z[j] - d2.z[j]);
    }
    err.nonexpansive = std::max(err.nonexpansive, lhs - rhs);
  }
  return err;
}

// Value and one-sided derivatives of the smoothed KL at the branch point x = 0 and of its
// conjugate at y = 1 - b/r; returns the largest jump.
struct Continuity {
  double value_jump = 0.0;
  double slope_jump = 0.0;
  double prox_jump = 0.0;
};

inline Continuity smoothed_kl_continuity() {
  Continuity c;
  const Vector bs{0.5, 1.0, 4.0}, rs{0.3, 1.0, 2.5};
  for (double b : bs) {
    for (double r : rs) {
      const auto pair = spdhg::smoothed_kl(Vector{b}, Vector{r});
      const auto f = [&](const spdhg::ProxFunction& g, double x) { return g.value(Vector{x}); };
      // Second-order one-sided differences.
      const double h = 1e-5;
      const auto dleft = [&](const spdhg::ProxFunction& g, double x) {
        return (3.0 * f(g, x) - 4.0 * f(g, x - h) + f(g, x - 2.0 * h)) / (2.0 * h);
      };
      const auto dright = [&](const spdhg::ProxFunction& g, double x) {
        return (-3.0 * f(g, x) + 4.0 * f(g, x + h) - f(g, x + 2.0 * h)) / (2.0 * h);
      };
      const double left = f(*pair.primal, -1e-12), right = f(*pair.primal, 1e-12);
      c.value_jump = std::max(c.value_jump, std::abs(left - right));
      c.slope_jump = std::max(c.slope_jump, std::abs(dleft(*pair.primal, 0.0) - dright(*pair.primal, 0.0)));
      const double s = 1.0 - b / r;
      const double cl = f(*pair.conjugate, s - 1e-12), cr = f(*pair.conjugate, s + 1e-12);
      c.value_jump = std::max(c.value_jump, std::abs(cl - cr));
      c.slope_jump = std::max(c.slope_jump, std::abs(dleft(*pair.conjugate, s) - dright(*pair.conjugate, s)));
      // prox branches meet at z = 1 - b/r
      for (double sigma : {0.1, 1.0, 7.0}) {
        const double pl = pair.conjugate->prox(sigma, Vector{s - 1e-12})[0];
        const double pr = pair.conjugate->prox(sigma, Vector{s + 1e-12})[0];
        c.prox_jump = std::max(c.prox_jump, std::abs(pl - pr));
      }
    }
  }
  return c;
}

}  // namespace catalog
