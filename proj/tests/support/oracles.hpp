#pragma once

// Independent reference implementations used to check the library. Nothing here calls
// the solver, planner or prox code under test except to read values back.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/operators.hpp"
#include "spdhg/prox.hpp"

namespace oracle {

using spdhg::Vector;

struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector a;  // row-major
  double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
};

// Columns from apply(e_j).
inline Dense dense_forward(const spdhg::LinearOp& op) {
  Dense m{op.out_shape().size(), op.in_shape().size(), {}};
  m.a.assign(m.rows * m.cols, 0.0);
  Vector e(m.cols, 0.0);
  for (std::size_t c = 0; c < m.cols; ++c) {
    e[c] = 1.0;
    const Vector col = op.apply(e);
    for (std::size_t r = 0; r < m.rows; ++r) m(r, c) = col[r];
    e[c] = 0.0;
  }
  return m;
}

// Rows of the forward matrix from adjoint(e_i); equals dense_forward for an exact adjoint.
inline Dense dense_from_adjoint(const spdhg::LinearOp& op) {
  Dense m{op.out_shape().size(), op.in_shape().size(), {}};
  m.a.assign(m.rows * m.cols, 0.0);
  Vector e(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    e[r] = 1.0;
    const Vector row = op.adjoint(e);
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = row[c];
    e[r] = 0.0;
  }
  return m;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.a.size(); ++j) d = std::max(d, std::abs(a.a[j] - b.a[j]));
  return d;
}

inline Vector matvec(const Dense& m, std::span<const double> x) {
  Vector y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) y[r] += m(r, c) * x[c];
  return y;
}

inline Vector matvec_t(const Dense& m, std::span<const double> y) {
  Vector x(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) x[c] += m(r, c) * y[r];
  return x;
}

// Largest singular value by Jacobi eigenvalues of M^T M (small matrices only).
inline double spectral_norm(const Dense& m) {
  const std::size_t n = m.cols;
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < m.rows; ++r) s[i * n + j] += m(r, i) * m(r, j);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += s[p * n + q] * s[p * n + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double t0 = (s[q * n + q] - s[p * n + p]) / (2.0 * apq);
        const double t = (t0 >= 0 ? 1.0 : -1.0) / (std::abs(t0) + std::sqrt(1.0 + t0 * t0));
        const double c = 1.0 / std::sqrt(1.0 + t * t), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s[k * n + p], skq = s[k * n + q];
          s[k * n + p] = c * skp - sn * skq;
          s[k * n + q] = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s[p * n + k], sqk = s[q * n + k];
          s[p * n + k] = c * spk - sn * sqk;
          s[q * n + k] = sn * spk + c * sqk;
        }
      }
    }
  }
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, s[i * n + i]);
  return std::sqrt(mx);
}

// ||[D_h; D_v]|| for forward differences with Neumann ends on an m x n grid:
// the squared norm is the top eigenvalue of the graph Laplacian, a sum of two 1-D ones.
inline double gradient_norm(std::size_t m, std::size_t n) {
  const auto lam = [](std::size_t k) {
    if (k < 2) return 0.0;
    const double s = std::sin(std::numbers::pi * static_cast<double>(k - 1) / (2.0 * static_cast<double>(k)));
    return 4.0 * s * s;
  };
  return std::sqrt(lam(m) + lam(n));
}

// Minimiser of a convex function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Prox of a separable function by minimising coordinate j of 1/(2 sigma)||x - z||^2 + f(x)
// over [lo_j, hi_j] with the other coordinates held fixed.
inline Vector numeric_prox(const spdhg::ProxFunction& f, double sigma, std::span<const double> z,
                           std::span<const double> lo, std::span<const double> hi) {
  // Start every coordinate inside its domain so the other terms stay finite.
  Vector x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double pad = 1e-6 * (hi[j] - lo[j]);
    x[j] = std::clamp(z[j], lo[j] + pad, hi[j] - pad);
  }
  Vector probe = x;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const auto obj = [&](double t) {
      probe[j] = t;
      const double v = f.value(probe);
      return (t - z[j]) * (t - z[j]) / (2.0 * sigma) + v;
    };
    x[j] = golden_min(obj, lo[j], hi[j]);
    probe[j] = x[j];
  }
  return x;
}

// Textbook PDHG on dense blocks with caller-supplied proxes:
// x+ = prox_tau g(x - tau A^T ybar), y_i+ = prox_{sigma_i f_i^*}(y_i + sigma_i A_i x+), ybar = 2 y+ - y.
struct DensePdhg {
  std::vector<Dense> blocks;
  std::function<Vector(double, const Vector&)> prox_g;
  std::vector<std::function<Vector(double, const Vector&)>> prox_fconj;
  double tau = 0.0;
  Vector sigma;

  Vector x;
  std::vector<Vector> y, ybar;

  void start(std::size_t d) {
    x.assign(d, 0.0);
    y.clear();
    for (const auto& b : blocks) y.emplace_back(b.rows, 0.0);
    ybar = y;
  }
  void step() {
    Vector aty(x.size(), 0.0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const Vector t = matvec_t(blocks[i], ybar[i]);
      for (std::size_t j = 0; j < x.size(); ++j) aty[j] += t[j];
    }
    Vector z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = x[j] - tau * aty[j];
    x = prox_g(tau, z);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const Vector ax = matvec(blocks[i], x);
      Vector w(ax.size());
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = y[i][j] + sigma[i] * ax[j];
      const Vector yn = prox_fconj[i](sigma[i], w);
      for (std::size_t j = 0; j < w.size(); ++j) ybar[i][j] = 2.0 * yn[j] - y[i][j];
      y[i] = yn;
    }
  }
};

// Chambolle-Pock on min_x 1/(2 s)||x - z||^2 + alpha TV(x) (+ x >= 0) with explicit
// difference loops; a slow but independent check for the FGP-based TV prox.
inline Vector tv_prox_pdhg(std::size_t rows, std::size_t cols, double alpha, bool nonneg, double s,
                           std::span<const double> z, int iters) {
  const std::size_t n = rows * cols;
  Vector x(z.begin(), z.end()), xbar = x, ph(n, 0.0), pv(n, 0.0);
  const double L = std::sqrt(8.0);
  const double tau = 1.0 / L, sig = 1.0 / L;
  const auto id = [&](std::size_t r, std::size_t c) { return r * cols + c; };
  for (int it = 0; it < iters; ++it) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double gh = c + 1 < cols ? xbar[id(r, c + 1)] - xbar[id(r, c)] : 0.0;
        const double gv = r + 1 < rows ? xbar[id(r + 1, c)] - xbar[id(r, c)] : 0.0;
        double a = ph[id(r, c)] + sig * gh, b = pv[id(r, c)] + sig * gv;
        const double nrm = std::sqrt(a * a + b * b);
        if (nrm > alpha) {
          a *= alpha / nrm;
          b *= alpha / nrm;
        }
        ph[id(r, c)] = a;
        pv[id(r, c)] = b;
      }
    }
    Vector xold = x;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        // -div p
        double d = 0.0;
        if (c + 1 < cols) d -= ph[id(r, c)];
        if (c > 0) d += ph[id(r, c - 1)];
        if (r + 1 < rows) d -= pv[id(r, c)];
        if (r > 0) d += pv[id(r - 1, c)];
        const double v = x[id(r, c)] - tau * d;
        double xn = (v + tau / s * z[id(r, c)]) / (1.0 + tau / s);
        if (nonneg) xn = std::max(xn, 0.0);
        x[id(r, c)] = xn;
      }
    }
    for (std::size_t j = 0; j < n; ++j) xbar[j] = 2.0 * x[j] - xold[j];
  }
  return x;
}

inline double tv_value(std::size_t rows, std::size_t cols, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double gh = c + 1 < cols ? x[r * cols + c + 1] - x[r * cols + c] : 0.0;
      const double gv = r + 1 < rows ? x[(r + 1) * cols + c] - x[r * cols + c] : 0.0;
      s += std::sqrt(gh * gh + gv * gv);
    }
  }
  return s;
}

}  // namespace oracle
