#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>

#include "spdhg/blockspace.hpp"

namespace spdhg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Proper convex lower-semicontinuous function with a computable prox.
///
/// value() may return +inf. prox(sigma, z) = argmin_x 1/(2 sigma)||x - z||^2 + f(x).
/// dimension() == 0 means the function acts componentwise on any length.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  double value(std::span<const double> x) const;
  void prox(double sigma, std::span<const double> z, std::span<double> out) const;
  Vector prox(double sigma, std::span<const double> z) const;

  /// Strong convexity modulus.
  virtual double mu() const noexcept { return 0.0; }
  virtual std::size_t dimension() const noexcept { return 0; }
  virtual std::string describe() const = 0;
  /// Drop any internal warm-start state.
  virtual void reset_state() const {}
  /// Internal warm-start state (empty for stateless functions), e.g. to persist with a reference.
  virtual Vector warm_state() const { return {}; }
  virtual void set_warm_state(Vector) const {}

 protected:
  virtual double do_value(std::span<const double> x) const = 0;
  virtual void do_prox(double sigma, std::span<const double> z, std::span<double> out) const = 0;

 private:
  void check_size(std::size_t n) const;
};

using ProxPtr = std::shared_ptr<const ProxFunction>;

struct ConjugatePair {
  ProxPtr primal;
  ProxPtr conjugate;
};

/// f = 0
ProxPtr zero_function();
/// f = indicator of {0}
ProxPtr zero_indicator();

/// 1/(2 alpha) ||x - b||^2 and its conjugate alpha/2 ||y||^2 + <y, b>.
ConjugatePair sq_l2_datafit(Vector b, double alpha);
/// alpha ||x||_1 and the indicator of ||y||_inf <= alpha.
ConjugatePair l1_norm(double alpha);
/// Indicator of lo <= x_j <= hi; either bound may be infinite.
ProxPtr box_indicator(double lo, double hi);

/// Poisson log-likelihood distance sum_j x_j + r_j - b_j + b_j log(b_j / (x_j + r_j)).
ConjugatePair kl(Vector b, Vector r);
ProxPtr kl_conjugate(Vector b, Vector r);

/// KL continued by its second-order expansion at x_j = 0 for x_j < 0; needs b, r > 0.
ConjugatePair smoothed_kl(Vector b, Vector r);
ProxPtr smoothed_kl_conjugate(Vector b, Vector r);

/// alpha * sum_j hub(x_j) with hub(t) = |t| for |t| > eta and t^2/(2 eta) + eta/2 otherwise.
ConjugatePair huber(double alpha, double eta);
ProxPtr huber_conjugate(double alpha, double eta);

/// Isotropic total variation alpha ||grad x||_{1,2} (plus x >= 0 when nonneg) on a 2-D grid.
/// The prox runs `iters` FGP iterations on the dual, warm-started from the previous call.
class TvProxFgp final : public ProxFunction {
 public:
  TvProxFgp(Shape shape, double alpha, bool nonneg, int iters);

  double mu() const noexcept override { return 0.0; }
  std::size_t dimension() const noexcept override { return shape_.size(); }
  std::string describe() const override;
  void reset_state() const override;
  Vector warm_state() const override { return dual_; }
  void set_warm_state(Vector state) const override { set_dual_state(std::move(state)); }

  double alpha() const noexcept { return alpha_; }
  const Shape& shape() const noexcept { return shape_; }
  /// Dual state (p_h, p_v) from the last prox call; empty before the first call.
  const Vector& dual_state() const noexcept { return dual_; }
  void set_dual_state(Vector state) const;

  /// sum_j sqrt((D_h x)_j^2 + (D_v x)_j^2) without alpha or constraints.
  double tv(std::span<const double> x) const;

 protected:
  double do_value(std::span<const double> x) const override;
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override;

 private:
  Shape shape_;
  double alpha_;
  bool nonneg_;
  int iters_;
  mutable Vector dual_;
};

std::shared_ptr<const TvProxFgp> tv_prox_fgp(Shape shape, double alpha, bool nonneg, int iters = 20);

/// base + mu/2 ||x||^2
ProxPtr add_sq_l2(ProxPtr base, double mu);
/// x -> base(x) + <c, x>
ProxPtr add_linear(ProxPtr base, Vector c);
/// x -> base(x - b)
ProxPtr translate(ProxPtr base, Vector b);

/// prox of f* from the prox of f: z - sigma prox_{f/sigma}(z/sigma).
Vector moreau_conjugate_prox(const ProxFunction& f, double sigma, std::span<const double> z);

}  // namespace spdhg
