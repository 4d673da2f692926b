#include "spdhg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdhg/errors.hpp"
#include "spdhg/operators.hpp"

namespace spdhg {

double ProxFunction::value(std::span<const double> x) const {
  check_size(x.size());
  return do_value(x);
}

void ProxFunction::prox(double sigma, std::span<const double> z, std::span<double> out) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("prox step must be positive and finite");
  check_size(z.size());
  if (out.size() != z.size()) throw StructureError("prox: output length mismatch");
  do_prox(sigma, z, out);
}

Vector ProxFunction::prox(double sigma, std::span<const double> z) const {
  Vector out(z.size());
  prox(sigma, z, out);
  return out;
}

void ProxFunction::check_size(std::size_t n) const {
  const std::size_t d = dimension();
  if (d != 0 && d != n) {
    throw StructureError(describe() + ": expected length " + std::to_string(d) + ", got " + std::to_string(n));
  }
}

namespace {

// Slack for membership tests so that averages of feasible points stay feasible.
bool within(double v, double lo, double hi) {
  const double tol_lo = std::isfinite(lo) ? 1e-12 * std::max(1.0, std::fabs(lo)) : 0.0;
  const double tol_hi = std::isfinite(hi) ? 1e-12 * std::max(1.0, std::fabs(hi)) : 0.0;
  return v >= lo - tol_lo && v <= hi + tol_hi;
}

void require_nonneg(std::span<const double> v, const char* what) {
  for (double e : v) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError(std::string(what) + " must be finite and >= 0");
  }
}

void require_positive(std::span<const double> v, const char* what) {
  for (double e : v) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DomainError(std::string(what) + " must be finite and > 0");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be finite and > 0");
}

void require_same_length(const Vector& b, const Vector& r) {
  if (b.size() != r.size()) throw StructureError("data and background lengths differ");
  if (b.empty()) throw StructureError("data vector is empty");
}

class ZeroFunction final : public ProxFunction {
 public:
  std::string describe() const override { return "zero"; }

 protected:
  double do_value(std::span<const double>) const override { return 0.0; }
  void do_prox(double, std::span<const double> z, std::span<double> out) const override {
    std::copy(z.begin(), z.end(), out.begin());
  }
};

class ZeroIndicator final : public ProxFunction {
 public:
  std::string describe() const override { return "indicator{0}"; }

 protected:
  double do_value(std::span<const double> x) const override {
    for (double v : x) {
      if (v != 0.0) return kInf;
    }
    return 0.0;
  }
  void do_prox(double, std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
};

class SqDatafit final : public ProxFunction {
 public:
  SqDatafit(Vector b, double alpha) : b_(std::move(b)), alpha_(alpha) {}
  double mu() const noexcept override { return 1.0 / alpha_; }
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "sq_l2_datafit"; }

 protected:
  double do_value(std::span<const double> x) const override { return 0.5 * dist_sq(x, b_) / alpha_; }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = (alpha_ * z[j] + sigma * b_[j]) / (alpha_ + sigma);
  }

 private:
  Vector b_;
  double alpha_;
};

class SqDatafitConj final : public ProxFunction {
 public:
  SqDatafitConj(Vector b, double alpha) : b_(std::move(b)), alpha_(alpha) {}
  double mu() const noexcept override { return alpha_; }
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "sq_l2_datafit*"; }

 protected:
  double do_value(std::span<const double> y) const override { return 0.5 * alpha_ * norm_sq(y) + dot(y, b_); }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = (z[j] - sigma * b_[j]) / (1.0 + sigma * alpha_);
  }

 private:
  Vector b_;
  double alpha_;
};

class L1Norm final : public ProxFunction {
 public:
  explicit L1Norm(double alpha) : alpha_(alpha) {}
  std::string describe() const override { return "l1_norm"; }

 protected:
  double do_value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) s += std::fabs(v);
    return alpha_ * s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    const double t = alpha_ * sigma;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double a = std::fabs(z[j]) - t;
      out[j] = a > 0.0 ? std::copysign(a, z[j]) : 0.0;
    }
  }

 private:
  double alpha_;
};

class Box final : public ProxFunction {
 public:
  Box(double lo, double hi) : lo_(lo), hi_(hi) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "box[" << lo_ << ", " << hi_ << "]";
    return os.str();
  }

 protected:
  double do_value(std::span<const double> x) const override {
    for (double v : x) {
      if (!within(v, lo_, hi_)) return kInf;
    }
    return 0.0;
  }
  void do_prox(double, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::clamp(z[j], lo_, hi_);
  }

 private:
  double lo_;
  double hi_;
};

class KlPrimal final : public ProxFunction {
 public:
  KlPrimal(Vector b, Vector r) : b_(std::move(b)), r_(std::move(r)) {}
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "kl"; }

 protected:
  double do_value(std::span<const double> x) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double t = x[j] + r_[j];
      if (b_[j] > 0.0) {
        if (!(t > 0.0)) return kInf;
        s += t - b_[j] + b_[j] * std::log(b_[j] / t);
      } else {
        if (!within(x[j], -r_[j], kInf)) return kInf;
        s += std::max(t, 0.0);
      }
    }
    return s;
  }
  // t = x + r solves t^2 - s t - sigma b = 0 with s = z + r - sigma.
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double s = z[j] + r_[j] - sigma;
      const double c = std::sqrt(s * s + 4.0 * sigma * b_[j]);
      double t;
      if (s >= 0.0) {
        t = 0.5 * (s + c);
      } else {
        t = c - s > 0.0 ? 2.0 * sigma * b_[j] / (c - s) : 0.0;
      }
      out[j] = t - r_[j];
    }
  }

 private:
  Vector b_;
  Vector r_;
};

class KlConjugate final : public ProxFunction {
 public:
  KlConjugate(Vector b, Vector r) : b_(std::move(b)), r_(std::move(r)) {}
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "kl*"; }

 protected:
  double do_value(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (b_[j] > 0.0) {
        if (!(y[j] < 1.0)) return kInf;
        s += -y[j] * r_[j] - b_[j] * std::log1p(-y[j]);
      } else {
        if (!within(y[j], -kInf, 1.0)) return kInf;
        s += -y[j] * r_[j];
      }
    }
    return s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double w = z[j] + sigma * r_[j];
      const double c = std::sqrt((w - 1.0) * (w - 1.0) + 4.0 * sigma * b_[j]);
      if (b_[j] > 0.0) {
        const double v = w + 1.0 > 0.0 ? 2.0 * (w - sigma * b_[j]) / (w + 1.0 + c) : 0.5 * (w + 1.0 - c);
        out[j] = std::min(v, std::nextafter(1.0, 0.0));  // rounding must not leave the domain
      } else {
        out[j] = std::min(w, 1.0);
      }
    }
  }

 private:
  Vector b_;
  Vector r_;
};

class SmoothedKlConjugate final : public ProxFunction {
 public:
  SmoothedKlConjugate(Vector b, Vector r) : b_(std::move(b)), r_(std::move(r)) {
    mu_ = kInf;
    for (std::size_t j = 0; j < b_.size(); ++j) mu_ = std::min(mu_, r_[j] * r_[j] / b_[j]);
  }
  double mu() const noexcept override { return mu_; }
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "smoothed_kl*"; }

 protected:
  double do_value(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double b = b_[j];
      const double r = r_[j];
      const double v = y[j];
      if (!(v < 1.0)) return kInf;
      if (v < 1.0 - b / r) {
        const double q = r * r / b;
        s += 0.5 * q * v * v + (r - q) * v + 0.5 * q + 1.5 * b - 2.0 * r - b * std::log(b / r);
      } else {
        s += -r * v - b * std::log1p(-v);
      }
    }
    return s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double b = b_[j];
      const double r = r_[j];
      if (z[j] < 1.0 - b / r) {
        out[j] = (b * z[j] - sigma * r * b + sigma * r * r) / (b + sigma * r * r);
      } else {
        const double w = z[j] + sigma * r;
        const double c = std::sqrt((w - 1.0) * (w - 1.0) + 4.0 * sigma * b);
        const double v = w + 1.0 > 0.0 ? 2.0 * (w - sigma * b) / (w + 1.0 + c) : 0.5 * (w + 1.0 - c);
        out[j] = std::min(v, std::nextafter(1.0, 0.0));
      }
    }
  }

 private:
  Vector b_;
  Vector r_;
  double mu_;
};

class SmoothedKl final : public ProxFunction {
 public:
  SmoothedKl(Vector b, Vector r) : b_(b), r_(r), conj_(std::move(b), std::move(r)) {}
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return "smoothed_kl"; }

 protected:
  double do_value(std::span<const double> x) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double b = b_[j];
      const double r = r_[j];
      const double v = x[j];
      if (v >= 0.0) {
        s += v + r - b + b * std::log(b / (v + r));
      } else {
        s += 0.5 * b / (r * r) * v * v + (1.0 - b / r) * v + r - b + b * std::log(b / r);
      }
    }
    return s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    // prox_{sigma f}(z) = z - sigma prox_{f*/sigma}(z/sigma)
    Vector w(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] / sigma;
    const Vector c = conj_.prox(1.0 / sigma, w);
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] - sigma * c[j];
  }

 private:
  Vector b_;
  Vector r_;
  SmoothedKlConjugate conj_;
};

class Huber final : public ProxFunction {
 public:
  Huber(double alpha, double eta) : alpha_(alpha), eta_(eta) {}
  std::string describe() const override { return "huber"; }

 protected:
  double do_value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) {
      const double a = std::fabs(v);
      s += a > eta_ ? a : 0.5 * a * a / eta_ + 0.5 * eta_;
    }
    return alpha_ * s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    const double t = sigma * alpha_;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double a = std::fabs(z[j]);
      out[j] = a <= eta_ + t ? z[j] / (1.0 + t / eta_) : std::copysign(a - t, z[j]);
    }
  }

 private:
  double alpha_;
  double eta_;
};

class HuberConjugate final : public ProxFunction {
 public:
  HuberConjugate(double alpha, double eta) : alpha_(alpha), eta_(eta) {}
  double mu() const noexcept override { return eta_ / alpha_; }
  std::string describe() const override { return "huber*"; }

 protected:
  double do_value(std::span<const double> y) const override {
    double s = 0.0;
    for (double v : y) {
      if (!within(v, -alpha_, alpha_)) return kInf;
      s += 0.5 * eta_ / alpha_ * v * v - 0.5 * alpha_ * eta_;
    }
    return s;
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    const double shrink = 1.0 + sigma * eta_ / alpha_;
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::clamp(z[j] / shrink, -alpha_, alpha_);
  }

 private:
  double alpha_;
  double eta_;
};

class AddSqL2 final : public ProxFunction {
 public:
  AddSqL2(ProxPtr base, double mu) : base_(std::move(base)), mu_(mu) {}
  double mu() const noexcept override { return base_->mu() + mu_; }
  std::size_t dimension() const noexcept override { return base_->dimension(); }
  std::string describe() const override { return base_->describe() + " + sq_l2"; }
  void reset_state() const override { base_->reset_state(); }
  Vector warm_state() const override { return base_->warm_state(); }
  void set_warm_state(Vector state) const override { base_->set_warm_state(std::move(state)); }

 protected:
  double do_value(std::span<const double> x) const override {
    const double v = base_->value(x);
    return v == kInf ? kInf : v + 0.5 * mu_ * norm_sq(x);
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    const double s = 1.0 + sigma * mu_;
    Vector w(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] / s;
    base_->prox(sigma / s, w, out);
  }

 private:
  ProxPtr base_;
  double mu_;
};

class AddLinear final : public ProxFunction {
 public:
  AddLinear(ProxPtr base, Vector c) : base_(std::move(base)), c_(std::move(c)) {}
  double mu() const noexcept override { return base_->mu(); }
  std::size_t dimension() const noexcept override { return c_.size(); }
  std::string describe() const override { return base_->describe() + " + linear"; }
  void reset_state() const override { base_->reset_state(); }
  Vector warm_state() const override { return base_->warm_state(); }
  void set_warm_state(Vector state) const override { base_->set_warm_state(std::move(state)); }

 protected:
  double do_value(std::span<const double> x) const override {
    const double v = base_->value(x);
    return v == kInf ? kInf : v + dot(x, c_);
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    Vector w(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] - sigma * c_[j];
    base_->prox(sigma, w, out);
  }

 private:
  ProxPtr base_;
  Vector c_;
};

class Translate final : public ProxFunction {
 public:
  Translate(ProxPtr base, Vector b) : base_(std::move(base)), b_(std::move(b)) {}
  double mu() const noexcept override { return base_->mu(); }
  std::size_t dimension() const noexcept override { return b_.size(); }
  std::string describe() const override { return base_->describe() + " (translated)"; }
  void reset_state() const override { base_->reset_state(); }
  Vector warm_state() const override { return base_->warm_state(); }
  void set_warm_state(Vector state) const override { base_->set_warm_state(std::move(state)); }

 protected:
  double do_value(std::span<const double> x) const override {
    Vector w(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) w[j] = x[j] - b_[j];
    return base_->value(w);
  }
  void do_prox(double sigma, std::span<const double> z, std::span<double> out) const override {
    Vector w(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] - b_[j];
    base_->prox(sigma, w, out);
    for (std::size_t j = 0; j < z.size(); ++j) out[j] += b_[j];
  }

 private:
  ProxPtr base_;
  Vector b_;
};

}  // namespace

ProxPtr zero_function() { return std::make_shared<ZeroFunction>(); }
ProxPtr zero_indicator() { return std::make_shared<ZeroIndicator>(); }

ConjugatePair sq_l2_datafit(Vector b, double alpha) {
  require_positive(alpha, "sq_l2_datafit alpha");
  if (!all_finite(b)) throw DomainError("sq_l2_datafit data must be finite");
  return {std::make_shared<SqDatafit>(b, alpha), std::make_shared<SqDatafitConj>(b, alpha)};
}

ConjugatePair l1_norm(double alpha) {
  require_positive(alpha, "l1_norm alpha");
  return {std::make_shared<L1Norm>(alpha), box_indicator(-alpha, alpha)};
}

ProxPtr box_indicator(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) throw DomainError("box_indicator requires lo < hi");
  return std::make_shared<Box>(lo, hi);
}

ConjugatePair kl(Vector b, Vector r) {
  require_same_length(b, r);
  require_nonneg(b, "kl data");
  require_nonneg(r, "kl background");
  return {std::make_shared<KlPrimal>(b, r), std::make_shared<KlConjugate>(b, r)};
}

ProxPtr kl_conjugate(Vector b, Vector r) { return kl(std::move(b), std::move(r)).conjugate; }

ConjugatePair smoothed_kl(Vector b, Vector r) {
  require_same_length(b, r);
  require_positive(b, "smoothed_kl data");
  require_positive(r, "smoothed_kl background");
  return {std::make_shared<SmoothedKl>(b, r), std::make_shared<SmoothedKlConjugate>(b, r)};
}

ProxPtr smoothed_kl_conjugate(Vector b, Vector r) { return smoothed_kl(std::move(b), std::move(r)).conjugate; }

ConjugatePair huber(double alpha, double eta) {
  require_positive(alpha, "huber alpha");
  require_positive(eta, "huber eta");
  return {std::make_shared<Huber>(alpha, eta), std::make_shared<HuberConjugate>(alpha, eta)};
}

ProxPtr huber_conjugate(double alpha, double eta) { return huber(alpha, eta).conjugate; }

ProxPtr add_sq_l2(ProxPtr base, double mu) {
  if (!base) throw StructureError("add_sq_l2: null base");
  require_positive(mu, "add_sq_l2 mu");
  return std::make_shared<AddSqL2>(std::move(base), mu);
}

ProxPtr add_linear(ProxPtr base, Vector c) {
  if (!base) throw StructureError("add_linear: null base");
  if (base->dimension() != 0 && base->dimension() != c.size()) throw StructureError("add_linear: length mismatch");
  return std::make_shared<AddLinear>(std::move(base), std::move(c));
}

ProxPtr translate(ProxPtr base, Vector b) {
  if (!base) throw StructureError("translate: null base");
  if (base->dimension() != 0 && base->dimension() != b.size()) throw StructureError("translate: length mismatch");
  return std::make_shared<Translate>(std::move(base), std::move(b));
}

Vector moreau_conjugate_prox(const ProxFunction& f, double sigma, std::span<const double> z) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("prox step must be positive and finite");
  Vector w(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] / sigma;
  const Vector p = f.prox(1.0 / sigma, w);
  Vector out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] - sigma * p[j];
  return out;
}

// ---------------------------------------------------------------------------

TvProxFgp::TvProxFgp(Shape shape, double alpha, bool nonneg, int iters)
    : shape_(std::move(shape)), alpha_(alpha), nonneg_(nonneg), iters_(iters) {
  if (shape_.rank() != 2) throw StructureError("tv_prox_fgp requires a 2-D shape");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("tv_prox_fgp alpha must be finite and >= 0");
  if (iters < 1) throw DomainError("tv_prox_fgp needs at least one iteration");
}

std::string TvProxFgp::describe() const { return nonneg_ ? "tv+nonneg" : "tv"; }

void TvProxFgp::reset_state() const { dual_.clear(); }

void TvProxFgp::set_dual_state(Vector state) const {
  if (!state.empty() && state.size() != 2 * shape_.size()) throw StructureError("tv dual state length mismatch");
  dual_ = std::move(state);
}

double TvProxFgp::tv(std::span<const double> x) const {
  const std::size_t rows = shape_.rows();
  const std::size_t cols = shape_.cols();
  double s = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = x[r * cols + c];
      const double dh = c + 1 < cols ? x[r * cols + c + 1] - v : 0.0;
      const double dv = r + 1 < rows ? x[(r + 1) * cols + c] - v : 0.0;
      s += std::hypot(dh, dv);
    }
  }
  return s;
}

double TvProxFgp::do_value(std::span<const double> x) const {
  if (nonneg_) {
    for (double v : x) {
      if (v < 0.0) return kInf;
    }
  }
  return alpha_ == 0.0 ? 0.0 : alpha_ * tv(x);
}

void TvProxFgp::do_prox(double sigma, std::span<const double> z, std::span<double> out) const {
  const std::size_t n = shape_.size();
  const auto project = [this](std::span<double> v) {
    if (nonneg_) {
      for (double& e : v) e = std::max(e, 0.0);
    }
  };
  const double lambda = sigma * alpha_;
  if (lambda == 0.0) {
    std::copy(z.begin(), z.end(), out.begin());
    project(out);
    return;
  }
  const Gradient2D dh(shape_, Direction::horizontal);
  const Gradient2D dv(shape_, Direction::vertical);
  if (dual_.size() != 2 * n) dual_.assign(2 * n, 0.0);

  Vector p = dual_;
  Vector r = p;
  Vector x(n), tmp(n), g(n);
  // x = P_C(z - lambda D^T q)
  const auto primal = [&](const Vector& q, std::span<double> dst) {
    const std::span<const double> q_all(q);
    dh.adjoint(q_all.first(n), tmp);
    for (std::size_t j = 0; j < n; ++j) dst[j] = z[j] - lambda * tmp[j];
    dv.adjoint(q_all.subspan(n), tmp);
    for (std::size_t j = 0; j < n; ++j) dst[j] -= lambda * tmp[j];
    project(dst);
  };

  const double step = 1.0 / (8.0 * lambda);
  double t = 1.0;
  Vector pn(2 * n);
  for (int it = 0; it < iters_; ++it) {
    primal(r, x);
    dh.apply(x, g);
    for (std::size_t j = 0; j < n; ++j) pn[j] = r[j] + step * g[j];
    dv.apply(x, g);
    for (std::size_t j = 0; j < n; ++j) pn[n + j] = r[n + j] + step * g[j];
    for (std::size_t j = 0; j < n; ++j) {
      const double norm = std::hypot(pn[j], pn[n + j]);
      if (norm > 1.0) {
        pn[j] /= norm;
        pn[n + j] /= norm;
      }
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    for (std::size_t j = 0; j < 2 * n; ++j) r[j] = pn[j] + beta * (pn[j] - p[j]);
    p.swap(pn);
    t = tn;
  }
  dual_ = p;
  primal(p, out);

  // Never do worse than the projected input.
  Vector base(z.begin(), z.end());
  project(base);
  const auto objective = [&](std::span<const double> v) { return 0.5 * dist_sq(v, z) + lambda * tv(v); };
  if (objective(base) < objective(out)) std::copy(base.begin(), base.end(), out.begin());
}

std::shared_ptr<const TvProxFgp> tv_prox_fgp(Shape shape, double alpha, bool nonneg, int iters) {
  return std::make_shared<TvProxFgp>(std::move(shape), alpha, nonneg, iters);
}

}  // namespace spdhg
