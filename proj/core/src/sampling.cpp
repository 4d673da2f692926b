#include "spdhg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

std::string to_string(SamplingKind kind) {
  switch (kind) {
    case SamplingKind::full: return "full";
    case SamplingKind::serial: return "serial";
    case SamplingKind::arbitrary: return "arbitrary";
  }
  return "?";
}

Sampling::Sampling(std::size_t n, std::vector<Atom> atoms) {
  if (n == 0) throw StructureError("sampling needs at least one block");
  if (atoms.empty()) throw DomainError("sampling needs at least one atom");
  // Merge atoms with equal subsets so the kind is a property of the distribution.
  std::map<std::vector<std::size_t>, double> merged;
  double total = 0.0;
  for (auto& a : atoms) {
    if (!(a.prob > 0.0) || !std::isfinite(a.prob)) throw DomainError("atom probabilities must be positive");
    std::sort(a.subset.begin(), a.subset.end());
    if (std::adjacent_find(a.subset.begin(), a.subset.end()) != a.subset.end()) {
      throw StructureError("atom lists a block twice");
    }
    for (auto i : a.subset) {
      if (i >= n) throw StructureError("atom index " + std::to_string(i) + " out of range");
    }
    merged[a.subset] += a.prob;
    total += a.prob;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "atom probabilities sum to " << total << ", not 1";
    throw DomainError(os.str());
  }
  marginals_.assign(n, 0.0);
  double acc = 0.0;
  for (auto& [subset, prob] : merged) {
    atoms_.push_back({subset, prob});
    acc += prob;
    cumulative_.push_back(acc);
    for (auto i : subset) marginals_[i] += prob;
  }
  cumulative_.back() = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(marginals_[i] > 0.0)) throw PropernessError("block " + std::to_string(i) + " is never sampled");
    marginals_[i] = std::min(marginals_[i], 1.0);
  }
  const bool all_singletons =
      std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.subset.size() == 1; });
  if (atoms_.size() == 1 && atoms_.front().subset.size() == n) {
    kind_ = SamplingKind::full;
  } else if (all_singletons) {
    kind_ = SamplingKind::serial;
  }
}

Sampling Sampling::full(std::size_t n) {
  Atom a;
  for (std::size_t i = 0; i < n; ++i) a.subset.push_back(i);
  a.prob = 1.0;
  return Sampling(n, {a});
}

Sampling Sampling::serial(std::vector<double> p) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) throw PropernessError("serial probability of block " + std::to_string(i) + " must be > 0");
    atoms.push_back({{i}, p[i]});
  }
  return Sampling(p.size(), std::move(atoms));
}

Sampling Sampling::uniform_serial(std::size_t n) {
  if (n == 0) throw StructureError("sampling needs at least one block");
  return serial(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Sampling Sampling::arbitrary(std::size_t n, std::vector<Atom> atoms) { return Sampling(n, std::move(atoms)); }

double Sampling::expected_size() const noexcept {
  double s = 0.0;
  for (double p : marginals_) s += p;
  return s;
}

bool Sampling::is_uniform() const noexcept {
  return std::all_of(marginals_.begin(), marginals_.end(),
                     [&](double p) { return std::fabs(p - marginals_.front()) <= 1e-14; });
}

const std::vector<std::size_t>& Sampling::draw(Rng& rng) const {
  if (atoms_.size() == 1) return atoms_.front().subset;
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                   static_cast<std::ptrdiff_t>(atoms_.size()) - 1));
  return atoms_[k].subset;
}

// ---------------------------------------------------------------------------

EsoParams make_eso(Vector v, const Sampling& s) {
  if (v.size() != s.n()) throw StructureError("ESO parameter count does not match block count");
  EsoParams out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) throw DomainError("ESO parameters must be finite and >= 0");
    out.gamma_sq = std::max(out.gamma_sq, v[i] / s.p(i));
  }
  out.v = std::move(v);
  return out;
}

namespace {

void check_steps(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma) {
  if (A.num_blocks() != s.n() || sigma.size() != s.n()) throw StructureError("block counts disagree");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
  for (double v : sigma) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("sigma_i must be positive");
  }
}

}  // namespace

EsoParams eso_params(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                     double norm_tol) {
  check_steps(s, A, tau, sigma);
  Vector v(s.n());
  switch (s.kind()) {
    case SamplingKind::full: {
      std::vector<LinearOpPtr> rows;
      for (std::size_t i = 0; i < s.n(); ++i) rows.push_back(std::make_shared<ScaledOp>(A.row_ptr(i), std::sqrt(sigma[i])));
      const auto est = op_norm(BlockOperator(rows), norm_tol, 20000);
      const double norm = est.safe(norm_tol);
      std::fill(v.begin(), v.end(), tau * norm * norm);
      break;
    }
    case SamplingKind::serial:
      for (std::size_t i = 0; i < s.n(); ++i) {
        const double norm = op_norm(A.row(i), norm_tol, 20000).safe(norm_tol);
        v[i] = sigma[i] * tau * norm * norm;
      }
      break;
    case SamplingKind::arbitrary:
      throw UnsupportedSamplingError("no closed-form ESO parameters for arbitrary samplings; supply v explicitly");
  }
  return make_eso(std::move(v), s);
}

namespace {

struct Scaled {
  const Sampling& s;
  const BlockOperator& A;
  Vector scale;  // sqrt(sigma_i tau)

  // sum_{i in S} C_i^* z_i
  Vector adjoint_sum(const std::vector<std::size_t>& subset, const BlockVector& z) const {
    Vector out(A.in_shape().size(), 0.0);
    Vector tmp(out.size());
    for (auto i : subset) {
      A.row(i).adjoint(z.block(i), tmp);
      axpy_inplace(scale[i], tmp, out);
    }
    return out;
  }

  double lhs(const BlockVector& z) const {
    double e = 0.0;
    for (const auto& atom : s.atoms()) e += atom.prob * norm_sq(adjoint_sum(atom.subset, z));
    return e;
  }

  // (M z)_i = sum_{S contains i} P(S) C_i (sum_{j in S} C_j^* z_j)
  BlockVector apply_m(const BlockVector& z) const {
    BlockVector out = z.zeros_like();
    Vector tmp;
    for (const auto& atom : s.atoms()) {
      const Vector u = adjoint_sum(atom.subset, z);
      for (auto i : atom.subset) {
        tmp = A.row(i).apply(u);
        axpy_inplace(atom.prob * scale[i], tmp, out.block(i));
      }
    }
    return out;
  }
};

double rhs_of(const Sampling& s, const EsoParams& v, const BlockVector& z) {
  double r = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) r += s.p(i) * v.v[i] * norm_sq(z.block(i));
  return r;
}

}  // namespace

EsoSides eso_sides(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                   const EsoParams& v, const BlockVector& z) {
  check_steps(s, A, tau, sigma);
  if (v.v.size() != s.n() || z.num_blocks() != s.n()) throw StructureError("block counts disagree");
  Scaled c{s, A, {}};
  for (std::size_t i = 0; i < s.n(); ++i) c.scale.push_back(std::sqrt(sigma[i] * tau));
  return {c.lhs(z), rhs_of(s, v, z)};
}

EsoReport validate_eso(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                       const EsoParams& v, int trials, int probes, std::uint64_t seed) {
  if (trials < 1 || probes < 1) throw DomainError("validate_eso needs trials >= 1 and probes >= 1");
  check_steps(s, A, tau, sigma);
  if (v.v.size() != s.n()) throw StructureError("ESO parameter count does not match block count");
  Scaled c{s, A, {}};
  for (std::size_t i = 0; i < s.n(); ++i) c.scale.push_back(std::sqrt(sigma[i] * tau));

  Rng rng(seed, 0x65736fULL);
  EsoReport report;
  BlockVector z(A.out_shapes());
  for (int probe = 0; probe < probes; ++probe) {
    for (std::size_t i = 0; i < z.num_blocks(); ++i) {
      for (double& e : z.block(i)) e = rng.normal();
    }
    for (int trial = 0; trial <= trials; ++trial) {
      const double lhs = c.lhs(z);
      const double rhs = rhs_of(s, v, z);
      ++report.evaluations;
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      report.max_ratio = std::max(report.max_ratio, ratio);
      if (lhs > rhs + 1e-9 * std::max(1.0, rhs) && report.passed) {
        std::ostringstream os;
        os.precision(12);
        os << "ESO violated at probe " << probe << " (refinement " << trial << "): " << lhs << " > " << rhs;
        report.passed = false;
        report.message = os.str();
      }
      if (trial == trials) break;
      // Power step on D^{-1} M towards the largest generalized Rayleigh quotient.
      BlockVector next = c.apply_m(z);
      for (std::size_t i = 0; i < next.num_blocks(); ++i) {
        const double d = s.p(i) * v.v[i];
        const double w = d > 0.0 ? 1.0 / d : 1e300;
        for (double& e : next.block(i)) e *= w;
      }
      const double nn = std::sqrt(norm_sq(next));
      if (!(nn > 0.0) || !std::isfinite(nn)) break;
      for (std::size_t i = 0; i < next.num_blocks(); ++i) {
        for (double& e : next.block(i)) e /= nn;
      }
      z = std::move(next);
    }
  }
  if (report.passed) {
    std::ostringstream os;
    os.precision(12);
    os << "ESO holds on " << report.evaluations << " evaluations, max ratio " << report.max_ratio;
    report.message = os.str();
  }
  return report;
}

EsoSides eso_lemma_sides(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                         const EsoParams& v, std::span<const double> x, const BlockVector& y,
                         const BlockVector& yhat, double c) {
  check_steps(s, A, tau, sigma);
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!y.same_structure(yhat) || y.num_blocks() != s.n()) throw StructureError("block counts disagree");
  Vector inner_i(s.n()), dist_i(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    const Vector ax = A.row(i).apply(x);
    double ip = 0.0, dd = 0.0;
    for (std::size_t j = 0; j < ax.size(); ++j) {
      const double d = yhat.block(i)[j] - y.block(i)[j];
      ip += ax[j] * d;
      dd += d * d;
    }
    inner_i[i] = ip;
    dist_i[i] = dd;
  }
  const double xterm = norm_sq(x) / (c * tau);
  EsoSides out;
  for (const auto& atom : s.atoms()) {
    double l = 0.0, r = xterm;
    for (auto i : atom.subset) {
      l += 2.0 * inner_i[i] / s.p(i);
      r += c * v.gamma_sq * dist_i[i] / (s.p(i) * sigma[i]);
    }
    out.lhs += atom.prob * l;
    out.rhs -= atom.prob * r;
  }
  return out;
}

}  // namespace spdhg
