#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/operators.hpp"
#include "spdhg/random.hpp"

namespace spdhg {

enum class SamplingKind { full, serial, arbitrary };

std::string to_string(SamplingKind kind);

struct Atom {
  std::vector<std::size_t> subset;  // sorted, 0-based block indices
  double prob = 0.0;
};

/// Distribution over subsets of {0, ..., n-1} with finitely many atoms.
///
/// The kind is inferred from the atoms: one atom holding every block is
/// "full", singleton atoms only is "serial", anything else is "arbitrary".
class Sampling {
 public:
  static Sampling full(std::size_t n);
  static Sampling serial(std::vector<double> p);
  static Sampling uniform_serial(std::size_t n);
  static Sampling arbitrary(std::size_t n, std::vector<Atom> atoms);

  std::size_t n() const noexcept { return marginals_.size(); }
  SamplingKind kind() const noexcept { return kind_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Vector& marginals() const noexcept { return marginals_; }
  double p(std::size_t i) const { return marginals_.at(i); }
  /// E|S| = sum_i p_i
  double expected_size() const noexcept;
  bool is_uniform() const noexcept;

  /// One atom drawn according to its probability.
  const std::vector<std::size_t>& draw(Rng& rng) const;

 private:
  Sampling(std::size_t n, std::vector<Atom> atoms);

  SamplingKind kind_ = SamplingKind::arbitrary;
  std::vector<Atom> atoms_;
  Vector cumulative_;
  Vector marginals_;
};

struct EsoParams {
  Vector v;
  double gamma_sq = 0.0;  // max_i v_i / p_i
};

EsoParams make_eso(Vector v, const Sampling& s);

/// Closed-form ESO parameters for full and serial samplings.
EsoParams eso_params(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                     double norm_tol = 1e-10);

struct EsoSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// E ||sum_{i in S} C_i^* z_i||^2 and sum_i p_i v_i ||z_i||^2 with C_i = sigma_i^{1/2} A_i tau^{1/2},
/// the expectation taken by enumerating atoms.
EsoSides eso_sides(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                   const EsoParams& v, const BlockVector& z);

struct EsoReport {
  bool passed = true;
  double max_ratio = 0.0;
  std::size_t evaluations = 0;
  std::string message;
};

/// Checks the ESO inequality on `probes` random directions, each refined by
/// `trials` power steps towards the worst-case direction.
EsoReport validate_eso(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                       const EsoParams& v, int trials, int probes, std::uint64_t seed);

/// Both sides of 2 E<QAx, y+ - y> >= -E{||x||^2/(c tau) + c gamma^2 ||y+ - y||^2_{QS^-1}}
/// where y+_i = yhat_i for i in S and y_i otherwise.
EsoSides eso_lemma_sides(const Sampling& s, const BlockOperator& A, double tau, std::span<const double> sigma,
                         const EsoParams& v, std::span<const double> x, const BlockVector& y,
                         const BlockVector& yhat, double c);

}  // namespace spdhg
