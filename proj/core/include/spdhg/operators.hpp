#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "spdhg/blockspace.hpp"

namespace spdhg {

/// Linear map between flat arrays with an exact adjoint.
///
/// Implementations are immutable after construction; apply() and adjoint()
/// may be called concurrently. Sizes are checked here so that overrides can
/// assume well-formed spans.
class LinearOp {
 public:
  LinearOp(Shape in_shape, Shape out_shape) : in_(std::move(in_shape)), out_(std::move(out_shape)) {}
  virtual ~LinearOp() = default;

  const Shape& in_shape() const noexcept { return in_; }
  const Shape& out_shape() const noexcept { return out_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  void adjoint(std::span<const double> y, std::span<double> out) const;
  Vector apply(std::span<const double> x) const;
  Vector adjoint(std::span<const double> y) const;

 protected:
  virtual void do_apply(std::span<const double> x, std::span<double> out) const = 0;
  virtual void do_adjoint(std::span<const double> y, std::span<double> out) const = 0;

 private:
  Shape in_;
  Shape out_;
};

using LinearOpPtr = std::shared_ptr<const LinearOp>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse matrix; apply is y = Mx, adjoint is x = M^T y.
class SparseMatrixOp final : public LinearOp {
 public:
  SparseMatrixOp(const std::vector<Triplet>& entries, Shape in_shape, Shape out_shape);

  std::size_t rows() const noexcept { return out_shape().size(); }
  std::size_t cols() const noexcept { return in_shape().size(); }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::size_t row_nnz(std::size_t r) const { return row_ptr_.at(r + 1) - row_ptr_.at(r); }
  /// Entries in row-major order (duplicates merged).
  std::vector<Triplet> triplets() const;

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

enum class Direction { horizontal, vertical };

/// Forward differences with a zero last column (horizontal) or row (vertical).
class Gradient2D final : public LinearOp {
 public:
  Gradient2D(const Shape& shape, Direction direction);
  Direction direction() const noexcept { return direction_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;

 private:
  Direction direction_;
};

struct Kernel {
  std::size_t rows = 1;
  std::size_t cols = 1;
  Vector values{1.0};
};

/// "Same"-size correlation with a centred kernel and zero padding.
class Convolution2D final : public LinearOp {
 public:
  Convolution2D(Kernel kernel, const Shape& shape);
  const Kernel& kernel() const noexcept { return kernel_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;

 private:
  Kernel kernel_;
};

class IdentityOp final : public LinearOp {
 public:
  explicit IdentityOp(const Shape& shape) : LinearOp(shape, shape) {}

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;
};

/// c * op
class ScaledOp final : public LinearOp {
 public:
  ScaledOp(LinearOpPtr op, double scale);

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;

 private:
  LinearOpPtr op_;
  double scale_;
};

/// Forwards to an operator and counts evaluations.
class CountingOp final : public LinearOp {
 public:
  explicit CountingOp(LinearOpPtr op);

  std::uint64_t apply_calls() const noexcept { return applies_.load(std::memory_order_relaxed); }
  std::uint64_t adjoint_calls() const noexcept { return adjoints_.load(std::memory_order_relaxed); }
  std::uint64_t total_calls() const noexcept { return apply_calls() + adjoint_calls(); }
  void reset() const noexcept;
  const LinearOpPtr& inner() const noexcept { return op_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> out) const override;
  void do_adjoint(std::span<const double> y, std::span<double> out) const override;

 private:
  LinearOpPtr op_;
  mutable std::atomic<std::uint64_t> applies_{0};
  mutable std::atomic<std::uint64_t> adjoints_{0};
};

/// A = [A_1; ...; A_n] with a common input space; A*y = sum_i A_i* y_i.
class BlockOperator {
 public:
  BlockOperator() = default;
  explicit BlockOperator(std::vector<LinearOpPtr> rows);

  std::size_t num_blocks() const noexcept { return rows_.size(); }
  const LinearOp& row(std::size_t i) const { return *rows_.at(i); }
  const LinearOpPtr& row_ptr(std::size_t i) const { return rows_.at(i); }
  const std::vector<LinearOpPtr>& rows() const noexcept { return rows_; }
  const Shape& in_shape() const { return rows_.front()->in_shape(); }
  std::vector<Shape> out_shapes() const;

  BlockVector apply(std::span<const double> x) const;
  Vector adjoint(const BlockVector& y) const;

 private:
  std::vector<LinearOpPtr> rows_;
};

/// Wraps every row in a CountingOp.
BlockOperator instrument(const BlockOperator& op);
/// Total apply + adjoint calls over rows that are CountingOps.
std::uint64_t total_calls(const BlockOperator& op);
void reset_counters(const BlockOperator& op);

LinearOpPtr grad2d(const Shape& shape, Direction direction);
LinearOpPtr conv2d(Kernel kernel, const Shape& shape);
std::shared_ptr<const SparseMatrixOp> sparse_matrix_op(const std::vector<Triplet>& entries, Shape in_shape,
                                                       Shape out_shape);

/// Parallel-beam line integrals on a square grid with unit ray weights.
///
/// A pixel contributes its full value to the detector bin containing the
/// projection of its centre. Angles are k*pi/n_angles; sinogram row index is
/// angle * n_bins + bin. The detector spans the larger image extent.
class ToyRadon {
 public:
  ToyRadon(const Shape& image, std::size_t n_angles, std::size_t n_bins);

  const Shape& image_shape() const noexcept { return image_; }
  std::size_t n_angles() const noexcept { return n_angles_; }
  std::size_t n_bins() const noexcept { return n_bins_; }
  const std::vector<Triplet>& entries() const noexcept { return entries_; }

  /// Full sinogram operator (all angles).
  std::shared_ptr<const SparseMatrixOp> full() const;
  /// Rows belonging to the given angles, in the order given.
  std::shared_ptr<const SparseMatrixOp> subset(std::span<const std::size_t> angles) const;
  /// Equidistant split: block i holds angles i, i+n, i+2n, ...
  std::vector<LinearOpPtr> partition(std::size_t n) const;

 private:
  Shape image_;
  std::size_t n_angles_;
  std::size_t n_bins_;
  std::vector<Triplet> entries_;
};

struct NormEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// value scaled by (1 + 10 tol) for use in step-size conditions.
  double safe(double tol) const noexcept { return value * (1.0 + 10.0 * tol); }
};

/// Largest singular value by power iteration on A*A, seeded start vector.
NormEstimate op_norm(const LinearOp& op, double tol = 1e-8, std::size_t max_iter = 2000, std::uint64_t seed = 0);
/// Norm of the stacked operator [A_1; ...; A_n].
NormEstimate op_norm(const BlockOperator& op, double tol = 1e-8, std::size_t max_iter = 2000,
                     std::uint64_t seed = 0);

/// One "row col value" line per entry; lines starting with '#' are comments.
void write_triplets(std::ostream& os, const SparseMatrixOp& op);
std::vector<Triplet> read_triplets(std::istream& is);

}  // namespace spdhg
