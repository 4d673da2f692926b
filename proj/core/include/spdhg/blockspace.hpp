#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace spdhg {

using Vector = std::vector<double>;

/// Extents of a 1-D or 2-D grid. Row-major; for 2-D shapes dims = {rows, cols}.
class Shape {
 public:
  Shape() : dims_{1} {}
  explicit Shape(std::vector<std::size_t> dims);
  Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept;
  std::size_t rows() const noexcept { return dims_[0]; }
  std::size_t cols() const noexcept { return rank() > 1 ? dims_[1] : 1; }

  std::string to_string() const;
  static Shape parse(const std::string& text);

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<std::size_t> dims_;
};

/// Ordered tuple of dense real blocks, e.g. a dual variable y = (y_1, ..., y_n).
/// A primal variable is the n = 1 case but is usually held as a plain Vector.
class BlockVector {
 public:
  BlockVector() = default;
  /// Zero-filled blocks with the given shapes.
  explicit BlockVector(std::vector<Shape> shapes);
  BlockVector(std::vector<Shape> shapes, std::vector<Vector> blocks);

  /// Blocks with 1-D shapes inferred from their lengths.
  static BlockVector from_blocks(std::vector<Vector> blocks);

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  std::size_t total_size() const noexcept;

  std::span<double> block(std::size_t i) { return blocks_.at(i); }
  std::span<const double> block(std::size_t i) const { return blocks_.at(i); }
  Vector& data(std::size_t i) { return blocks_.at(i); }
  const Vector& data(std::size_t i) const { return blocks_.at(i); }

  const Shape& shape(std::size_t i) const { return shapes_.at(i); }
  const std::vector<Shape>& shapes() const noexcept { return shapes_; }

  bool same_structure(const BlockVector& other) const noexcept;
  bool all_finite() const noexcept;
  BlockVector zeros_like() const { return BlockVector(shapes_); }
  void set_zero();

 private:
  std::vector<Shape> shapes_;
  std::vector<Vector> blocks_;
};

/// Per-block positive scalar metric weights w_i.
class BlockWeights {
 public:
  explicit BlockWeights(std::vector<double> weights);
  static BlockWeights uniform(std::size_t n, double w = 1.0);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_.at(i); }
  std::span<const double> values() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;
};

/// a*x + y, blockwise.
BlockVector axpy(double a, const BlockVector& x, const BlockVector& y);
/// sum_i w_i ||v_i||^2
double weighted_norm_sq(const BlockVector& v, const BlockWeights& w);
/// sum_i <u_i, v_i>
double inner(const BlockVector& u, const BlockVector& v);
double norm_sq(const BlockVector& v);

// Flat-array kernels shared by all modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
double dist_sq(std::span<const double> a, std::span<const double> b);
void axpy_inplace(double a, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> a) noexcept;

}  // namespace spdhg
