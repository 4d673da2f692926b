#include "spdhg/blockspace.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 2) {
    throw StructureError("shape must be 1-D or 2-D");
  }
  for (auto d : dims_) {
    if (d == 0) throw StructureError("shape extents must be positive");
  }
}

std::size_t Shape::size() const noexcept {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::string Shape::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << 'x';
    os << dims_[i];
  }
  return os.str();
}

Shape Shape::parse(const std::string& text) {
  std::vector<std::size_t> dims;
  if (text.empty() || text.back() == 'x') throw StructureError("malformed shape '" + text + "'");
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, 'x')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      dims.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw StructureError("malformed shape '" + text + "'");
    }
  }
  return Shape(std::move(dims));
}

BlockVector::BlockVector(std::vector<Shape> shapes) : shapes_(std::move(shapes)) {
  if (shapes_.empty()) throw StructureError("block vector needs at least one block");
  blocks_.reserve(shapes_.size());
  for (const auto& s : shapes_) blocks_.emplace_back(s.size(), 0.0);
}

BlockVector::BlockVector(std::vector<Shape> shapes, std::vector<Vector> blocks)
    : shapes_(std::move(shapes)), blocks_(std::move(blocks)) {
  if (shapes_.empty()) throw StructureError("block vector needs at least one block");
  if (shapes_.size() != blocks_.size()) throw StructureError("block count does not match shape count");
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (shapes_[i].size() != blocks_[i].size()) {
      throw StructureError("block " + std::to_string(i) + " has " + std::to_string(blocks_[i].size()) +
                           " entries, shape " + shapes_[i].to_string() + " requires " +
                           std::to_string(shapes_[i].size()));
    }
  }
}

BlockVector BlockVector::from_blocks(std::vector<Vector> blocks) {
  std::vector<Shape> shapes;
  shapes.reserve(blocks.size());
  for (const auto& b : blocks) shapes.emplace_back(Shape{b.size()});
  return BlockVector(std::move(shapes), std::move(blocks));
}

std::size_t BlockVector::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.size();
  return n;
}

bool BlockVector::same_structure(const BlockVector& other) const noexcept {
  return shapes_ == other.shapes_;
}

bool BlockVector::all_finite() const noexcept {
  for (const auto& b : blocks_) {
    if (!spdhg::all_finite(b)) return false;
  }
  return true;
}

void BlockVector::set_zero() {
  for (auto& b : blocks_) std::fill(b.begin(), b.end(), 0.0);
}

BlockWeights::BlockWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw DomainError("block weight " + std::to_string(i) + " must be positive and finite");
    }
  }
}

BlockWeights BlockWeights::uniform(std::size_t n, double w) { return BlockWeights(std::vector<double>(n, w)); }

namespace {

void require_same(const BlockVector& a, const BlockVector& b) {
  if (!a.same_structure(b)) throw StructureError("block structures differ");
}

}  // namespace

BlockVector axpy(double a, const BlockVector& x, const BlockVector& y) {
  require_same(x, y);
  BlockVector out = y;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) axpy_inplace(a, x.block(i), out.block(i));
  return out;
}

double weighted_norm_sq(const BlockVector& v, const BlockWeights& w) {
  if (w.size() != v.num_blocks()) throw StructureError("weight count does not match block count");
  double s = 0.0;
  for (std::size_t i = 0; i < v.num_blocks(); ++i) s += w[i] * norm_sq(v.block(i));
  return s;
}

double inner(const BlockVector& u, const BlockVector& v) {
  require_same(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.num_blocks(); ++i) s += dot(u.block(i), v.block(i));
  return s;
}

double norm_sq(const BlockVector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.num_blocks(); ++i) s += norm_sq(v.block(i));
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructureError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double norm_sq(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double dist_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructureError("dist_sq: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

void axpy_inplace(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw StructureError("axpy: length mismatch");
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += a * x[j];
}

bool all_finite(std::span<const double> a) noexcept {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace spdhg
