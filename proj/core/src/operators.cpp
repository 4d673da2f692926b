#include "spdhg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "spdhg/errors.hpp"
#include "spdhg/random.hpp"

namespace spdhg {

void LinearOp::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != in_.size() || out.size() != out_.size()) {
    throw StructureError("apply: expected " + in_.to_string() + " -> " + out_.to_string());
  }
  do_apply(x, out);
}

void LinearOp::adjoint(std::span<const double> y, std::span<double> out) const {
  if (y.size() != out_.size() || out.size() != in_.size()) {
    throw StructureError("adjoint: expected " + out_.to_string() + " -> " + in_.to_string());
  }
  do_adjoint(y, out);
}

Vector LinearOp::apply(std::span<const double> x) const {
  Vector out(out_.size());
  apply(x, out);
  return out;
}

Vector LinearOp::adjoint(std::span<const double> y) const {
  Vector out(in_.size());
  adjoint(y, out);
  return out;
}

// ---------------------------------------------------------------------------

SparseMatrixOp::SparseMatrixOp(const std::vector<Triplet>& entries, Shape in_shape, Shape out_shape)
    : LinearOp(std::move(in_shape), std::move(out_shape)) {
  const std::size_t m = rows();
  const std::size_t n = cols();
  std::vector<Triplet> sorted = entries;
  for (const auto& t : sorted) {
    if (t.row >= m || t.col >= n) {
      throw StructureError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                           ") outside " + std::to_string(m) + "x" + std::to_string(n));
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  row_ptr_.assign(m + 1, 0);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (!col_idx_.empty() && k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
      values_.back() += t.value;
      continue;
    }
    col_idx_.push_back(t.col);
    values_.push_back(t.value);
    ++row_ptr_[t.row + 1];
  }
  for (std::size_t r = 0; r < m; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

std::vector<Triplet> SparseMatrixOp::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
  }
  return out;
}

void SparseMatrixOp::do_apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t r = 0; r < rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    out[r] = s;
  }
}

void SparseMatrixOp::do_adjoint(std::span<const double> y, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out[col_idx_[k]] += values_[k] * yr;
  }
}

// ---------------------------------------------------------------------------

namespace {

const Shape& require_2d(const Shape& s, const char* what) {
  if (s.rank() != 2) throw StructureError(std::string(what) + " requires a 2-D shape, got " + s.to_string());
  return s;
}

}  // namespace

Gradient2D::Gradient2D(const Shape& shape, Direction direction)
    : LinearOp(require_2d(shape, "grad2d"), shape), direction_(direction) {}

void Gradient2D::do_apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t rows = in_shape().rows();
  const std::size_t cols = in_shape().cols();
  if (direction_ == Direction::horizontal) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x.data() + r * cols;
      double* o = out.data() + r * cols;
      for (std::size_t c = 0; c + 1 < cols; ++c) o[c] = xr[c + 1] - xr[c];
      o[cols - 1] = 0.0;
    }
  } else {
    for (std::size_t r = 0; r + 1 < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = x[(r + 1) * cols + c] - x[r * cols + c];
    }
    for (std::size_t c = 0; c < cols; ++c) out[(rows - 1) * cols + c] = 0.0;
  }
}

// Transpose of the forward difference: negative backward divergence.
void Gradient2D::do_adjoint(std::span<const double> y, std::span<double> out) const {
  const std::size_t rows = in_shape().rows();
  const std::size_t cols = in_shape().cols();
  std::fill(out.begin(), out.end(), 0.0);
  if (direction_ == Direction::horizontal) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* yr = y.data() + r * cols;
      double* o = out.data() + r * cols;
      for (std::size_t c = 0; c + 1 < cols; ++c) {
        o[c] -= yr[c];
        o[c + 1] += yr[c];
      }
    }
  } else {
    for (std::size_t r = 0; r + 1 < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = y[r * cols + c];
        out[r * cols + c] -= v;
        out[(r + 1) * cols + c] += v;
      }
    }
  }
}

// ---------------------------------------------------------------------------

Convolution2D::Convolution2D(Kernel kernel, const Shape& shape)
    : LinearOp(require_2d(shape, "conv2d"), shape), kernel_(std::move(kernel)) {
  if (kernel_.rows == 0 || kernel_.cols == 0 || kernel_.values.size() != kernel_.rows * kernel_.cols) {
    throw StructureError("conv2d: kernel values do not match its extents");
  }
  if (kernel_.rows > shape.rows() || kernel_.cols > shape.cols()) {
    throw StructureError("conv2d: kernel larger than image");
  }
}

void Convolution2D::do_apply(std::span<const double> x, std::span<double> out) const {
  const auto rows = static_cast<std::ptrdiff_t>(in_shape().rows());
  const auto cols = static_cast<std::ptrdiff_t>(in_shape().cols());
  const auto kr = static_cast<std::ptrdiff_t>(kernel_.rows);
  const auto kc = static_cast<std::ptrdiff_t>(kernel_.cols);
  const std::ptrdiff_t cr = (kr - 1) / 2;
  const std::ptrdiff_t cc = (kc - 1) / 2;
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::ptrdiff_t u = 0; u < kr; ++u) {
        const std::ptrdiff_t rr = r + u - cr;
        if (rr < 0 || rr >= rows) continue;
        for (std::ptrdiff_t v = 0; v < kc; ++v) {
          const std::ptrdiff_t ccol = c + v - cc;
          if (ccol < 0 || ccol >= cols) continue;
          s += kernel_.values[u * kc + v] * x[rr * cols + ccol];
        }
      }
      out[r * cols + c] = s;
    }
  }
}

void Convolution2D::do_adjoint(std::span<const double> y, std::span<double> out) const {
  const auto rows = static_cast<std::ptrdiff_t>(in_shape().rows());
  const auto cols = static_cast<std::ptrdiff_t>(in_shape().cols());
  const auto kr = static_cast<std::ptrdiff_t>(kernel_.rows);
  const auto kc = static_cast<std::ptrdiff_t>(kernel_.cols);
  const std::ptrdiff_t cr = (kr - 1) / 2;
  const std::ptrdiff_t cc = (kc - 1) / 2;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      const double yv = y[r * cols + c];
      if (yv == 0.0) continue;
      for (std::ptrdiff_t u = 0; u < kr; ++u) {
        const std::ptrdiff_t rr = r + u - cr;
        if (rr < 0 || rr >= rows) continue;
        for (std::ptrdiff_t v = 0; v < kc; ++v) {
          const std::ptrdiff_t ccol = c + v - cc;
          if (ccol < 0 || ccol >= cols) continue;
          out[rr * cols + ccol] += kernel_.values[u * kc + v] * yv;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------

void IdentityOp::do_apply(std::span<const double> x, std::span<double> out) const {
  std::copy(x.begin(), x.end(), out.begin());
}

void IdentityOp::do_adjoint(std::span<const double> y, std::span<double> out) const {
  std::copy(y.begin(), y.end(), out.begin());
}

ScaledOp::ScaledOp(LinearOpPtr op, double scale)
    : LinearOp(op->in_shape(), op->out_shape()), op_(std::move(op)), scale_(scale) {}

void ScaledOp::do_apply(std::span<const double> x, std::span<double> out) const {
  op_->apply(x, out);
  for (double& v : out) v *= scale_;
}

void ScaledOp::do_adjoint(std::span<const double> y, std::span<double> out) const {
  op_->adjoint(y, out);
  for (double& v : out) v *= scale_;
}

CountingOp::CountingOp(LinearOpPtr op) : LinearOp(op->in_shape(), op->out_shape()), op_(std::move(op)) {}

void CountingOp::reset() const noexcept {
  applies_.store(0, std::memory_order_relaxed);
  adjoints_.store(0, std::memory_order_relaxed);
}

void CountingOp::do_apply(std::span<const double> x, std::span<double> out) const {
  applies_.fetch_add(1, std::memory_order_relaxed);
  op_->apply(x, out);
}

void CountingOp::do_adjoint(std::span<const double> y, std::span<double> out) const {
  adjoints_.fetch_add(1, std::memory_order_relaxed);
  op_->adjoint(y, out);
}

// ---------------------------------------------------------------------------

BlockOperator::BlockOperator(std::vector<LinearOpPtr> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw StructureError("block operator needs at least one row");
  for (const auto& r : rows_) {
    if (!r) throw StructureError("null operator row");
    if (!(r->in_shape() == rows_.front()->in_shape())) {
      throw StructureError("block operator rows must share the input shape");
    }
  }
}

std::vector<Shape> BlockOperator::out_shapes() const {
  std::vector<Shape> shapes;
  shapes.reserve(rows_.size());
  for (const auto& r : rows_) shapes.push_back(r->out_shape());
  return shapes;
}

BlockVector BlockOperator::apply(std::span<const double> x) const {
  BlockVector y(out_shapes());
  for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i]->apply(x, y.block(i));
  return y;
}

Vector BlockOperator::adjoint(const BlockVector& y) const {
  if (y.num_blocks() != rows_.size()) throw StructureError("adjoint: block count mismatch");
  Vector out(in_shape().size(), 0.0);
  Vector tmp(out.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    rows_[i]->adjoint(y.block(i), tmp);
    axpy_inplace(1.0, tmp, out);
  }
  return out;
}

BlockOperator instrument(const BlockOperator& op) {
  std::vector<LinearOpPtr> rows;
  for (const auto& r : op.rows()) rows.push_back(std::make_shared<CountingOp>(r));
  return BlockOperator(std::move(rows));
}

std::uint64_t total_calls(const BlockOperator& op) {
  std::uint64_t n = 0;
  for (const auto& r : op.rows()) {
    if (auto c = dynamic_cast<const CountingOp*>(r.get())) n += c->total_calls();
  }
  return n;
}

void reset_counters(const BlockOperator& op) {
  for (const auto& r : op.rows()) {
    if (auto c = dynamic_cast<const CountingOp*>(r.get())) c->reset();
  }
}

LinearOpPtr grad2d(const Shape& shape, Direction direction) { return std::make_shared<Gradient2D>(shape, direction); }

LinearOpPtr conv2d(Kernel kernel, const Shape& shape) {
  return std::make_shared<Convolution2D>(std::move(kernel), shape);
}

std::shared_ptr<const SparseMatrixOp> sparse_matrix_op(const std::vector<Triplet>& entries, Shape in_shape,
                                                       Shape out_shape) {
  return std::make_shared<SparseMatrixOp>(entries, std::move(in_shape), std::move(out_shape));
}

// ---------------------------------------------------------------------------

ToyRadon::ToyRadon(const Shape& image, std::size_t n_angles, std::size_t n_bins)
    : image_(require_2d(image, "toy_radon")), n_angles_(n_angles), n_bins_(n_bins) {
  if (n_angles == 0 || n_bins == 0) throw StructureError("toy_radon needs at least one angle and one bin");
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  const double span = static_cast<double>(std::max(rows, cols));
  const double width = span / static_cast<double>(n_bins);
  for (std::size_t a = 0; a < n_angles; ++a) {
    const double phi = std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
    const double cp = a == 0 ? 1.0 : std::cos(phi);
    const double sp = a == 0 ? 0.0 : std::sin(phi);
    for (std::size_t r = 0; r < rows; ++r) {
      const double py = 0.5 * static_cast<double>(rows - 1) - static_cast<double>(r);
      for (std::size_t c = 0; c < cols; ++c) {
        const double px = static_cast<double>(c) - 0.5 * static_cast<double>(cols - 1);
        const double t = px * cp + py * sp;
        const double pos = std::floor((t + 0.5 * span) / width);
        if (pos < 0.0 || pos >= static_cast<double>(n_bins)) continue;
        entries_.push_back({a * n_bins + static_cast<std::size_t>(pos), r * cols + c, 1.0});
      }
    }
  }
}

std::shared_ptr<const SparseMatrixOp> ToyRadon::full() const {
  return sparse_matrix_op(entries_, image_, Shape{n_angles_ * n_bins_});
}

std::shared_ptr<const SparseMatrixOp> ToyRadon::subset(std::span<const std::size_t> angles) const {
  std::vector<std::size_t> slot(n_angles_, n_angles_);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (angles[k] >= n_angles_) throw StructureError("toy_radon: angle index out of range");
    slot[angles[k]] = k;
  }
  std::vector<Triplet> sub;
  for (const auto& t : entries_) {
    const std::size_t a = t.row / n_bins_;
    if (slot[a] == n_angles_) continue;
    sub.push_back({slot[a] * n_bins_ + t.row % n_bins_, t.col, t.value});
  }
  return sparse_matrix_op(sub, image_, Shape{angles.size() * n_bins_});
}

std::vector<LinearOpPtr> ToyRadon::partition(std::size_t n) const {
  if (n == 0 || n_angles_ % n != 0) {
    throw ConfigError("cannot split " + std::to_string(n_angles_) + " angles into " + std::to_string(n) +
                      " equidistant subsets");
  }
  std::vector<LinearOpPtr> blocks;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> angles;
    for (std::size_t a = i; a < n_angles_; a += n) angles.push_back(a);
    blocks.push_back(subset(angles));
  }
  return blocks;
}

// ---------------------------------------------------------------------------

namespace {

template <class ApplyFn, class AdjointFn>
NormEstimate power_iteration(std::size_t in_size, std::size_t out_size, ApplyFn apply, AdjointFn adjoint,
                             double tol, std::size_t max_iter, std::uint64_t seed) {
  if (!(tol > 0.0)) throw DomainError("op_norm: tol must be positive");
  Rng rng(seed, 0x6f705f6e6f726dULL);
  Vector v(in_size);
  for (double& e : v) e = rng.normal();
  const double n0 = std::sqrt(norm_sq(v));
  for (double& e : v) e /= n0;
  Vector u(out_size), w(in_size);
  NormEstimate est;
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    apply(v, u);
    const double value = std::sqrt(norm_sq(u));
    est.value = std::max(est.value, value);
    est.iterations = it;
    if (value == 0.0) {
      est.converged = true;
      break;
    }
    adjoint(u, w);
    const double wn = std::sqrt(norm_sq(w));
    if (wn == 0.0) {
      est.converged = true;
      break;
    }
    for (std::size_t j = 0; j < in_size; ++j) v[j] = w[j] / wn;
    if (it > 1 && std::fabs(value - prev) <= tol * value) {
      est.converged = true;
      break;
    }
    prev = value;
  }
  return est;
}

}  // namespace

NormEstimate op_norm(const LinearOp& op, double tol, std::size_t max_iter, std::uint64_t seed) {
  return power_iteration(
      op.in_shape().size(), op.out_shape().size(),
      [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); },
      [&](std::span<const double> y, std::span<double> x) { op.adjoint(y, x); }, tol, max_iter, seed);
}

NormEstimate op_norm(const BlockOperator& op, double tol, std::size_t max_iter, std::uint64_t seed) {
  std::vector<std::size_t> offsets{0};
  for (const auto& r : op.rows()) offsets.push_back(offsets.back() + r->out_shape().size());
  Vector tmp(op.in_shape().size());
  return power_iteration(
      op.in_shape().size(), offsets.back(),
      [&](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < op.num_blocks(); ++i) {
          op.row(i).apply(x, y.subspan(offsets[i], offsets[i + 1] - offsets[i]));
        }
      },
      [&](std::span<const double> y, std::span<double> x) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < op.num_blocks(); ++i) {
          op.row(i).adjoint(y.subspan(offsets[i], offsets[i + 1] - offsets[i]), tmp);
          axpy_inplace(1.0, tmp, x);
        }
      },
      tol, max_iter, seed);
}

// ---------------------------------------------------------------------------

void write_triplets(std::ostream& os, const SparseMatrixOp& op) {
  os << "# in " << op.in_shape().to_string() << " out " << op.out_shape().to_string() << '\n';
  const auto old = os.precision(17);
  for (const auto& t : op.triplets()) os << t.row << ' ' << t.col << ' ' << t.value << '\n';
  os.precision(old);
}

std::vector<Triplet> read_triplets(std::istream& is) {
  std::vector<Triplet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long r = -1, c = -1;
    double v = 0.0;
    std::string rest;
    if (!(ls >> r >> c >> v) || (ls >> rest) || r < 0 || c < 0) {
      throw StructureError("triplet line " + std::to_string(lineno) + ": expected 'row col value'");
    }
    out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v});
  }
  return out;
}

}  // namespace spdhg
