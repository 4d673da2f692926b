#include "spdhg/phantoms.hpp"

#include <algorithm>
#include <cmath>

#include "spdhg/errors.hpp"

namespace spdhg {

Vector render(const Shape& shape, std::span<const Blob> blobs) {
  if (shape.rank() != 2) throw StructureError("phantoms are 2-D");
  const std::size_t rows = shape.rows(), cols = shape.cols();
  Vector x(shape.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double v = (static_cast<double>(r) + 0.5) / static_cast<double>(rows) * 2.0 - 1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double u = (static_cast<double>(c) + 0.5) / static_cast<double>(cols) * 2.0 - 1.0;
      for (const Blob& b : blobs) {
        const double du = (u - b.cu) / b.ru, dv = (v - b.cv) / b.rv;
        const bool inside = b.kind == Blob::Kind::ellipse ? du * du + dv * dv <= 1.0
                                                          : std::fabs(du) <= 1.0 && std::fabs(dv) <= 1.0;
        if (inside) x[r * cols + c] += b.value;
      }
    }
  }
  return x;
}

Vector emission_phantom(const Shape& shape) {
  using K = Blob::Kind;
  const Blob blobs[] = {
      {K::ellipse, 0.0, 0.0, 0.80, 0.65, 0.5},
      {K::ellipse, -0.35, -0.15, 0.20, 0.20, 1.0},   // hot
      {K::ellipse, 0.30, 0.25, 0.15, 0.15, 0.75},
      {K::ellipse, 0.25, -0.30, 0.12, 0.12, -0.5},   // cold
      {K::rectangle, -0.10, 0.40, 0.25, 0.06, 0.5},
  };
  return render(shape, blobs);
}

Vector blocky_phantom(const Shape& shape) {
  using K = Blob::Kind;
  const Blob blobs[] = {
      {K::rectangle, 0.0, 0.0, 0.90, 0.90, 0.2},
      {K::rectangle, -0.45, -0.40, 0.30, 0.25, 0.6},
      {K::ellipse, 0.35, 0.30, 0.35, 0.35, 0.8},
      {K::rectangle, 0.40, -0.45, 0.20, 0.15, 0.3},
      {K::ellipse, -0.35, 0.45, 0.15, 0.20, -0.2},
  };
  Vector x = render(shape, blobs);
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

Kernel motion_blur(std::size_t size) {
  if (size == 0) throw DomainError("kernel size must be positive");
  Kernel k;
  k.rows = k.cols = size;
  k.values.assign(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) k.values[i * size + i] = 1.0 / static_cast<double>(size);
  return k;
}

Vector poisson_sample(std::span<const double> mean, Rng& rng) {
  Vector b(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) {
    if (!(mean[j] >= 0.0) || !std::isfinite(mean[j])) throw DomainError("Poisson mean must be finite and >= 0");
    b[j] = static_cast<double>(rng.poisson(mean[j]));
  }
  return b;
}

Vector gaussian_noise(std::span<const double> x, double sigma, Rng& rng) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

}  // namespace spdhg
