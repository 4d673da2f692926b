#pragma once

#include <span>
#include <vector>

#include "spdhg/blockspace.hpp"
#include "spdhg/operators.hpp"
#include "spdhg/random.hpp"

namespace spdhg {

/// Shape in normalised image coordinates: u (columns) and v (rows) both run over [-1, 1].
struct Blob {
  enum class Kind { ellipse, rectangle } kind = Kind::ellipse;
  double cu = 0.0, cv = 0.0;  // centre
  double ru = 0.5, rv = 0.5;  // half-widths
  double value = 1.0;         // added inside
};

/// Sum of blobs sampled at pixel centres.
Vector render(const Shape& shape, std::span<const Blob> blobs);

/// Emission-style phantom: a body ellipse with hot and cold disks, values in [0, 1.5].
Vector emission_phantom(const Shape& shape);
/// Piecewise-constant scene of rectangles and disks, values in [0, 1].
Vector blocky_phantom(const Shape& shape);

/// Normalised diagonal line of length `size` in a size x size kernel.
Kernel motion_blur(std::size_t size);

/// b_j ~ Poisson(mean_j).
Vector poisson_sample(std::span<const double> mean, Rng& rng);
/// x_j + sigma N(0, 1).
Vector gaussian_noise(std::span<const double> x, double sigma, Rng& rng);

}  // namespace spdhg
