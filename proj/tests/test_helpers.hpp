#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "nlfctn/fctn.hpp"
#include "nlfctn/random.hpp"
#include "nlfctn/tensor.hpp"

namespace nlfctn::testing {

inline DenseTensor random_tensor(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  DenseTensor t(shape);
  for (double& v : t.data()) v = rng.uniform();
  return t;
}

inline double normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Factors with i.i.d. standard normal entries.
inline FctnFactors normal_factors(const Shape& dims, const FctnRank& rank, std::uint64_t seed) {
  Rng rng(seed);
  FctnFactors f;
  f.dims = dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    DenseTensor g(factor_shape(dims, rank, k));
    for (double& v : g.data()) v = normal(rng);
    f.factors.push_back(std::move(g));
  }
  return f;
}

/// Naive mode-`mode` unfolding: rows by that mode, columns by the others
/// in ascending order with the first varying fastest.
inline Matrix naive_mode_unfold(const DenseTensor& x, std::size_t mode) {
  std::size_t cols = x.size() / x.dim(mode);
  Matrix m(static_cast<Eigen::Index>(x.dim(mode)), static_cast<Eigen::Index>(cols));
  for (std::size_t off = 0; off < x.size(); ++off) {
    const Index idx = x.unravel(off);
    std::size_t col = 0, stride = 1;
    for (std::size_t k = 0; k < x.order(); ++k) {
      if (k == mode) continue;
      col += idx[k] * stride;
      stride *= x.dim(k);
    }
    m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(col)) = x[off];
  }
  return m;
}

/// Self-similar test image (rows, cols, bands): two random texture tiles of
/// side `tile` laid out as a checkerboard, each with its own spectral
/// signature, plus a smooth diagonal ramp with a third signature. Values
/// stay inside [0, 1].
inline DenseTensor tiled_texture_image(std::size_t rows, std::size_t cols, std::size_t bands, std::size_t tile,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> tile_a(tile * tile), tile_b(tile * tile);
  for (double& v : tile_a) v = rng.uniform();
  for (double& v : tile_b) v = rng.uniform();
  DenseTensor x({rows, cols, bands});
  for (std::size_t b = 0; b < bands; ++b) {
    const double t = bands > 1 ? static_cast<double>(b) / static_cast<double>(bands - 1) : 0.0;
    const double sig_a = 0.6 + 0.4 * t;
    const double sig_b = 1.0 - 0.5 * t;
    const double sig_ramp = 0.5 + 0.5 * std::sin(std::numbers::pi * t);
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r) {
        const bool first = ((r / tile) + (c / tile)) % 2 == 0;
        const std::size_t in_tile = (r % tile) + tile * (c % tile);
        const double texture = first ? tile_a[in_tile] * sig_a : tile_b[in_tile] * sig_b;
        const double ramp = static_cast<double>(r + c) / static_cast<double>(rows + cols - 2);
        x.at({r, c, b}) = 0.55 * texture + 0.4 * ramp * sig_ramp;
      }
  }
  return x;
}

}  // namespace nlfctn::testing
