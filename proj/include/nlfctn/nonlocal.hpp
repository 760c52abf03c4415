#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "nlfctn/completion.hpp"
#include "nlfctn/tensor.hpp"

namespace nlfctn {

/// Top-left corner of a spatial patch (0-based; modes 0 and 1 are spatial).
struct PatchOrigin {
  std::size_t row = 0;
  std::size_t col = 0;
  auto operator<=>(const PatchOrigin&) const = default;
};

/// Origins along one axis: 0, stride, 2*stride, ... up to extent - patch,
/// plus a flush origin at extent - patch when the stride does not land on it.
std::vector<std::size_t> axis_origins(std::size_t extent, std::size_t patch, std::size_t stride);

/// All overlapping patches of size p x p with overlap o (stride p - o).
/// Patch t has linear index t = row_index + rows.size() * col_index.
struct PatchGrid {
  Shape image_shape;
  std::size_t patch = 0;
  std::size_t overlap = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::vector<PatchOrigin> origins;

  std::size_t count() const { return origins.size(); }
};

struct KeyLattice {
  std::size_t patch = 0;
  std::size_t interval = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::vector<PatchOrigin> keys;

  std::size_t count() const { return keys.size(); }
};

PatchGrid build_patch_grid(const Shape& shape, std::size_t patch, std::size_t overlap);
KeyLattice build_key_lattice(const Shape& shape, std::size_t patch, std::size_t interval);

/// Squared Euclidean distance between two p x p patches spanning every
/// non-spatial mode.
double patch_distance_sq(const DenseTensor& image, std::size_t patch, PatchOrigin a, PatchOrigin b);

/// The s patches of `grid` closest to the key patch, key first, then by
/// ascending distance with ties broken by ascending grid index.
std::vector<PatchOrigin> block_match(const DenseTensor& reference, const PatchGrid& grid, PatchOrigin key,
                                     std::size_t s);

/// Similar patches stacked along a new trailing mode: shape (p, p, I_3, ..., I_N, s).
struct NssGroup {
  std::size_t key_index = 0;
  std::vector<PatchOrigin> members;
  DenseTensor tensor;
  ObservationMask mask;
};

NssGroup form_group(const DenseTensor& image, const ObservationMask& mask, std::span<const PatchOrigin> members,
                    std::size_t patch);

/// Puts group tensors back at their member positions and averages every
/// contribution per entry. Entries no group covers keep `fallback`. The
/// result does not depend on the order of `groups`.
DenseTensor aggregate(std::span<const NssGroup> groups, const Shape& shape, const DenseTensor& fallback);

}  // namespace nlfctn
