#include "nlfctn/nonlocal.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nlfctn {

namespace {

void require_spatial(const Shape& shape, std::size_t patch) {
  if (shape.size() < 2) throw std::invalid_argument("patch operations need at least two spatial modes");
  if (patch < 1) throw std::invalid_argument("patch size must be at least 1");
  if (patch > shape[0] || patch > shape[1])
    throw std::invalid_argument("patch size " + std::to_string(patch) + " exceeds spatial extent " +
                                std::to_string(shape[0]) + "x" + std::to_string(shape[1]));
}

std::vector<PatchOrigin> cross(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  std::vector<PatchOrigin> out;
  out.reserve(rows.size() * cols.size());
  for (std::size_t c : cols)
    for (std::size_t r : rows) out.push_back({r, c});
  return out;
}

// Number of entries per spatial position (product of the non-spatial modes).
std::size_t depth(const Shape& shape) {
  return shape_size(std::span(shape).subspan(2));
}

}  // namespace

std::vector<std::size_t> axis_origins(std::size_t extent, std::size_t patch, std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("patch stride must be at least 1");
  if (patch > extent) throw std::invalid_argument("patch larger than extent");
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o + patch <= extent; o += stride) out.push_back(o);
  if (out.back() != extent - patch) out.push_back(extent - patch);
  return out;
}

PatchGrid build_patch_grid(const Shape& shape, std::size_t patch, std::size_t overlap) {
  require_spatial(shape, patch);
  if (overlap >= patch) throw std::invalid_argument("overlap must be smaller than the patch size");
  PatchGrid g;
  g.image_shape = shape;
  g.patch = patch;
  g.overlap = overlap;
  g.rows = axis_origins(shape[0], patch, patch - overlap);
  g.cols = axis_origins(shape[1], patch, patch - overlap);
  g.origins = cross(g.rows, g.cols);
  return g;
}

KeyLattice build_key_lattice(const Shape& shape, std::size_t patch, std::size_t interval) {
  require_spatial(shape, patch);
  if (interval < 1) throw std::invalid_argument("key interval must be at least 1");
  for (std::size_t axis = 0; axis < 2; ++axis)
    if (shape[axis] > patch && interval > shape[axis] - patch)
      throw std::invalid_argument("key interval " + std::to_string(interval) + " exceeds I - p = " +
                                  std::to_string(shape[axis] - patch));
  KeyLattice k;
  k.patch = patch;
  k.interval = interval;
  k.rows = axis_origins(shape[0], patch, interval);
  k.cols = axis_origins(shape[1], patch, interval);
  k.keys = cross(k.rows, k.cols);
  return k;
}

double patch_distance_sq(const DenseTensor& image, std::size_t patch, PatchOrigin a, PatchOrigin b) {
  const Shape& shape = image.shape();
  const std::size_t plane = shape[0] * shape[1];
  const std::size_t bands = depth(shape);
  const auto data = image.data();
  double sum = 0.0;
  for (std::size_t band = 0; band < bands; ++band) {
    const std::size_t base = band * plane;
    for (std::size_t c = 0; c < patch; ++c) {
      const double* pa = data.data() + base + (a.col + c) * shape[0] + a.row;
      const double* pb = data.data() + base + (b.col + c) * shape[0] + b.row;
      for (std::size_t r = 0; r < patch; ++r) {
        const double d = pa[r] - pb[r];
        sum += d * d;
      }
    }
  }
  return sum;
}

std::vector<PatchOrigin> block_match(const DenseTensor& reference, const PatchGrid& grid, PatchOrigin key,
                                     std::size_t s) {
  if (reference.shape() != grid.image_shape) throw std::invalid_argument("reference does not match patch grid");
  if (s < 1) throw std::invalid_argument("group size must be at least 1");
  if (s > grid.count())
    throw std::invalid_argument("group size " + std::to_string(s) + " exceeds patch count " +
                                std::to_string(grid.count()));
  if (key.row + grid.patch > reference.dim(0) || key.col + grid.patch > reference.dim(1))
    throw std::invalid_argument("key patch out of bounds");

  struct Candidate {
    double dist;
    std::size_t index;
  };
  std::vector<Candidate> cand;
  cand.reserve(grid.count());
  for (std::size_t t = 0; t < grid.count(); ++t) {
    if (grid.origins[t] == key) continue;
    cand.push_back({patch_distance_sq(reference, grid.patch, key, grid.origins[t]), t});
  }
  const std::size_t take = s - 1;
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(),
                    [](const Candidate& a, const Candidate& b) {
                      return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
                    });
  std::vector<PatchOrigin> members{key};
  for (std::size_t m = 0; m < take; ++m) members.push_back(grid.origins[cand[m].index]);
  return members;
}

NssGroup form_group(const DenseTensor& image, const ObservationMask& mask, std::span<const PatchOrigin> members,
                    std::size_t patch) {
  const Shape& shape = image.shape();
  require_spatial(shape, patch);
  if (mask.shape() != shape) throw std::invalid_argument("mask shape does not match image");
  if (members.empty()) throw std::invalid_argument("group needs at least one member");
  for (const PatchOrigin& o : members)
    if (o.row + patch > shape[0] || o.col + patch > shape[1])
      throw std::out_of_range("patch origin (" + std::to_string(o.row) + "," + std::to_string(o.col) +
                              ") out of bounds");

  Shape gshape{patch, patch};
  gshape.insert(gshape.end(), shape.begin() + 2, shape.end());
  gshape.push_back(members.size());

  const std::size_t plane = shape[0] * shape[1];
  const std::size_t bands = depth(shape);
  NssGroup g;
  g.members.assign(members.begin(), members.end());
  g.tensor = DenseTensor(gshape);
  std::vector<std::uint8_t> observed(g.tensor.size());
  std::size_t out = 0;
  for (const PatchOrigin& o : members)
    for (std::size_t band = 0; band < bands; ++band)
      for (std::size_t c = 0; c < patch; ++c)
        for (std::size_t r = 0; r < patch; ++r, ++out) {
          const std::size_t src = band * plane + (o.col + c) * shape[0] + o.row + r;
          g.tensor[out] = image[src];
          observed[out] = mask[src] ? 1 : 0;
        }
  g.mask = ObservationMask(gshape, std::move(observed));
  return g;
}

DenseTensor aggregate(std::span<const NssGroup> groups, const Shape& shape, const DenseTensor& fallback) {
  if (fallback.shape() != shape) throw std::invalid_argument("fallback shape does not match output shape");
  if (shape.size() < 2) throw std::invalid_argument("aggregate needs at least two spatial modes");
  const std::size_t plane = shape[0] * shape[1];
  const std::size_t bands = depth(shape);

  for (const NssGroup& g : groups) {
    const Shape& gs = g.tensor.shape();
    if (gs.size() != shape.size() + 1 || gs[0] != gs[1] || gs.back() != g.members.size() ||
        !std::equal(shape.begin() + 2, shape.end(), gs.begin() + 2))
      throw std::invalid_argument("group tensor shape does not match image layout");
    for (const PatchOrigin& o : g.members)
      if (o.row + gs[0] > shape[0] || o.col + gs[0] > shape[1])
        throw std::out_of_range("group member outside the image");
  }

  // Accumulate in a canonical group order so the floating-point sums are
  // identical however the caller ordered the groups.
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const NssGroup& ga = groups[a];
    const NssGroup& gb = groups[b];
    if (ga.members != gb.members) return ga.members < gb.members;
    const auto da = ga.tensor.data();
    const auto db = gb.tensor.data();
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
  });

  std::vector<double> sum(fallback.size(), 0.0);
  std::vector<std::uint32_t> count(fallback.size(), 0);
  for (std::size_t gi : order) {
    const NssGroup& g = groups[gi];
    const std::size_t patch = g.tensor.dim(0);
    std::size_t in = 0;
    for (const PatchOrigin& o : g.members)
      for (std::size_t band = 0; band < bands; ++band)
        for (std::size_t c = 0; c < patch; ++c)
          for (std::size_t r = 0; r < patch; ++r, ++in) {
            const std::size_t dst = band * plane + (o.col + c) * shape[0] + o.row + r;
            sum[dst] += g.tensor[in];
            ++count[dst];
          }
  }

  DenseTensor out = fallback;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (count[k] > 0) out[k] = sum[k] / count[k];
  return out;
}

}  // namespace nlfctn
