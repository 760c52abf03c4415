#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlfctn/completion.hpp"
#include "nlfctn/tensor.hpp"

namespace nlfctn {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NPY v1.0 interchange. Tensors are written as little-endian float64 with
// fortran_order True, which is exactly the in-memory column-major layout.
// Reading accepts either order and <f8, <f4, |u1 or |b1 payloads.
DenseTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const DenseTensor& x);

DenseTensor parse_npy(const std::vector<char>& bytes);
std::vector<char> encode_npy(const DenseTensor& x);

/// Masks are 0/1 float arrays; any nonzero entry counts as observed.
ObservationMask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const ObservationMask& mask);

/// Exactly floor(missing_rate * total) entries unobserved, drawn uniformly
/// without replacement from `seed`.
ObservationMask make_mask(const Shape& shape, double missing_rate, std::uint64_t seed);

/// 8-bit PNG of one spatial slice. `channels` lists one (grayscale) or three
/// (RGB) band indices along mode 2; `outer` indexes the modes after it.
/// Values are clamped to [0,1] and rounded to 0..255.
void export_png(const std::filesystem::path& path, const DenseTensor& image, const std::vector<std::size_t>& channels,
                std::size_t outer = 0);

}  // namespace nlfctn
