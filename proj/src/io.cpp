#include "nlfctn/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <regex>
#include <sstream>

#include <png.h>

#include "nlfctn/random.hpp"

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace nlfctn {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string dict_value(const std::string& header, const std::string& key) {
  const std::regex re("['\"]" + key + "['\"]\\s*:\\s*(\\([^)]*\\)|'[^']*'|\"[^\"]*\"|True|False)");
  std::smatch m;
  if (!std::regex_search(header, m, re)) throw IoError("NPY header lacks key '" + key + "'");
  return m[1].str();
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::string inner = text.substr(1, text.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (!std::all_of(item.begin(), item.end(), ::isdigit)) throw IoError("malformed NPY shape " + text);
    shape.push_back(std::stoull(item));
  }
  return shape;
}

}  // namespace

DenseTensor parse_npy(const std::vector<char>& bytes) {
  for (std::size_t k = 0; k < kMagicLen; ++k)
    if (k >= bytes.size() || bytes[k] != kMagic[k])
      throw IoError("not an NPY file: bad magic at byte offset " + std::to_string(k));
  if (bytes.size() < 10) throw IoError("truncated NPY preamble");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw IoError("truncated NPY preamble");
    for (int b = 3; b >= 0; --b) header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + b]);
    header_start = 12;
  } else {
    throw IoError("unsupported NPY version " + std::to_string(major) + " at byte offset 6");
  }
  if (bytes.size() < header_start + header_len) throw IoError("truncated NPY header");
  const std::string header(bytes.data() + header_start, header_len);

  std::string descr = dict_value(header, "descr");
  descr = descr.substr(1, descr.size() - 2);
  const bool fortran = dict_value(header, "fortran_order") == "True";
  Shape shape = parse_shape(dict_value(header, "shape"));
  if (shape.empty()) shape = {1};  // 0-d array
  for (std::size_t s : shape)
    if (s == 0) throw IoError("NPY arrays with a zero-length dimension are not supported");

  std::size_t item = 0;
  if (descr == "<f8") item = 8;
  else if (descr == "<f4") item = 4;
  else if (descr == "|u1" || descr == "|b1") item = 1;
  else throw IoError("unsupported NPY dtype '" + descr + "'");

  const std::size_t count = shape_size(shape);
  const std::size_t payload = header_start + header_len;
  if (bytes.size() < payload + count * item)
    throw IoError("truncated NPY payload: expected " + std::to_string(count * item) + " bytes, found " +
                  std::to_string(bytes.size() - payload));

  std::vector<double> values(count);
  const char* src = bytes.data() + payload;
  for (std::size_t k = 0; k < count; ++k) {
    if (item == 8) {
      std::memcpy(&values[k], src + 8 * k, 8);
    } else if (item == 4) {
      float f;
      std::memcpy(&f, src + 4 * k, 4);
      values[k] = f;
    } else {
      values[k] = static_cast<unsigned char>(src[k]);
    }
  }

  if (fortran) return DenseTensor(shape, std::move(values));
  // C order is column-major over the reversed shape.
  Shape reversed(shape.rbegin(), shape.rend());
  DenseTensor c_layout(reversed, std::move(values));
  std::vector<std::size_t> perm(shape.size());
  std::iota(perm.rbegin(), perm.rend(), std::size_t{0});
  return permute(c_layout, perm);
}

std::vector<char> encode_npy(const DenseTensor& x) {
  // numpy writes "(5,)" and "(2, 3)"
  std::string shape = "(";
  for (std::size_t k = 0; k < x.order(); ++k) {
    if (k) shape += ", ";
    shape += std::to_string(x.dim(k));
  }
  if (x.order() == 1) shape += ",";
  shape += ")";

  std::string header = "{'descr': '<f8', 'fortran_order': True, 'shape': " + shape + ", }";
  // Pad with spaces so magic + version + length + header + '\n' is a multiple of 64.
  const std::size_t unpadded = kMagicLen + 2 + 2 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  if (header.size() > 0xffff) throw IoError("NPY header too long for format v1.0");

  std::vector<char> out(kMagic, kMagic + kMagicLen);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out.insert(out.end(), header.begin(), header.end());
  const auto* raw = reinterpret_cast<const char*>(x.data().data());
  out.insert(out.end(), raw, raw + x.size() * sizeof(double));
  return out;
}

DenseTensor load_tensor(const std::filesystem::path& path) {
  try {
    return parse_npy(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_tensor(const std::filesystem::path& path, const DenseTensor& x) { write_file(path, encode_npy(x)); }

ObservationMask load_mask(const std::filesystem::path& path) { return ObservationMask::from_tensor(load_tensor(path)); }

void save_mask(const std::filesystem::path& path, const ObservationMask& mask) { save_tensor(path, mask.to_tensor()); }

ObservationMask make_mask(const Shape& shape, double missing_rate, std::uint64_t seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0))
    throw std::invalid_argument("missing rate must lie in [0, 1), got " + std::to_string(missing_rate));
  const std::size_t total = shape_size(shape);
  // The small offset keeps products like 0.95 * 100 from flooring to 94.
  const auto missing = static_cast<std::size_t>(std::floor(missing_rate * static_cast<double>(total) + 1e-9));

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = 0; k < missing; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(total - k));
    std::swap(order[k], order[pick]);
  }
  ObservationMask mask(shape, true);
  for (std::size_t k = 0; k < missing; ++k) mask.set(order[k], false);
  return mask;
}

void export_png(const std::filesystem::path& path, const DenseTensor& image, const std::vector<std::size_t>& channels,
                std::size_t outer) {
  if (image.order() < 2) throw std::invalid_argument("PNG export needs a spatial image");
  if (channels.size() != 1 && channels.size() != 3)
    throw std::invalid_argument("PNG export takes one band (grayscale) or three (RGB)");
  const std::size_t rows = image.dim(0);
  const std::size_t cols = image.dim(1);
  const std::size_t plane = rows * cols;
  const std::size_t spectral = image.order() > 2 ? image.dim(2) : 1;
  const std::size_t outer_count = image.size() / (plane * spectral);
  if (outer >= outer_count) throw std::out_of_range("slice index beyond the trailing modes");
  for (std::size_t c : channels)
    if (c >= spectral) throw std::out_of_range("band " + std::to_string(c) + " out of range");

  const std::size_t nch = channels.size();
  std::vector<png_byte> pixels(plane * nch);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t ch = 0; ch < nch; ++ch) {
        const double v = image[r + rows * c + plane * (channels[ch] + spectral * outer)];
        const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        pixels[(r * cols + c) * nch + ch] = static_cast<png_byte>(std::lround(clamped * 255.0));
      }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               nch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < rows; ++r) png_write_row(png, pixels.data() + r * cols * nch);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace nlfctn
