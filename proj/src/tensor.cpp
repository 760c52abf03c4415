#include "nlfctn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nlfctn {

namespace {

std::string shape_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < shape.size(); ++k) os << (k ? "," : "") << shape[k];
  os << ')';
  return os.str();
}

void check_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor order must be at least 1");
  for (std::size_t s : shape)
    if (s == 0) throw std::invalid_argument("tensor mode sizes must be positive, got " + shape_string(shape));
}

}  // namespace

std::size_t shape_size(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_size(shape_))
    throw std::invalid_argument("data length " + std::to_string(data_.size()) + " does not match shape " +
                                shape_string(shape_));
}

std::size_t DenseTensor::offset(std::span<const std::size_t> idx) const {
  if (idx.size() != shape_.size())
    throw std::out_of_range("index has " + std::to_string(idx.size()) + " entries for an order-" +
                            std::to_string(shape_.size()) + " tensor");
  std::size_t off = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= shape_[k])
      throw std::out_of_range("index " + std::to_string(idx[k]) + " out of range for mode " + std::to_string(k) +
                              " of size " + std::to_string(shape_[k]));
    off += idx[k] * stride;
    stride *= shape_[k];
  }
  return off;
}

Index DenseTensor::unravel(std::size_t off) const {
  Index idx(shape_.size());
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    idx[k] = off % shape_[k];
    off /= shape_[k];
  }
  return idx;
}

double& DenseTensor::at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
double DenseTensor::at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

ModeSplit ModeSplit::identity(std::size_t order, std::size_t d) {
  ModeSplit s;
  s.perm.resize(order);
  std::iota(s.perm.begin(), s.perm.end(), std::size_t{0});
  s.d = d;
  return s;
}

ModeSplit ModeSplit::mode(std::size_t order, std::size_t mode) {
  if (mode >= order)
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for order " + std::to_string(order));
  ModeSplit s;
  s.perm.push_back(mode);
  for (std::size_t k = 0; k < order; ++k)
    if (k != mode) s.perm.push_back(k);
  s.d = 1;
  return s;
}

void check_permutation(std::span<const std::size_t> perm, std::size_t order) {
  if (perm.size() != order)
    throw std::invalid_argument("permutation length " + std::to_string(perm.size()) +
                                " does not match tensor order " + std::to_string(order));
  std::vector<bool> seen(order, false);
  for (std::size_t p : perm) {
    if (p >= order) throw std::invalid_argument("permutation entry " + std::to_string(p) + " out of range");
    if (seen[p]) throw std::invalid_argument("permutation repeats mode " + std::to_string(p));
    seen[p] = true;
  }
}

void check_split(const ModeSplit& split, std::size_t order) {
  check_permutation(split.perm, order);
  // d == N is allowed for order 1 only, where the unfolding is a column vector.
  if (split.d < 1 || (split.d >= order && order > 1) || split.d > order)
    throw std::invalid_argument("split point d=" + std::to_string(split.d) + " out of range for order " +
                                std::to_string(order));
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv.at(perm[k]) = k;
  return inv;
}

DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm) {
  const std::size_t n = x.order();
  check_permutation(perm, n);

  Shape out_shape(n);
  for (std::size_t k = 0; k < n; ++k) out_shape[k] = x.dim(perm[k]);

  // Strides of the source tensor, reordered to follow the output modes.
  std::vector<std::size_t> src_stride(n);
  {
    std::size_t s = 1;
    std::vector<std::size_t> stride(n);
    for (std::size_t k = 0; k < n; ++k) {
      stride[k] = s;
      s *= x.dim(k);
    }
    for (std::size_t k = 0; k < n; ++k) src_stride[k] = stride[perm[k]];
  }

  DenseTensor y(out_shape);
  const auto src = x.data();
  auto dst = y.data();
  std::vector<std::size_t> counter(n, 0);
  std::size_t src_off = 0;
  const std::size_t inner = out_shape[0];
  const std::size_t inner_stride = src_stride[0];
  for (std::size_t out = 0; out < dst.size(); out += inner) {
    for (std::size_t i = 0; i < inner; ++i) dst[out + i] = src[src_off + i * inner_stride];
    for (std::size_t k = 1; k < n; ++k) {
      src_off += src_stride[k];
      if (++counter[k] < out_shape[k]) break;
      src_off -= src_stride[k] * out_shape[k];
      counter[k] = 0;
    }
  }
  return y;
}

Matrix gen_unfold(const DenseTensor& x, const ModeSplit& split) {
  check_split(split, x.order());
  std::size_t rows = 1;
  for (std::size_t k = 0; k < split.d; ++k) rows *= x.dim(split.perm[k]);
  const std::size_t cols = x.size() / rows;
  DenseTensor y = permute(x, split.perm);
  return Eigen::Map<const Matrix>(y.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

DenseTensor gen_fold(const Matrix& m, const ModeSplit& split, const Shape& shape) {
  check_split(split, shape.size());
  std::size_t rows = 1;
  for (std::size_t k = 0; k < split.d; ++k) rows *= shape.at(split.perm[k]);
  const std::size_t total = shape_size(shape);
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.size()) != total)
    throw std::invalid_argument("matrix of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                " cannot fold into shape " + shape_string(shape));
  Shape permuted(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) permuted[k] = shape[split.perm[k]];
  DenseTensor y(permuted, std::vector<double>(m.data(), m.data() + m.size()));
  return permute(y, inverse_permutation(split.perm));
}

Matrix mode_unfold(const DenseTensor& x, std::size_t mode) {
  if (x.order() == 1) {
    if (mode != 0) throw std::out_of_range("mode out of range for order 1");
    return Eigen::Map<const Matrix>(x.data().data(), static_cast<Eigen::Index>(x.size()), 1);
  }
  return gen_unfold(x, ModeSplit::mode(x.order(), mode));
}

DenseTensor mode_fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  if (shape.size() == 1) {
    if (static_cast<std::size_t>(m.size()) != shape[0]) throw std::invalid_argument("dimension mismatch in fold");
    return DenseTensor(shape, std::vector<double>(m.data(), m.data() + m.size()));
  }
  return gen_fold(m, ModeSplit::mode(shape.size(), mode), shape);
}

void require_same_shape(const DenseTensor& x, const DenseTensor& y, const char* what) {
  if (x.shape() != y.shape())
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_string(x.shape()) + " vs " +
                                shape_string(y.shape()));
}

DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y) {
  require_same_shape(x, y, "hadamard");
  DenseTensor z(x.shape());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = x[k] * y[k];
  return z;
}

DenseTensor axpy(double a, const DenseTensor& x, const DenseTensor& y) {
  require_same_shape(x, y, "axpy");
  DenseTensor z(x.shape());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = a * x[k] + y[k];
  return z;
}

double frobenius_norm(const DenseTensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return std::sqrt(s);
}

double distance(const DenseTensor& x, const DenseTensor& y) {
  require_same_shape(x, y, "distance");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace nlfctn
