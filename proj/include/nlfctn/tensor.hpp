#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlfctn {

using Shape = std::vector<std::size_t>;
using Index = std::vector<std::size_t>;
using Matrix = Eigen::MatrixXd;

/// Number of entries described by a shape (1 for the empty shape).
std::size_t shape_size(std::span<const std::size_t> shape);

/// Dense N-dimensional array of doubles.
///
/// Storage is column-major: the first mode varies fastest, so the mode-1
/// unfolding of a tensor is its raw data viewed as an I_1 x (I_2...I_N)
/// matrix. Element access takes 0-based indices; the 1-based
/// (i_1, ..., i_N) notation of the math maps to `at({i_1-1, ..., i_N-1})`.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double& operator[](std::size_t offset) { return data_[offset]; }
  double operator[](std::size_t offset) const { return data_[offset]; }

  double& at(std::span<const std::size_t> idx);
  double at(std::span<const std::size_t> idx) const;
  double& at(std::initializer_list<std::size_t> idx) { return at(std::span(idx.begin(), idx.size())); }
  double at(std::initializer_list<std::size_t> idx) const { return at(std::span(idx.begin(), idx.size())); }

  std::size_t offset(std::span<const std::size_t> idx) const;
  Index unravel(std::size_t offset) const;

  bool operator==(const DenseTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Row/column split for a generalized unfolding: the modes `perm[0..d)`
/// index rows and `perm[d..N)` index columns. Mode numbers are 0-based.
struct ModeSplit {
  std::vector<std::size_t> perm;
  std::size_t d = 1;

  static ModeSplit identity(std::size_t order, std::size_t d = 1);
  /// Mode `mode` first, the rest in ascending order, d = 1.
  static ModeSplit mode(std::size_t order, std::size_t mode);
};

void check_permutation(std::span<const std::size_t> perm, std::size_t order);
/// Throws std::invalid_argument unless `split` is valid for `order`.
void check_split(const ModeSplit& split, std::size_t order);

/// y(j_1..j_N) = x(i) with j_k = i_{perm[k]}; shape(y)[k] = shape(x)[perm[k]].
DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

Matrix gen_unfold(const DenseTensor& x, const ModeSplit& split);
DenseTensor gen_fold(const Matrix& m, const ModeSplit& split, const Shape& shape);

Matrix mode_unfold(const DenseTensor& x, std::size_t mode);
DenseTensor mode_fold(const Matrix& m, std::size_t mode, const Shape& shape);

DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y);
/// a*x + y
DenseTensor axpy(double a, const DenseTensor& x, const DenseTensor& y);
double frobenius_norm(const DenseTensor& x);
/// ||x - y||_F
double distance(const DenseTensor& x, const DenseTensor& y);

void require_same_shape(const DenseTensor& x, const DenseTensor& y, const char* what);

}  // namespace nlfctn
