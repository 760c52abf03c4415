#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlfctn/tensor.hpp"

namespace nlfctn {

/// FCTN-rank: bond dimensions R_{j,k} for every pair j < k of an order-n
/// network. Mode numbers are 0-based.
class FctnRank {
 public:
  FctnRank() = default;
  /// All bonds set to `value`.
  FctnRank(std::size_t order, std::size_t value);
  /// Bonds listed in the order (R_{1,2}, R_{1,3}, ..., R_{1,n}, R_{2,3}, ..., R_{n-1,n}).
  FctnRank(std::size_t order, const std::vector<std::size_t>& upper);

  /// R_{j,k} = min(I_j, I_k, cap).
  static FctnRank capped(const Shape& dims, std::size_t cap);

  std::size_t order() const { return order_; }
  /// Bond between modes j and k (symmetric in j, k; j != k).
  std::size_t operator()(std::size_t j, std::size_t k) const;
  void set(std::size_t j, std::size_t k, std::size_t value);
  /// Bonds in the same order the list constructor takes.
  std::vector<std::size_t> upper() const;

  bool operator==(const FctnRank&) const = default;

 private:
  std::size_t order_ = 0;
  std::vector<std::size_t> bonds_;  // order_ x order_, row-major, symmetric
};

/// Factor shape for mode k: (R_{1,k}, ..., R_{k-1,k}, I_k, R_{k,k+1}, ..., R_{k,n}).
Shape factor_shape(const Shape& dims, const FctnRank& rank, std::size_t k);

struct FctnFactors {
  Shape dims;  ///< physical mode sizes (I_1, ..., I_n)
  std::vector<DenseTensor> factors;

  std::size_t order() const { return dims.size(); }
  /// Bond sizes as they appear in the factors (read from factor k < j, mode j).
  FctnRank rank() const;
};

struct Violation {
  std::size_t factor;
  std::size_t mode;
  std::size_t expected;
  std::size_t actual;
  std::string message;
};

/// Every shape inconsistency between `f` and `rank`. Empty when consistent.
std::vector<Violation> validate(const FctnFactors& f, const FctnRank& rank);

/// Mode label in a contraction network: a physical mode (k, k) or the bond
/// between factors j < k, written (j, k).
struct ModeLabel {
  std::size_t lo;
  std::size_t hi;

  static ModeLabel physical(std::size_t k) { return {k, k}; }
  static ModeLabel bond(std::size_t j, std::size_t k) { return j < k ? ModeLabel{j, k} : ModeLabel{k, j}; }
  bool is_physical() const { return lo == hi; }
  bool operator==(const ModeLabel&) const = default;
};

struct LabeledTensor {
  DenseTensor tensor;
  std::vector<ModeLabel> labels;
};

/// Contracts every label shared by `a` and `b`. Result modes are the free
/// modes of `a` followed by the free modes of `b`, each in original order.
LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b);

LabeledTensor label_factor(const FctnFactors& f, std::size_t k);

/// Evaluates one entry by explicit summation over every bond index tuple.
/// Exponential in the number of bonds; refuses networks with more than
/// 10^6 bond tuples.
double eval_element(const FctnFactors& f, std::span<const std::size_t> idx);

/// The full tensor FCTN(G_1, ..., G_n), contracted left to right.
DenseTensor contract_all(const FctnFactors& f);

/// M_i: contraction of every factor except G_i.
///
/// Modes are grouped per remaining factor k in ascending order: (I_k, R_{k,i})
/// when k < i, (R_{i,k}, I_k) when k > i. With this layout the pair-selection
/// maps m_j = 2j (j < i), 2j-1 (j >= i) pick out exactly the bond modes.
struct LeaveOneOut {
  std::size_t excluded;
  DenseTensor tensor;
  std::vector<ModeLabel> labels;
};

LeaveOneOut leave_one_out(const FctnFactors& f, std::size_t i);

/// Unfolding of M_i with the bond modes to G_i as rows (ascending partner)
/// and the remaining physical modes as columns (ascending), so that
/// mode_unfold(X, i) == mode_unfold(G_i, i) * unfold_leave_one_out(M_i).
Matrix unfold_leave_one_out(const LeaveOneOut& m);

}  // namespace nlfctn
