#pragma once

#include <cstdint>
#include <vector>

#include "nlfctn/fctn.hpp"
#include "nlfctn/tensor.hpp"

namespace nlfctn {

/// Observed-index set Omega: true where the entry is known.
class ObservationMask {
 public:
  ObservationMask() = default;
  explicit ObservationMask(Shape shape, bool observed = true);
  ObservationMask(Shape shape, std::vector<std::uint8_t> observed);

  /// Nonzero entries of `t` are observed.
  static ObservationMask from_tensor(const DenseTensor& t);
  /// 1.0 for observed entries, 0.0 elsewhere.
  DenseTensor to_tensor() const;

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return observed_.size(); }
  bool operator[](std::size_t offset) const { return observed_[offset] != 0; }
  void set(std::size_t offset, bool value) { observed_.at(offset) = value ? 1 : 0; }
  std::size_t count_observed() const;

  bool operator==(const ObservationMask&) const = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> observed_;
};

/// P_Omega(x): keeps observed entries, zeroes the rest.
DenseTensor project_observed(const DenseTensor& x, const ObservationMask& mask);

struct PamConfig {
  double rho = 0.01;
  std::size_t max_iters = 100;
  /// Stop once ||X^{q+1} - X^q||_F / ||X^q||_F < tol.
  double tol = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PamTrace {
  /// 1/2 ||X - FCTN(G)||_F^2, starting with the initial iterate at index 0.
  std::vector<double> objective;
  /// rho/2 (sum_i ||G_i^{q+1} - G_i^q||^2 + ||X^{q+1} - X^q||^2) for each sweep.
  std::vector<double> proximal;
  std::vector<double> relative_change;
  std::size_t iterations = 0;
  bool converged = false;
  double seconds = 0.0;
};

struct CompletionResult {
  DenseTensor x;
  FctnFactors factors;
  PamTrace trace;
};

/// Factors of the given rank filled with i.i.d. uniform [0,1) values.
FctnFactors init_factors(const Shape& dims, const FctnRank& rank, std::uint64_t seed);

/// Closed-form proximal update of factor i:
///   (G_i)_(i) <- [X_(i) A^T + rho (G_i)_(i)] [A A^T + rho I]^{-1},
/// where A is the bond-by-physical unfolding of M_i.
DenseTensor update_factor(const FctnFactors& f, std::size_t i, const DenseTensor& x_current, double rho);

/// P_{Omega^c}((approx + rho x_prev) / (1 + rho)) + P_Omega(observed).
DenseTensor update_tensor(const DenseTensor& approx, const DenseTensor& x_prev, const ObservationMask& mask,
                          const DenseTensor& observed, double rho);
DenseTensor update_tensor(const FctnFactors& f, const DenseTensor& x_prev, const ObservationMask& mask,
                          const DenseTensor& observed, double rho);

/// 1/2 ||X_(i) - (G_i)_(i) A||^2 + rho/2 ||G_i - anchor||^2 for a candidate G_i.
double factor_subproblem_objective(const FctnFactors& f, std::size_t i, const DenseTensor& candidate,
                                   const DenseTensor& anchor, const DenseTensor& x, double rho);

/// FCTN completion by proximal alternating minimization.
///
/// `t` supplies the observed values on the mask and the starting iterate X^0
/// off the mask. Each sweep updates G_1..G_N in order, then X.
CompletionResult pam_complete(const DenseTensor& t, const ObservationMask& mask, const FctnRank& rank,
                              const PamConfig& config);

}  // namespace nlfctn
