#include "nlfctn/completion.hpp"

#include <chrono>
#include <random>
#include <stdexcept>
#include <string>

#include "nlfctn/random.hpp"

namespace nlfctn {

ObservationMask::ObservationMask(Shape shape, bool observed)
    : shape_(std::move(shape)), observed_(shape_size(shape_), observed ? 1 : 0) {
  if (shape_.empty()) throw std::invalid_argument("mask order must be at least 1");
}

ObservationMask::ObservationMask(Shape shape, std::vector<std::uint8_t> observed)
    : shape_(std::move(shape)), observed_(std::move(observed)) {
  if (shape_.empty()) throw std::invalid_argument("mask order must be at least 1");
  if (observed_.size() != shape_size(shape_)) throw std::invalid_argument("mask data does not match shape");
  for (auto& v : observed_) v = v ? 1 : 0;
}

ObservationMask ObservationMask::from_tensor(const DenseTensor& t) {
  std::vector<std::uint8_t> obs(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) obs[k] = t[k] != 0.0 ? 1 : 0;
  return ObservationMask(t.shape(), std::move(obs));
}

DenseTensor ObservationMask::to_tensor() const {
  DenseTensor t(shape_);
  for (std::size_t k = 0; k < size(); ++k) t[k] = observed_[k] ? 1.0 : 0.0;
  return t;
}

std::size_t ObservationMask::count_observed() const {
  std::size_t c = 0;
  for (auto v : observed_) c += v;
  return c;
}

DenseTensor project_observed(const DenseTensor& x, const ObservationMask& mask) {
  if (x.shape() != mask.shape()) throw std::invalid_argument("mask shape does not match tensor");
  DenseTensor y(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = mask[k] ? x[k] : 0.0;
  return y;
}

void PamConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
}

FctnFactors init_factors(const Shape& dims, const FctnRank& rank, std::uint64_t seed) {
  if (rank.order() != dims.size()) throw std::invalid_argument("rank order does not match tensor order");
  Rng rng(seed);
  FctnFactors f;
  f.dims = dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    DenseTensor g(factor_shape(dims, rank, k));
    for (double& v : g.data()) v = rng.uniform();
    f.factors.push_back(std::move(g));
  }
  return f;
}

DenseTensor update_factor(const FctnFactors& f, std::size_t i, const DenseTensor& x_current, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("update_factor requires rho > 0");
  if (x_current.shape() != f.dims) throw std::invalid_argument("tensor shape does not match factor network");
  const DenseTensor& g = f.factors.at(i);

  const Matrix a = unfold_leave_one_out(leave_one_out(f, i));  // bonds x physical
  const Matrix xi = mode_unfold(x_current, i);                  // I_i x physical
  const Matrix gi = mode_unfold(g, i);                          // I_i x bonds

  // G (A A^T + rho I) = X A^T + rho G_old; solved transposed against the SPD system.
  Matrix gram = a * a.transpose();
  gram.diagonal().array() += rho;
  const Matrix rhs = a * xi.transpose() + rho * gi.transpose();
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ridge system is not positive definite");
  const Matrix updated = llt.solve(rhs).transpose();
  return mode_fold(updated, i, g.shape());
}

double factor_subproblem_objective(const FctnFactors& f, std::size_t i, const DenseTensor& candidate,
                                   const DenseTensor& anchor, const DenseTensor& x, double rho) {
  const Matrix a = unfold_leave_one_out(leave_one_out(f, i));
  const Matrix residual = mode_unfold(x, i) - mode_unfold(candidate, i) * a;
  const double prox = distance(candidate, anchor);
  return 0.5 * residual.squaredNorm() + 0.5 * rho * prox * prox;
}

DenseTensor update_tensor(const DenseTensor& approx, const DenseTensor& x_prev, const ObservationMask& mask,
                          const DenseTensor& observed, double rho) {
  require_same_shape(approx, x_prev, "update_tensor");
  require_same_shape(approx, observed, "update_tensor");
  if (approx.shape() != mask.shape()) throw std::invalid_argument("update_tensor: mask shape mismatch");
  DenseTensor next(approx.shape());
  const double scale = 1.0 / (1.0 + rho);
  for (std::size_t k = 0; k < next.size(); ++k)
    next[k] = mask[k] ? observed[k] : (approx[k] + rho * x_prev[k]) * scale;
  return next;
}

DenseTensor update_tensor(const FctnFactors& f, const DenseTensor& x_prev, const ObservationMask& mask,
                          const DenseTensor& observed, double rho) {
  return update_tensor(contract_all(f), x_prev, mask, observed, rho);
}

CompletionResult pam_complete(const DenseTensor& t, const ObservationMask& mask, const FctnRank& rank,
                              const PamConfig& config) {
  config.validate();
  if (t.shape() != mask.shape()) throw std::invalid_argument("pam_complete: mask shape does not match tensor");
  if (mask.count_observed() == 0) throw std::invalid_argument("pam_complete: mask has no observed entries");
  if (rank.order() != t.order())
    throw std::invalid_argument("pam_complete: rank of order " + std::to_string(rank.order()) +
                                " for a tensor of order " + std::to_string(t.order()));

  const auto start = std::chrono::steady_clock::now();
  CompletionResult result;
  result.factors = init_factors(t.shape(), rank, config.seed);
  // X^0 agrees with t everywhere; t's off-mask values act as the warm start.
  result.x = t;

  FctnFactors& f = result.factors;
  DenseTensor& x = result.x;
  PamTrace& trace = result.trace;

  auto half_sq = [](const DenseTensor& a, const DenseTensor& b) {
    const double d = distance(a, b);
    return 0.5 * d * d;
  };
  trace.objective.push_back(half_sq(x, contract_all(f)));

  for (std::size_t q = 0; q < config.max_iters; ++q) {
    double prox = 0.0;
    for (std::size_t i = 0; i < f.order(); ++i) {
      DenseTensor updated = update_factor(f, i, x, config.rho);
      prox += half_sq(updated, f.factors[i]);
      f.factors[i] = std::move(updated);
    }
    const DenseTensor approx = contract_all(f);
    DenseTensor next = update_tensor(approx, x, mask, t, config.rho);

    const double step = distance(next, x);
    const double base = frobenius_norm(x);
    const double change = base > 0.0 ? step / base : (step > 0.0 ? 1.0 : 0.0);
    prox += 0.5 * step * step;
    x = std::move(next);

    trace.objective.push_back(half_sq(x, approx));
    trace.proximal.push_back(config.rho * prox);
    trace.relative_change.push_back(change);
    trace.iterations = q + 1;
    if (change < config.tol) {
      trace.converged = true;
      break;
    }
  }
  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace nlfctn
