#include "nlfctn/fctn.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlfctn {

FctnRank::FctnRank(std::size_t order, std::size_t value) : order_(order), bonds_(order * order, 0) {
  if (order < 2) throw std::invalid_argument("FCTN rank needs order >= 2");
  if (value < 1) throw std::invalid_argument("FCTN rank entries must be >= 1");
  for (std::size_t j = 0; j < order; ++j)
    for (std::size_t k = 0; k < order; ++k)
      if (j != k) bonds_[j * order + k] = value;
}

FctnRank::FctnRank(std::size_t order, const std::vector<std::size_t>& upper) : FctnRank(order, 1) {
  if (upper.size() != order * (order - 1) / 2)
    throw std::invalid_argument("FCTN rank of order " + std::to_string(order) + " needs " +
                                std::to_string(order * (order - 1) / 2) + " entries, got " +
                                std::to_string(upper.size()));
  std::size_t pos = 0;
  for (std::size_t j = 0; j < order; ++j)
    for (std::size_t k = j + 1; k < order; ++k) set(j, k, upper[pos++]);
}

FctnRank FctnRank::capped(const Shape& dims, std::size_t cap) {
  FctnRank r(dims.size(), 1);
  for (std::size_t j = 0; j < dims.size(); ++j)
    for (std::size_t k = j + 1; k < dims.size(); ++k) r.set(j, k, std::max<std::size_t>(1, std::min({dims[j], dims[k], cap})));
  return r;
}

std::size_t FctnRank::operator()(std::size_t j, std::size_t k) const {
  if (j >= order_ || k >= order_ || j == k) throw std::out_of_range("invalid FCTN bond index");
  return bonds_[j * order_ + k];
}

void FctnRank::set(std::size_t j, std::size_t k, std::size_t value) {
  if (j >= order_ || k >= order_ || j == k) throw std::out_of_range("invalid FCTN bond index");
  if (value < 1) throw std::invalid_argument("FCTN rank entries must be >= 1");
  bonds_[j * order_ + k] = value;
  bonds_[k * order_ + j] = value;
}

std::vector<std::size_t> FctnRank::upper() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < order_; ++j)
    for (std::size_t k = j + 1; k < order_; ++k) out.push_back(bonds_[j * order_ + k]);
  return out;
}

Shape factor_shape(const Shape& dims, const FctnRank& rank, std::size_t k) {
  if (rank.order() != dims.size()) throw std::invalid_argument("rank order does not match tensor order");
  Shape s(dims.size());
  for (std::size_t j = 0; j < dims.size(); ++j) s[j] = j == k ? dims[k] : rank(j, k);
  return s;
}

FctnRank FctnFactors::rank() const {
  FctnRank r(order(), 1);
  for (std::size_t j = 0; j < order(); ++j)
    for (std::size_t k = j + 1; k < order(); ++k) r.set(j, k, factors.at(j).dim(k));
  return r;
}

std::vector<Violation> validate(const FctnFactors& f, const FctnRank& rank) {
  std::vector<Violation> out;
  const std::size_t n = f.dims.size();
  for (std::size_t k = 0; k < n; ++k)
    if (f.dims[k] == 0) out.push_back({k, k, 1, 0, "physical dimension " + std::to_string(k) + " is zero"});
  if (rank.order() != n)
    out.push_back({0, 0, n, rank.order(), "rank order does not match number of physical dimensions"});
  if (f.factors.size() != n)
    out.push_back({0, 0, n, f.factors.size(), "factor count does not match tensor order"});
  if (!out.empty() && (rank.order() != n || f.factors.size() != n)) return out;

  for (std::size_t k = 0; k < n; ++k) {
    const DenseTensor& g = f.factors[k];
    if (g.order() != n) {
      out.push_back({k, 0, n, g.order(), "factor " + std::to_string(k) + " has wrong order"});
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t expected = j == k ? f.dims[k] : rank(j, k);
      if (g.dim(j) != expected)
        out.push_back({k, j, expected, g.dim(j),
                       "factor " + std::to_string(k) + " mode " + std::to_string(j) + ": expected extent " +
                           std::to_string(expected) + ", got " + std::to_string(g.dim(j))});
    }
  }
  return out;
}

namespace {

void require_valid(const FctnFactors& f) {
  if (f.order() < 2) throw std::invalid_argument("FCTN network needs order >= 2");
  if (f.factors.size() != f.order()) throw std::invalid_argument("factor count does not match tensor order");
  for (std::size_t k = 0; k < f.order(); ++k)
    if (f.factors[k].order() != f.order()) throw std::invalid_argument("factor with wrong order");
  auto report = validate(f, f.rank());
  if (!report.empty()) throw std::invalid_argument("inconsistent FCTN factors: " + report.front().message);
}

LabeledTensor contract_sequence(const FctnFactors& f, std::size_t skip) {
  LabeledTensor acc;
  bool first = true;
  for (std::size_t k = 0; k < f.order(); ++k) {
    if (k == skip) continue;
    if (first) {
      acc = label_factor(f, k);
      first = false;
    } else {
      acc = contract(acc, label_factor(f, k));
    }
  }
  return acc;
}

LabeledTensor reorder(const LabeledTensor& t, const std::vector<ModeLabel>& target) {
  std::vector<std::size_t> perm;
  perm.reserve(target.size());
  for (const ModeLabel& want : target) {
    auto it = std::find(t.labels.begin(), t.labels.end(), want);
    if (it == t.labels.end()) throw std::logic_error("label missing in contraction result");
    perm.push_back(static_cast<std::size_t>(it - t.labels.begin()));
  }
  return {permute(t.tensor, perm), target};
}

}  // namespace

LabeledTensor label_factor(const FctnFactors& f, std::size_t k) {
  LabeledTensor t{f.factors.at(k), {}};
  for (std::size_t j = 0; j < f.order(); ++j)
    t.labels.push_back(j == k ? ModeLabel::physical(k) : ModeLabel::bond(j, k));
  return t;
}

LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b) {
  std::vector<std::size_t> a_free, a_shared, b_free, b_shared;
  for (std::size_t p = 0; p < a.labels.size(); ++p) {
    auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[p]);
    if (it == b.labels.end()) {
      a_free.push_back(p);
    } else {
      a_shared.push_back(p);
      b_shared.push_back(static_cast<std::size_t>(it - b.labels.begin()));
    }
  }
  for (std::size_t p = 0; p < b.labels.size(); ++p)
    if (std::find(b_shared.begin(), b_shared.end(), p) == b_shared.end()) b_free.push_back(p);
  for (std::size_t s = 0; s < a_shared.size(); ++s)
    if (a.tensor.dim(a_shared[s]) != b.tensor.dim(b_shared[s]))
      throw std::invalid_argument("bond extent mismatch in contraction");
  if (a_free.empty() && b_free.empty()) throw std::invalid_argument("contraction would eliminate every mode");

  // Permute so each side becomes a plain column-major matrix:
  // a -> (free_a | shared), b -> (shared | free_b).
  auto as_matrix = [](const DenseTensor& t, const std::vector<std::size_t>& first,
                      const std::vector<std::size_t>& second) {
    std::vector<std::size_t> perm = first;
    perm.insert(perm.end(), second.begin(), second.end());
    std::size_t rows = 1;
    for (std::size_t p : first) rows *= t.dim(p);
    DenseTensor pt = permute(t, perm);
    return Matrix(Eigen::Map<const Matrix>(pt.data().data(), static_cast<Eigen::Index>(rows),
                                           static_cast<Eigen::Index>(pt.size() / rows)));
  };
  const Matrix cm = as_matrix(a.tensor, a_free, a_shared) * as_matrix(b.tensor, b_shared, b_free);

  LabeledTensor c;
  Shape shape;
  for (std::size_t p : a_free) {
    shape.push_back(a.tensor.dim(p));
    c.labels.push_back(a.labels[p]);
  }
  for (std::size_t p : b_free) {
    shape.push_back(b.tensor.dim(p));
    c.labels.push_back(b.labels[p]);
  }
  c.tensor = DenseTensor(shape, std::vector<double>(cm.data(), cm.data() + cm.size()));
  return c;
}

double eval_element(const FctnFactors& f, std::span<const std::size_t> idx) {
  require_valid(f);
  const std::size_t n = f.order();
  if (idx.size() != n) throw std::out_of_range("index length does not match tensor order");
  for (std::size_t k = 0; k < n; ++k)
    if (idx[k] >= f.dims[k]) throw std::out_of_range("index out of range in eval_element");

  const FctnRank rank = f.rank();
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  double tuples = 1.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      bonds.emplace_back(j, k);
      tuples *= static_cast<double>(rank(j, k));
    }
  if (tuples > 1e6) throw std::invalid_argument("eval_element is limited to 10^6 bond tuples");

  // r(j, k) for the current tuple, stored symmetric.
  std::vector<std::size_t> r(n * n, 0);
  std::vector<std::size_t> counter(bonds.size(), 0);
  Index sub(n);
  double total = 0.0;
  while (true) {
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      r[bonds[b].first * n + bonds[b].second] = counter[b];
      r[bonds[b].second * n + bonds[b].first] = counter[b];
    }
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) sub[j] = j == k ? idx[k] : r[j * n + k];
      prod *= f.factors[k].at(sub);
    }
    total += prod;

    std::size_t b = 0;
    for (; b < bonds.size(); ++b) {
      if (++counter[b] < rank(bonds[b].first, bonds[b].second)) break;
      counter[b] = 0;
    }
    if (b == bonds.size()) break;
  }
  return total;
}

DenseTensor contract_all(const FctnFactors& f) {
  require_valid(f);
  LabeledTensor acc = contract_sequence(f, f.order());
  std::vector<ModeLabel> target;
  for (std::size_t k = 0; k < f.order(); ++k) target.push_back(ModeLabel::physical(k));
  return reorder(acc, target).tensor;
}

LeaveOneOut leave_one_out(const FctnFactors& f, std::size_t i) {
  require_valid(f);
  if (i >= f.order()) throw std::out_of_range("leave_one_out factor index out of range");
  LabeledTensor acc = contract_sequence(f, i);
  std::vector<ModeLabel> target;
  for (std::size_t k = 0; k < f.order(); ++k) {
    if (k == i) continue;
    if (k < i) {
      target.push_back(ModeLabel::physical(k));
      target.push_back(ModeLabel::bond(k, i));
    } else {
      target.push_back(ModeLabel::bond(i, k));
      target.push_back(ModeLabel::physical(k));
    }
  }
  LabeledTensor ordered = reorder(acc, target);
  return {i, std::move(ordered.tensor), std::move(ordered.labels)};
}

Matrix unfold_leave_one_out(const LeaveOneOut& m) {
  const std::size_t remaining = m.labels.size() / 2;
  if (m.labels.size() != 2 * remaining || m.tensor.order() != m.labels.size())
    throw std::invalid_argument("leave-one-out composite has malformed labels");
  const std::size_t i = m.excluded;  // 0-based; the 1-based index is i + 1

  // With 1-based j and factor index i+1: m_j = 2j if j < i+1 else 2j-1, n_j the other one.
  ModeSplit split;
  std::vector<std::size_t> rows, cols;
  for (std::size_t j = 1; j <= remaining; ++j) {
    const bool before = j < i + 1;
    const std::size_t mj = before ? 2 * j : 2 * j - 1;
    const std::size_t nj = before ? 2 * j - 1 : 2 * j;
    const std::size_t partner = before ? j - 1 : j;
    if (!(m.labels[mj - 1] == ModeLabel::bond(partner, i)) || !(m.labels[nj - 1] == ModeLabel::physical(partner)))
      throw std::invalid_argument("leave-one-out composite labels do not match excluded factor");
    rows.push_back(mj - 1);
    cols.push_back(nj - 1);
  }
  split.perm = rows;
  split.perm.insert(split.perm.end(), cols.begin(), cols.end());
  split.d = remaining;
  return gen_unfold(m.tensor, split);
}

}  // namespace nlfctn
