#include <gtest/gtest.h>

#include <cmath>

#include "nlfctn/completion.hpp"
#include "nlfctn/fctn.hpp"
#include "test_helpers.hpp"

using namespace nlfctn;
using nlfctn::testing::normal_factors;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

FctnFactors random_instance(Rng& rng, std::size_t order, std::size_t max_dim, std::size_t max_rank,
                            std::uint64_t seed) {
  Shape dims(order);
  for (auto& d : dims) d = 1 + rng.below(max_dim);
  FctnRank rank(order, 1);
  for (std::size_t j = 0; j < order; ++j)
    for (std::size_t k = j + 1; k < order; ++k) rank.set(j, k, 1 + rng.below(max_rank));
  return normal_factors(dims, rank, seed);
}

}  // namespace

TEST(FctnRank, ListOrderAndCapping) {
  FctnRank r(4, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(r(0, 1), 1u);
  EXPECT_EQ(r(0, 3), 3u);
  EXPECT_EQ(r(2, 1), 4u);
  EXPECT_EQ(r(2, 3), 6u);
  EXPECT_EQ(r.upper(), (std::vector<std::size_t>{1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(FctnRank(3, {1, 2}), std::invalid_argument);
  EXPECT_THROW(FctnRank(3, 0), std::invalid_argument);
  EXPECT_THROW(r(1, 1), std::out_of_range);

  FctnRank c = FctnRank::capped({8, 8, 3, 16}, 4);
  EXPECT_EQ(c(0, 1), 4u);
  EXPECT_EQ(c(0, 2), 3u);
  EXPECT_EQ(c(2, 3), 3u);
  EXPECT_EQ(c(1, 3), 4u);
}

TEST(FactorShape, BondsAroundPhysicalMode) {
  FctnRank r(4, {2, 3, 4, 5, 6, 7});
  EXPECT_EQ(factor_shape({10, 11, 12, 13}, r, 0), (Shape{10, 2, 3, 4}));
  EXPECT_EQ(factor_shape({10, 11, 12, 13}, r, 2), (Shape{3, 5, 12, 7}));
  EXPECT_EQ(factor_shape({10, 11, 12, 13}, r, 3), (Shape{4, 6, 7, 13}));
}

TEST(Validate, ReportsEachInconsistency) {
  FctnRank r(3, {2, 3, 2});
  FctnFactors f = init_factors({4, 5, 6}, r, 1);
  EXPECT_TRUE(validate(f, r).empty());

  f.factors[1] = DenseTensor({3, 5, 2});  // R_{1,2} should be 2
  auto report = validate(f, r);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].factor, 1u);
  EXPECT_EQ(report[0].mode, 0u);
  EXPECT_EQ(report[0].expected, 2u);
  EXPECT_EQ(report[0].actual, 3u);

  FctnFactors z = init_factors({4, 5, 6}, r, 1);
  z.dims[2] = 0;
  auto zr = validate(z, r);
  ASSERT_FALSE(zr.empty());
  EXPECT_NE(zr[0].message.find("zero"), std::string::npos);
}

TEST(EvalElement, RankOneOrderTwoIsOuterProduct) {
  FctnFactors f = init_factors({3, 4}, FctnRank(2, 1), 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t idx[] = {i, j};
      EXPECT_DOUBLE_EQ(eval_element(f, idx), f.factors[0].at({i, 0}) * f.factors[1].at({0, j}));
    }
}

TEST(EvalElement, ZeroFactorGivesZeroAndRangeChecked) {
  FctnFactors f = init_factors({2, 2, 2}, FctnRank(3, 2), 3);
  std::fill(f.factors[1].data().begin(), f.factors[1].data().end(), 0.0);
  const std::size_t idx[] = {1, 0, 1};
  EXPECT_EQ(eval_element(f, idx), 0.0);
  const std::size_t bad[] = {2, 0, 0};
  EXPECT_THROW(eval_element(f, bad), std::out_of_range);
}

TEST(ContractAll, OrderTwoIsMatrixProduct) {
  FctnFactors f = normal_factors({3, 5}, FctnRank(2, 4), 4);
  const Matrix g1 = Eigen::Map<const Matrix>(f.factors[0].data().data(), 3, 4);
  const Matrix g2 = Eigen::Map<const Matrix>(f.factors[1].data().data(), 4, 5);
  const Matrix expected = g1 * g2;
  DenseTensor x = contract_all(f);
  ASSERT_EQ(x.shape(), (Shape{3, 5}));
  EXPECT_LT(max_abs_diff(Eigen::Map<const Matrix>(x.data().data(), 3, 5), expected), 1e-13);
}

TEST(ContractAll, AllRanksOneIsOuterProduct) {
  FctnFactors f = normal_factors({2, 3, 2, 3}, FctnRank(4, 1), 5);
  DenseTensor x = contract_all(f);
  for (std::size_t off = 0; off < x.size(); ++off) {
    const Index i = x.unravel(off);
    const double expected = f.factors[0][i[0]] * f.factors[1][i[1]] * f.factors[2][i[2]] * f.factors[3][i[3]];
    EXPECT_NEAR(x[off], expected, 1e-14);
  }
}

TEST(ContractAll, MatchesNestedSumOracle) {
  const FctnRank rank(3, {2, 1, 2});
  FctnFactors f = normal_factors({3, 4, 2}, rank, 6);
  DenseTensor x = contract_all(f);
  for (std::size_t off = 0; off < x.size(); ++off) {
    const Index i = x.unravel(off);
    EXPECT_NEAR(x[off], eval_element(f, i), 1e-10);
  }

  FctnFactors g = normal_factors({2, 2, 2}, FctnRank(3, 2), 7);
  DenseTensor y = contract_all(g);
  for (std::size_t off = 0; off < y.size(); ++off) EXPECT_NEAR(y[off], eval_element(g, y.unravel(off)), 1e-12);
}

TEST(ContractAll, RandomInstancesMatchOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 15; ++trial) {
    FctnFactors f = random_instance(rng, 3 + rng.below(2), 4, 3, 500 + trial);
    DenseTensor x = contract_all(f);
    for (std::size_t off = 0; off < x.size(); ++off) EXPECT_NEAR(x[off], eval_element(f, x.unravel(off)), 1e-10);
  }
}

TEST(ContractAll, GaugeInvariance) {
  const FctnRank rank(4, {2, 3, 2, 2, 3, 2});
  FctnFactors f = normal_factors({3, 2, 4, 2}, rank, 8);
  const DenseTensor before = contract_all(f);
  // Scale bond (1,3) slice r=1 by c on G_1 and by 1/c on G_3.
  const double c = 3.7;
  for (std::size_t off = 0; off < f.factors[1].size(); ++off)
    if (f.factors[1].unravel(off)[3] == 1) f.factors[1][off] *= c;
  for (std::size_t off = 0; off < f.factors[3].size(); ++off)
    if (f.factors[3].unravel(off)[1] == 1) f.factors[3][off] /= c;
  const DenseTensor after = contract_all(f);
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(after[k], before[k], 1e-12);
}

TEST(ContractAll, RejectsInconsistentFactors) {
  FctnFactors f = init_factors({3, 3, 3}, FctnRank(3, 2), 9);
  f.factors[2] = DenseTensor({2, 3, 3});
  EXPECT_THROW(contract_all(f), std::invalid_argument);
}

TEST(LeaveOneOut, OrderTwoReturnsOtherFactor) {
  FctnFactors f = normal_factors({3, 4}, FctnRank(2, 2), 10);
  LeaveOneOut m = leave_one_out(f, 1);
  EXPECT_EQ(m.tensor, f.factors[0]);
  EXPECT_EQ(m.labels, (std::vector<ModeLabel>{ModeLabel::physical(0), ModeLabel::bond(0, 1)}));

  const Matrix u = unfold_leave_one_out(m);
  const Matrix g1 = Eigen::Map<const Matrix>(f.factors[0].data().data(), 3, 2);
  EXPECT_EQ(u, g1.transpose());
}

TEST(LeaveOneOut, ModeOrderingAroundExcludedFactor) {
  const FctnRank rank(3, {2, 3, 4});
  FctnFactors f = normal_factors({5, 6, 7}, rank, 11);
  LeaveOneOut m = leave_one_out(f, 1);
  EXPECT_EQ(m.labels, (std::vector<ModeLabel>{ModeLabel::physical(0), ModeLabel::bond(0, 1), ModeLabel::bond(1, 2),
                                              ModeLabel::physical(2)}));
  EXPECT_EQ(m.tensor.shape(), (Shape{5, 2, 4, 7}));
  EXPECT_THROW(leave_one_out(f, 3), std::out_of_range);

  const Matrix u = unfold_leave_one_out(m);
  EXPECT_EQ(u.rows(), 2 * 4);
  EXPECT_EQ(u.cols(), 5 * 7);

  LeaveOneOut wrong = m;
  wrong.excluded = 0;
  EXPECT_THROW(unfold_leave_one_out(wrong), std::invalid_argument);
}

TEST(LeaveOneOut, RankOneUnfoldingIsOuterProductRow) {
  FctnFactors f = normal_factors({2, 3, 2}, FctnRank(3, 1), 12);
  const Matrix u = unfold_leave_one_out(leave_one_out(f, 1));
  ASSERT_EQ(u.rows(), 1);
  ASSERT_EQ(u.cols(), 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c)
      EXPECT_NEAR(u(0, static_cast<Eigen::Index>(a + 2 * c)), f.factors[0][a] * f.factors[2][c], 1e-15);
}

// mode_unfold(X, i) == mode_unfold(G_i, i) * unfold(M_i): the identity behind the factor update.
TEST(LeaveOneOut, UnfoldingIdentityOnRandomInstances) {
  Rng rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    FctnFactors f = random_instance(rng, 2 + rng.below(4), 4, 3, 900 + trial);
    const DenseTensor x = contract_all(f);
    for (std::size_t i = 0; i < f.order(); ++i) {
      const Matrix lhs = mode_unfold(x, i);
      const Matrix rhs = mode_unfold(f.factors[i], i) * unfold_leave_one_out(leave_one_out(f, i));
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10) << "trial " << trial << " factor " << i;
    }
  }
}
