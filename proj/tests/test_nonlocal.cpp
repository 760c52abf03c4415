#include <gtest/gtest.h>

#include <algorithm>

#include "nlfctn/io.hpp"
#include "nlfctn/nonlocal.hpp"
#include "test_helpers.hpp"

using namespace nlfctn;
using nlfctn::testing::random_tensor;

TEST(PatchGrid, DivisibleGeometryMatchesClosedForm) {
  const PatchGrid g = build_patch_grid({10, 10, 3}, 4, 1);
  EXPECT_EQ(g.rows, (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_EQ(g.count(), 9u);
  EXPECT_EQ(g.origins[1], (PatchOrigin{3, 0}));  // first axis fastest
}

TEST(PatchGrid, FlushOriginWhenStrideDoesNotDivide) {
  const PatchGrid g = build_patch_grid({256, 256, 1}, 8, 1);
  EXPECT_EQ(g.rows.size(), 37u);
  EXPECT_EQ(g.rows[35], 245u);
  EXPECT_EQ(g.rows.back(), 248u);
  EXPECT_EQ(g.count(), 37u * 37u);
}

TEST(PatchGrid, SinglePatchAndErrors) {
  EXPECT_EQ(build_patch_grid({6, 6, 2}, 6, 1).count(), 1u);
  EXPECT_THROW(build_patch_grid({6, 6, 2}, 7, 1), std::invalid_argument);
  EXPECT_THROW(build_patch_grid({6, 6, 2}, 4, 4), std::invalid_argument);
  EXPECT_THROW(build_patch_grid({6}, 4, 1), std::invalid_argument);
}

TEST(PatchGrid, EveryPixelCovered) {
  for (std::size_t n : {9u, 13u, 20u, 31u})
    for (std::size_t p : {3u, 4u, 5u})
      for (std::size_t o = 0; o < p; ++o) {
        const PatchGrid g = build_patch_grid({n, n + 2, 1}, p, o);
        std::vector<int> cover(n * (n + 2), 0);
        for (const auto& org : g.origins)
          for (std::size_t c = 0; c < p; ++c)
            for (std::size_t r = 0; r < p; ++r) cover[(org.col + c) * n + org.row + r]++;
        EXPECT_TRUE(std::all_of(cover.begin(), cover.end(), [](int c) { return c > 0; }))
            << "n=" << n << " p=" << p << " o=" << o;
      }
}

TEST(KeyLattice, ClosedFormCornersAndErrors) {
  const KeyLattice k = build_key_lattice({10, 10, 2}, 4, 3);
  EXPECT_EQ(k.count(), 9u);
  const KeyLattice corners = build_key_lattice({10, 10, 2}, 4, 6);
  EXPECT_EQ(corners.rows, (std::vector<std::size_t>{0, 6}));
  EXPECT_EQ(corners.count(), 4u);
  EXPECT_THROW(build_key_lattice({10, 10, 2}, 4, 7), std::invalid_argument);
  EXPECT_THROW(build_key_lattice({10, 10, 2}, 4, 0), std::invalid_argument);
}

TEST(BlockMatch, ConstantImageTieBreaksByIndex) {
  const DenseTensor img({10, 10, 2}, 0.5);
  const PatchGrid g = build_patch_grid(img.shape(), 4, 1);
  const auto m = block_match(img, g, g.origins[4], 3);
  EXPECT_EQ(m, (std::vector<PatchOrigin>{g.origins[4], g.origins[0], g.origins[1]}));
  EXPECT_EQ(block_match(img, g, g.origins[4], 1), (std::vector<PatchOrigin>{g.origins[4]}));
  EXPECT_THROW(block_match(img, g, g.origins[0], 10), std::invalid_argument);
}

TEST(BlockMatch, DuplicateTextureRanksFirst) {
  DenseTensor img = random_tensor({13, 13, 3}, 1);
  const PatchGrid g = build_patch_grid(img.shape(), 4, 1);  // origins 0,3,6,9
  const PatchOrigin key{0, 0}, copy{6, 9};
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t r = 0; r < 4; ++r) img.at({copy.row + r, copy.col + c, b}) = img.at({key.row + r, key.col + c, b});

  const auto m = block_match(img, g, key, 5);
  EXPECT_EQ(m[0], key);
  EXPECT_EQ(m[1], copy);

  // Brute-force ordering of every other patch.
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t t = 0; t < g.count(); ++t) {
    if (g.origins[t] == key) continue;
    double d = 0.0;
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r) {
          const double diff = img.at({key.row + r, key.col + c, b}) - img.at({g.origins[t].row + r, g.origins[t].col + c, b});
          d += diff * diff;
        }
    all.emplace_back(d, t);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t k = 1; k < m.size(); ++k) EXPECT_EQ(m[k], g.origins[all[k - 1].second]);
}

TEST(FormGroup, ShapesForThirdAndFourthOrder) {
  const DenseTensor msi = random_tensor({16, 16, 5}, 2);
  const PatchGrid g = build_patch_grid(msi.shape(), 4, 1);
  const auto members = block_match(msi, g, g.origins[0], 6);
  const NssGroup grp = form_group(msi, ObservationMask(msi.shape(), true), members, 4);
  EXPECT_EQ(grp.tensor.shape(), (Shape{4, 4, 5, 6}));
  EXPECT_EQ(grp.mask.count_observed(), grp.tensor.size());
  for (std::size_t m = 0; m < members.size(); ++m)
    for (std::size_t b = 0; b < 5; ++b)
      EXPECT_EQ(grp.tensor.at({1, 2, b, m}), msi.at({members[m].row + 1, members[m].col + 2, b}));

  const DenseTensor ts = random_tensor({12, 12, 3, 2}, 3);
  const std::vector<PatchOrigin> inside{{0, 0}, {8, 8}, {3, 5}, {8, 0}, {0, 8}, {4, 4}};
  const NssGroup g5 = form_group(ts, make_mask(ts.shape(), 0.5, 1), inside, 4);
  EXPECT_EQ(g5.tensor.shape(), (Shape{4, 4, 3, 2, 6}));
  EXPECT_THROW(form_group(ts, ObservationMask(ts.shape(), true), std::vector<PatchOrigin>{{9, 0}}, 4),
               std::out_of_range);
}

TEST(FormGroup, InheritsMask) {
  const DenseTensor img = random_tensor({8, 8, 2}, 4);
  const ObservationMask mask = make_mask(img.shape(), 0.6, 5);
  const std::vector<PatchOrigin> members{{0, 0}, {4, 4}};
  const NssGroup grp = form_group(img, mask, members, 4);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r) {
          const std::size_t src[] = {members[m].row + r, members[m].col + c, b};
          const std::size_t dst[] = {r, c, b, m};
          EXPECT_EQ(grp.mask[grp.tensor.offset(dst)], mask[img.offset(src)]);
        }
}

TEST(Aggregate, RoundTripAveragingAndFallback) {
  const DenseTensor img = random_tensor({12, 12, 3}, 6);
  const DenseTensor fallback({12, 12, 3}, -1.0);
  const ObservationMask all(img.shape(), true);
  const std::vector<PatchOrigin> members{{0, 0}, {4, 0}, {2, 6}};
  std::vector<NssGroup> groups{form_group(img, all, members, 4)};
  const DenseTensor out = aggregate(groups, img.shape(), fallback);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Index i = img.unravel(k);
    const bool covered = std::any_of(members.begin(), members.end(), [&](const PatchOrigin& o) {
      return i[0] >= o.row && i[0] < o.row + 4 && i[1] >= o.col && i[1] < o.col + 4;
    });
    EXPECT_NEAR(out[k], covered ? img[k] : -1.0, 1e-12);
  }

  EXPECT_EQ(aggregate(std::vector<NssGroup>{}, img.shape(), fallback), fallback);

  // Two groups covering the same pixel with values a and b average to (a+b)/2.
  NssGroup a = form_group(DenseTensor({12, 12, 3}, 0.2), all, std::vector<PatchOrigin>{{0, 0}}, 4);
  NssGroup b = form_group(DenseTensor({12, 12, 3}, 0.6), all, std::vector<PatchOrigin>{{2, 2}}, 4);
  const DenseTensor avg = aggregate(std::vector<NssGroup>{a, b}, img.shape(), fallback);
  EXPECT_DOUBLE_EQ(avg.at({3, 3, 1}), 0.4);
  EXPECT_DOUBLE_EQ(avg.at({0, 0, 0}), 0.2);
  EXPECT_DOUBLE_EQ(avg.at({5, 5, 2}), 0.6);
  EXPECT_DOUBLE_EQ(avg.at({9, 9, 2}), -1.0);
}

TEST(Aggregate, IndependentOfGroupOrder) {
  const DenseTensor img = random_tensor({20, 20, 2}, 7);
  const PatchGrid grid = build_patch_grid(img.shape(), 5, 1);
  const KeyLattice keys = build_key_lattice(img.shape(), 5, 4);
  std::vector<NssGroup> groups;
  Rng rng(8);
  for (const auto& key : keys.keys) {
    NssGroup g = form_group(img, ObservationMask(img.shape(), true), block_match(img, grid, key, 4), 5);
    for (double& v : g.tensor.data()) v += rng.uniform();  // members now disagree
    groups.push_back(std::move(g));
  }
  const DenseTensor ref = aggregate(groups, img.shape(), img);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    for (std::size_t k = groups.size() - 1; k > 0; --k) std::swap(groups[k], groups[rng.below(k + 1)]);
    EXPECT_EQ(aggregate(groups, img.shape(), img), ref);
  }
}

TEST(Aggregate, ShapeErrors) {
  const DenseTensor img = random_tensor({8, 8, 2}, 9);
  std::vector<NssGroup> groups{form_group(img, ObservationMask(img.shape(), true), std::vector<PatchOrigin>{{0, 0}}, 4)};
  EXPECT_THROW(aggregate(groups, {8, 8, 3}, DenseTensor({8, 8, 3})), std::invalid_argument);
  EXPECT_THROW(aggregate(groups, {8, 8, 2}, DenseTensor({8, 8, 3})), std::invalid_argument);
}
