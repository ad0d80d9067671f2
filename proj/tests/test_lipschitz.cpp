#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "dpre/lipschitz.hpp"

using namespace dpre;

namespace {

SiteField field_with_closed(int cols, int heights, std::vector<std::pair<int, int>> closed) {
  std::vector<std::vector<bool>> open(static_cast<std::size_t>(cols), std::vector<bool>(static_cast<std::size_t>(heights), true));
  for (auto [x, h] : closed) open[static_cast<std::size_t>(x)][static_cast<std::size_t>(h)] = false;
  return SiteField::from_flags(open, heights, "test");
}

// Pointwise minimum over every open Lipschitz function, by enumeration.
std::optional<std::vector<int>> brute_lowest(const SiteField& f) {
  std::optional<std::vector<int>> low;
  std::vector<int> cur(static_cast<std::size_t>(f.columns()));
  std::function<void(int)> rec = [&](int x) {
    if (x == f.columns()) {
      if (!low) low = cur;
      for (std::size_t k = 0; k < cur.size(); ++k) (*low)[k] = std::min((*low)[k], cur[k]);
      return;
    }
    for (int h = 0; h < f.heights(); ++h) {
      if (!f.open(x, h)) continue;
      if (x > 0 && std::abs(h - cur[static_cast<std::size_t>(x) - 1]) > 1) continue;
      cur[static_cast<std::size_t>(x)] = h;
      rec(x + 1);
    }
  };
  rec(0);
  return low;
}

}  // namespace

TEST(Lipschitz, AllOpenIsZero) {
  const auto f = lowest_lipschitz(SiteField::independent(1.0, 50, 8, 1));
  ASSERT_TRUE(f);
  for (int h : f->heights) EXPECT_EQ(h, 0);
  EXPECT_DOUBLE_EQ(axis_density(*f), 1.0);
}

TEST(Lipschitz, ForcedShapes) {
  auto f = lowest_lipschitz(field_with_closed(11, 4, {{5, 0}}));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->heights, (std::vector<int>{0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0}));
  f = lowest_lipschitz(field_with_closed(11, 4, {{5, 0}, {5, 1}}));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->heights, (std::vector<int>{0, 0, 0, 0, 1, 2, 1, 0, 0, 0, 0}));
  EXPECT_EQ(*brute_lowest(field_with_closed(11, 4, {{5, 0}, {5, 1}})), f->heights);
}

TEST(Lipschitz, FailsWhenAColumnIsBlocked) {
  EXPECT_FALSE(lowest_lipschitz(field_with_closed(6, 3, {{2, 0}, {2, 1}, {2, 2}})));
  // Reaching the cap through the slope constraint also fails.
  EXPECT_FALSE(lowest_lipschitz(field_with_closed(6, 3, {{2, 0}, {2, 1}, {3, 2}, {1, 2}, {3, 0}, {3, 1}})));
}

TEST(Lipschitz, MatchesBruteForceOnSmallDomains) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int cols = 1 + trial % 10;
    const int heights = 1 + trial % 4;
    const double p = 0.5 + 0.1 * (trial % 5);
    const auto field = SiteField::independent(p, cols, heights, rng());
    const auto got = lowest_lipschitz(field);
    const auto want = brute_lowest(field);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (!got) continue;
    ++checked;
    EXPECT_EQ(got->heights, *want);
    EXPECT_TRUE(is_open_lipschitz(field, *got));
    EXPECT_TRUE(is_pointwise_minimal(field, *got));
    EXPECT_LE(got->sweeps, cols * heights + 1);
  }
  EXPECT_GT(checked, 100);
}

TEST(Lipschitz, OpeningASiteNeverRaises) {
  const auto field = SiteField::independent(0.8, 60, 16, 77);
  const auto base = lowest_lipschitz(field);
  ASSERT_TRUE(base);
  std::mt19937_64 rng(3);
  int flips = 0;
  while (flips < 100) {
    const int x = static_cast<int>(rng() % 60);
    const int h = static_cast<int>(rng() % 16);
    if (field.open(x, h)) continue;
    ++flips;
    const auto f = lowest_lipschitz(field.with_open(x, h));
    ASSERT_TRUE(f);
    for (int k = 0; k < 60; ++k) EXPECT_LE(f->at(k), base->at(k));
  }
}

TEST(Lipschitz, IndependentFieldIsReproducible) {
  const auto a = SiteField::independent(0.7, 30, 10, 9);
  const auto b = SiteField::independent(0.7, 30, 10, 9);
  for (int x = 0; x < 30; ++x)
    for (int h = 0; h < 10; ++h) EXPECT_EQ(a.open(x, h), b.open(x, h));
  EXPECT_NEAR(SiteField::independent(0.7, 400, 50, 1).open_density(), 0.7, 0.01);
}

TEST(Lipschitz, TailStatistics) {
  const auto one = tail_statistics(1.0, 100, 5, 1);
  EXPECT_EQ(one.failures, 0u);
  EXPECT_DOUBLE_EQ(one.height.tail[0], 0.0);
  EXPECT_DOUBLE_EQ(one.component.tail[1], 0.0);
  EXPECT_DOUBLE_EQ(one.axis_density, 1.0);

  const auto r = tail_statistics(0.98, 2000, 200, 2024, kDefaultHeightCap, 2);
  EXPECT_EQ(r.failures, 0u);
  ASSERT_TRUE(r.height.fit);
  EXPECT_TRUE(r.height.decreasing);
  EXPECT_LT(r.height.fit->slope, 0.0);
  EXPECT_GT(r.alpha_hat, 0.0);
  ASSERT_TRUE(r.component.fit);
  EXPECT_GT(r.gamma_hat, 0.0);
  EXPECT_GE(r.lambda_hat, r.gamma_hat);
  EXPECT_GE(r.axis_density, 0.9);
  // Thread count does not change the result.
  const auto r1 = tail_statistics(0.98, 2000, 200, 2024, kDefaultHeightCap, 1);
  EXPECT_EQ(r1.height.counts, r.height.counts);
  EXPECT_EQ(r1.axis_density, r.axis_density);
}

TEST(Lipschitz, AxisDensityHighP) {
  const auto d = axis_density(0.99, 5000, 4);
  ASSERT_TRUE(d);
  EXPECT_GE(*d, 0.9);
}

TEST(Lipschitz, LssThreshold) {
  EXPECT_DOUBLE_EQ(lss_threshold(1), 0.75);
  EXPECT_NEAR(lss_threshold(4), 1.0 - 256.0 / 3125.0, 1e-15);
  EXPECT_GT(0.95, lss_threshold(4));
  EXPECT_THROW(lss_threshold(0), std::invalid_argument);
}

TEST(Lipschitz, ImportedCoarseField) {
  GeometryOptions opts;
  opts.k0 = 1;
  opts.horizon_i = 6;
  const auto lat = classify_lattice(Environment(DisorderSpec::parse("gaussian"), 4),
                                    build_geometry(0.1, 5.0, 0.3, DisorderSpec::parse("gaussian"), opts));
  const auto field = SiteField::from_lattice(lat);
  EXPECT_EQ(field.columns(), 7);
  EXPECT_EQ(field.heights(), 7);
  EXPECT_EQ(field.provenance(), "coarse-grain");
  EXPECT_FALSE(field.open(2, 3));  // outside the half-lattice
  const auto f = lowest_lipschitz(field);
  const auto g = good_path(lat);
  ASSERT_TRUE(g);
  ASSERT_TRUE(f);
  // With ℒ(0) = 0 the lowest function is the good path.
  if (f->at(0) == 0) EXPECT_EQ(f->heights, *g);
}
