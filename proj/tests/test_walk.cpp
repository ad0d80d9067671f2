#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dpre/walk.hpp"

namespace dpre {
namespace {

WalkPath random_path(std::mt19937_64& rng, Height start, std::int64_t n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> steps(static_cast<std::size_t>(n));
  for (auto& s : steps) s = coin(rng) ? 1 : -1;
  return WalkPath(start, steps);
}

TEST(LocalTime, CountsReturnsAfterTimeZero) {
  EXPECT_EQ(local_time(WalkPath(0, {1, -1, 1, -1})), 2);
  EXPECT_EQ(local_time(WalkPath(0, {1, 1, 1})), 0);
  EXPECT_EQ(local_time(WalkPath(2, {-1, -1, 1, -1})), 2);
}

TEST(LocalTime, BoundedByHalfLengthFromZero) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_path(rng, 0, 1 + t % 40);
    EXPECT_LE(local_time(p), p.length() / 2);
  }
}

TEST(WalkPath, RejectsNonUnitSteps) { EXPECT_THROW(WalkPath(0, {1, 2}), std::invalid_argument); }

TEST(WalkPath, PositionsAndParity) {
  std::mt19937_64 rng(3);
  const auto p = random_path(rng, 5, 30);
  const auto pos = p.positions();
  for (std::int64_t j = 0; j <= p.length(); ++j) {
    EXPECT_EQ(pos[static_cast<std::size_t>(j)], p.position(j));
    EXPECT_EQ(((p.position(j) - 5 - j) % 2 + 2) % 2, 0);
    if (j > 0) EXPECT_EQ(std::abs(pos[j] - pos[j - 1]), 1);
  }
}

TEST(Overlap, IdenticalAndSeparatedPaths) {
  const WalkPath a(0, std::vector<int>(12, 1));
  const WalkPath b(0, std::vector<int>(12, -1));
  EXPECT_EQ(overlap(a, a), 12);
  EXPECT_EQ(overlap(a, b), 0);
  EXPECT_THROW(overlap(a, WalkPath(0, {1})), std::invalid_argument);
}

TEST(Overlap, EqualsLocalTimeOfDifference) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_path(rng, 0, 20);
    const auto b = random_path(rng, 0, 20);
    EXPECT_EQ(overlap(a, b), overlap(b, a));
    std::int64_t diff_zero = 0;
    Height d = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      d += a.steps()[i] - b.steps()[i];
      if (d == 0) ++diff_zero;
    }
    EXPECT_EQ(overlap(a, b), diff_zero);
  }
}

TEST(BlockScales, RoundsOnce) {
  const auto s = block_scales(12);
  EXPECT_EQ(s.root, 3);
  EXPECT_EQ(s.window, 1);
  EXPECT_EQ(s.box, 6);
  EXPECT_EQ(block_scales(64).root, 8);
  EXPECT_EQ(block_scales(64).window, 2);
}

TEST(PathConstraint, NamedLinksFromLength) {
  const auto up = PathConstraint::up(64);
  EXPECT_EQ(up.start_window, Interval::centered(0, 2));
  EXPECT_EQ(up.box, Interval::centered(0, 16));
  EXPECT_EQ(up.end_window, Interval::centered(8, 2));
  EXPECT_EQ(PathConstraint::down(64).end_window, Interval::centered(-8, 2));
  EXPECT_EQ(PathConstraint::forward(64).end_window, Interval::centered(0, 2));
}

TEST(PathConstraint, AdmitsMatchesLiteralRecheck) {
  std::mt19937_64 rng(5);
  PathConstraint c = PathConstraint::forward(36);
  c.end_point = 2;
  for (int t = 0; t < 1000; ++t) {
    const Height start = static_cast<Height>(t % 5) - 2;
    const auto p = random_path(rng, start, 36);
    const auto pos = p.positions();
    bool ok = c.start_window.contains(pos[0]);
    for (std::size_t j = 1; j < pos.size(); ++j) ok = ok && std::abs(pos[j]) <= 12;
    ok = ok && std::abs(pos.back()) <= 2 && pos.back() == 2;
    EXPECT_EQ(c.admits(p), ok);
  }
}

TEST(PathConstraint, TranslatedKeepsUnboundedEnds) {
  const auto c = PathConstraint::unconstrained(5).translated(3);
  EXPECT_EQ(c.box, Interval::unbounded());
  EXPECT_EQ(PathConstraint::up(16).translated(4).end_window, Interval::centered(8, 1));
}

TEST(HittingTime, SmallValues) {
  const auto ssrw = hitting_time_pmf(WalkKind::simple, 10);
  EXPECT_DOUBLE_EQ(ssrw[0], 0.0);
  EXPECT_DOUBLE_EQ(ssrw[1], 0.5);
  EXPECT_DOUBLE_EQ(ssrw[3], 0.125);
  const auto diff = hitting_time_pmf(WalkKind::difference, 10);
  EXPECT_DOUBLE_EQ(diff[0], 0.5);
  EXPECT_DOUBLE_EQ(diff[1], 0.125);
}

TEST(HittingTime, ParityPositivityAndMass) {
  const auto ssrw = hitting_time_pmf(WalkKind::simple, 400);
  const auto diff = hitting_time_pmf(WalkKind::difference, 400);
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < 400; ++i) {
    if ((i + 1) % 2 == 1) EXPECT_EQ(ssrw[i], 0.0);
    EXPECT_GT(diff[i], 0.0);
    s1 += ssrw[i];
    s2 += diff[i];
  }
  EXPECT_LE(s1, 1.0);
  EXPECT_LE(s2, 1.0);
}

TEST(HittingTime, DifferenceWalkTailConstant) {
  const auto diff = hitting_time_pmf(WalkKind::difference, 2000);
  const double scaled = std::pow(2000.0, 1.5) * diff.back();
  EXPECT_NEAR(scaled / std::sqrt(1.0 / (4.0 * M_PI)), 1.0, 0.05);
}

TEST(HittingTime, RejectsEmptyRange) { EXPECT_THROW(hitting_time_pmf(WalkKind::simple, 0), std::invalid_argument); }

}  // namespace
}  // namespace dpre
