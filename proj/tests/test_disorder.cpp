#include <gtest/gtest.h>

#include <cmath>

#include "dpre/disorder.hpp"

namespace dpre {
namespace {

const DisorderSpec kFamilies[] = {{DisorderFamily::gaussian}, {DisorderFamily::rademacher}, {DisorderFamily::uniform}};

TEST(Cumulant, ClosedForms) {
  EXPECT_DOUBLE_EQ(cumulant({DisorderFamily::gaussian}, 0.5), 0.125);
  EXPECT_NEAR(cumulant({DisorderFamily::rademacher}, 1.0), std::log(std::cosh(1.0)), 1e-15);
  const double t = std::sqrt(3.0) * 0.7;
  EXPECT_NEAR(cumulant({DisorderFamily::uniform}, 0.7), std::log(std::sinh(t) / t), 1e-14);
  for (const auto& spec : kFamilies) {
    EXPECT_EQ(cumulant(spec, 0.0), 0.0);
    EXPECT_EQ(overlap_coupling(spec, 0.0), 0.0);
    EXPECT_TRUE(std::isfinite(cumulant(spec, 400.0)));
  }
}

TEST(Cumulant, UniformSmallArgumentIsContinuous) {
  const DisorderSpec u{DisorderFamily::uniform};
  for (double t : {0.5e-4, 0.99e-4, 1.01e-4, 1e-3, 1e-2}) {
    const double series = t * t / 6.0 - t * t * t * t / 180.0 + t * t * t * t * t * t / 2835.0;
    EXPECT_NEAR(cumulant(u, t / std::sqrt(3.0)) / series, 1.0, 1e-9) << t;
  }
}

TEST(OverlapCoupling, GaussianIsBetaSquaredAndNonnegative) {
  EXPECT_NEAR(overlap_coupling({DisorderFamily::gaussian}, 0.3), 0.09, 1e-15);
  EXPECT_NEAR(overlap_coupling({DisorderFamily::rademacher}, 0.1) / 0.01, 1.0, 0.05);
  for (const auto& spec : kFamilies) {
    for (double b : {0.05, 0.3, 1.0, 2.5}) EXPECT_GE(overlap_coupling(spec, b), 0.0);
  }
}

TEST(DisorderSpec, ParseRoundTrip) {
  for (const auto& spec : kFamilies) EXPECT_EQ(DisorderSpec::parse(spec.name()), spec);
  EXPECT_THROW(DisorderSpec::parse("cauchy"), std::invalid_argument);
}

TEST(Environment, DeterministicAndShiftExact) {
  const Environment env({DisorderFamily::gaussian}, 42);
  EXPECT_EQ(env.value(3, -7), env.value(3, -7));
  const Environment shifted = env.shifted(100, -5);
  for (std::int64_t k = 1; k < 50; ++k) {
    for (Height x = -20; x <= 20; ++x) EXPECT_EQ(shifted.value(k, x), env.value(k + 100, x - 5));
  }
  EXPECT_NE(env.value(1, 0), Environment({DisorderFamily::gaussian}, 43).value(1, 0));
}

TEST(Environment, FillMatchesPointQueriesInAnyOrder) {
  const Environment env({DisorderFamily::uniform}, 9);
  std::vector<double> out(25);
  env.fill(17, -24, 2, out);
  for (std::size_t k = out.size(); k-- > 0;) EXPECT_EQ(out[k], env.value(17, -24 + 2 * static_cast<Height>(k)));
}

TEST(Environment, ResampledRegionIsLocal) {
  const Environment env({DisorderFamily::gaussian}, 5);
  const SiteRegion region{{10, 20}, {-3, 3}};
  const Environment patched = env.with_resampled(region, 99);
  EXPECT_NE(patched.value(15, 0), env.value(15, 0));
  EXPECT_EQ(patched.value(9, 0), env.value(9, 0));
  EXPECT_EQ(patched.value(15, 4), env.value(15, 4));
}

TEST(Environment, MeanAndVarianceOverManySites) {
  for (const auto& spec : kFamilies) {
    const Environment env(spec, 2024);
    double s = 0.0;
    double s2 = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
      const double v = env.value(1 + k / 1000, k % 1000 - 500);
      s += v;
      s2 += v * v;
    }
    const double mean = s / n;
    EXPECT_LT(std::abs(mean), 0.01) << spec.name();
    EXPECT_LT(std::abs(s2 / n - mean * mean - 1.0), 0.01) << spec.name();
  }
}

TEST(Cumulant, AgreesWithMonteCarlo) {
  for (const auto& spec : kFamilies) {
    for (double beta : {0.25, 0.5, 1.0}) {
      const Environment env(spec, 77);
      const int n = spec.family == DisorderFamily::rademacher && beta == 1.0 ? 10000000 : 1000000;
      double s = 0.0;
      double s2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double w = std::exp(beta * env.value(1 + k / 4096, k % 4096));
        s += w;
        s2 += w * w;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / n);
      // Delta method: SE of log(mean) is se/mean.
      EXPECT_LE(std::abs(std::log(mean) - cumulant(spec, beta)), 3.0 * se / mean + 1e-12)
          << spec.name() << " beta=" << beta;
    }
  }
}

TEST(ChildSeed, DistinctAcrossReplicas) {
  EXPECT_NE(child_seed(1, 0), child_seed(1, 1));
  EXPECT_NE(child_seed(1, 0), child_seed(2, 0));
  EXPECT_EQ(child_seed(5, 3), child_seed(5, 3));
}

}  // namespace
}  // namespace dpre
