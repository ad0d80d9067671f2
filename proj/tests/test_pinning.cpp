#include <gtest/gtest.h>

#include <cmath>

#include "dpre/partition.hpp"
#include "dpre/pinning.hpp"

namespace dpre {
namespace {

TEST(FreeEnergyOracle, ReferenceValues) {
  EXPECT_NEAR(free_energy_oracle(0.5), 0.084110, 1e-5);
  EXPECT_NEAR(correlation_length(0.5), 11.89, 0.01);
  EXPECT_THROW(free_energy_oracle(0.0), std::invalid_argument);
  EXPECT_THROW(correlation_length(-1.0), std::invalid_argument);
}

TEST(FreeEnergyOracle, SatisfiesRenewalIdentity) {
  // E_0 e^{−Fτ} = 1 − √(1 − e^{−2F}) must equal e^{−γ}; summed directly from
  // the return-time law.
  const auto pmf = hitting_time_pmf(WalkKind::simple, 20000);
  for (double g : {0.5, 1.0, 2.0}) {
    const double f = free_energy_oracle(g);
    double lt = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) lt += pmf[n] * std::exp(-f * static_cast<double>(n + 1));
    EXPECT_NEAR(lt, std::exp(-g), 1e-9) << g;
  }
}

TEST(FreeEnergyBracket, ContainsOracleAndIsNarrow) {
  const auto b = free_energy_bracket(0.5, 4096);
  EXPECT_LE(b.width(), 2e-3);
  EXPECT_TRUE(b.contains(0.084110));
  EXPECT_TRUE(b.contains(free_energy_oracle(0.5)));
  EXPECT_TRUE(free_energy_bracket(1.0, 4096).contains(free_energy_oracle(1.0)));
}

TEST(FreeEnergyBracket, NonPositiveCoupling) {
  const auto zero = free_energy_bracket(0.0, 256);
  EXPECT_EQ(zero.upper, 0.0);
  EXPECT_TRUE(zero.contains(0.0));
  const auto neg = free_energy_bracket(-0.7, 256);
  EXPECT_LE(neg.lower, 0.0);
  EXPECT_EQ(neg.upper, 0.0);
  EXPECT_EQ(certified_free_energy(-0.3), 0.0);
  EXPECT_THROW(free_energy_bracket(0.5, 7), std::invalid_argument);
}

TEST(FreeEnergyBracket, NestedUnderDoubling) {
  for (double g : {0.2, 0.5, 1.5}) {
    auto prev = free_energy_bracket(g, 128);
    for (std::int64_t n = 256; n <= 2048; n *= 2) {
      const auto b = free_energy_bracket(g, n);
      EXPECT_GE(b.lower, prev.lower - 1e-9) << g << " " << n;
      EXPECT_LE(b.upper, prev.upper + 1e-9) << g << " " << n;
      prev = b;
    }
  }
}

TEST(FreeEnergy, StrictlyIncreasingAndBelowGamma) {
  double prev = 0.0;
  for (double g : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0}) {
    const double f = certified_free_energy(g);
    EXPECT_GT(f, prev);
    EXPECT_LE(f, g);
    EXPECT_GE(correlation_length(g), 1.0 / g);
    prev = f;
  }
}

TEST(FreeEnergy, QuadraticConstantStabilises) {
  // F/γ² rises monotonically toward 1/2; the smallest γ is within 4%.
  const double r1 = free_energy_oracle(0.1) / 0.01;
  const double r2 = free_energy_oracle(0.05) / 0.0025;
  const double r3 = free_energy_oracle(0.02) / 0.0004;
  EXPECT_LT(r1, r2);
  EXPECT_LT(r2, r3);
  EXPECT_LT(r3, 0.5);
  EXPECT_LE(std::abs(r3 / 0.5 - 1.0), 0.04);
  EXPECT_LT(std::abs(r2 - 0.5), std::abs(r1 - 0.5));
}

TEST(CorrelationLength, DoublingBound) {
  for (double g : {0.05, 0.1}) EXPECT_LE(correlation_length(g), 5.0 * correlation_length(2.0 * g));
}

TEST(NormalTail, KnownValues) {
  EXPECT_NEAR(normal_tail(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_tail(1.959963984540054), 0.025, 1e-12);
  EXPECT_NEAR(xi_tail(1.0), normal_tail(0.25), 1e-15);
}

TEST(Hayati, CouplingInequalityOnWindow) {
  for (std::int64_t n : {64, 256}) {
    for (double g : {0.2, 0.5}) {
      const auto r = hayati_check(g, n);
      EXPECT_TRUE(r.pass) << n << " " << g;
      EXPECT_EQ(r.rows.size(), static_cast<std::size_t>(2 * block_scales(n).window + 1));
      EXPECT_GE(r.epsilon0_hat, r.min_walk_probability);
    }
  }
}

TEST(Hayati, BoundedAwayFromZeroAcrossSizes) {
  for (std::int64_t n : {64, 256, 1024}) EXPECT_GT(hayati_check(0.5, n).epsilon0_hat, 0.05) << n;
}

TEST(Kusto, PassesOnWindow) {
  EXPECT_TRUE(kusto_check(0.5, 0.3, 512).pass);
  EXPECT_TRUE(kusto_check(0.5, 1.0, 512).pass);
  for (std::int64_t n : {64, 256}) {
    for (double g : {0.2, 0.5}) EXPECT_TRUE(kusto_check(g, 0.3, n).pass) << n << " " << g;
  }
}

TEST(PinningConstants, AllInUnitInterval) {
  const auto c = pinning_constants(0.5, 0.3, 12);
  for (double v : {c.epsilon0_hat, c.links.forward, c.links.up, c.links.down, c.xi_tail, c.theta_on, c.theta_off}) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NEAR(c.xi_tail, normal_tail(1.0 / (4.0 * std::sqrt(0.3))), 1e-15);
  EXPECT_LE(c.theta_off, c.theta_on);
}

TEST(LinkProbabilities, UpAndDownAreMirrorImages) {
  const auto p = link_probabilities(100);
  EXPECT_NEAR(p.up, p.down, 1e-14);
  EXPECT_GT(p.forward, p.up);
}

TEST(Upb, BoundedPerBlockConstant) {
  double worst = 0.0;
  for (double g : {0.3, 0.5, 0.8}) {
    const auto r = upb_check(g, 20);
    EXPECT_TRUE(std::isfinite(r.max_per_block));
    worst = std::max(worst, r.max_per_block);
    // j = 1: e^{−γ} e^{M F} ≤ E_0 e^{γ L_M}, so log E_0 e^{γL_M} ≥ M·lower − γ.
    const auto b = free_energy_bracket(g, 4096);
    const double m = static_cast<double>(r.lengths[0]);
    EXPECT_GE(r.per_block[0], m * b.lower - g - 1e-12);
  }
  EXPECT_LT(worst, 10.0);
  EXPECT_LE(upb_check(0.8, 20).max_per_block, 10.0 * std::max(upb_check(0.4, 20).max_per_block, 1e-3));
}

TEST(OverlapTail, MatchesDirectCountForSmallR) {
  // Brute-force distribution of the number of zeros of the lazy walk.
  const std::int64_t r = 12;
  std::vector<std::vector<double>> dist(1, std::vector<double>(1, 1.0));  // [pos+offset][count]
  // Dynamic programming over (position, count).
  const int off = 12;
  std::vector<std::vector<double>> p(2 * off + 1, std::vector<double>(r + 2, 0.0));
  p[off][0] = 1.0;
  for (int t = 0; t < r; ++t) {
    std::vector<std::vector<double>> q(2 * off + 1, std::vector<double>(r + 2, 0.0));
    for (int x = 0; x <= 2 * off; ++x) {
      for (int c = 0; c <= r; ++c) {
        const double v = p[x][c];
        if (v == 0.0) continue;
        for (int d : {-1, 0, 1}) {
          const int y = x + d;
          if (y < 0 || y > 2 * off) continue;
          const double w = d == 0 ? 0.5 : 0.25;
          q[y][c + (y == off ? 1 : 0)] += v * w;
        }
      }
    }
    p = q;
  }
  const auto tail = overlap_tail(r, 5);
  for (int k = 1; k <= 5; ++k) {
    double ge = 0.0;
    for (int x = 0; x <= 2 * off; ++x) {
      for (int c = k; c <= r; ++c) ge += p[x][c];
    }
    EXPECT_NEAR(tail[static_cast<std::size_t>(k - 1)], ge, 1e-14) << k;
  }
}

TEST(Crl, ZeroDisorder) {
  const auto c = crl_check({DisorderFamily::gaussian}, 0.0, 0.5, 100);
  EXPECT_EQ(c.value, 0.0);
  EXPECT_TRUE(c.pass);
}

TEST(Crl, MonotoneAndScan) {
  const DisorderSpec g{DisorderFamily::gaussian};
  const double v2 = crl_check(g, 0.2, 0.5, 100, 5).value;
  const double v3 = crl_check(g, 0.2, 0.5, 1000, 5).value;
  const double v4 = crl_check(g, 0.2, 0.5, 10000, 5).value;
  EXPECT_LE(v2, v3);
  EXPECT_LE(v3, v4);
  const auto scan = crl_k5_scan(g, 0.2, 0.5, 10000);
  EXPECT_TRUE(scan.monotone);
  EXPECT_GT(scan.largest_passing_r, 0);
  EXPECT_NEAR(scan.values[1000], v3, 1e-12 * (1.0 + v3));
  EXPECT_NEAR(scan.k5_hat, static_cast<double>(scan.largest_passing_r) / 625.0, 1e-12);
}

TEST(Crl, GeometricSurrogateAtLargeR) {
  const auto c = crl_check({DisorderFamily::gaussian}, 0.2, 0.5, 10000, 50);
  EXPECT_TRUE(c.domination_holds);
  EXPECT_EQ(c.tail.size(), 50U);
  // Strong coupling at small R makes the geometric series diverge.
  EXPECT_TRUE(crl_check({DisorderFamily::gaussian}, 1.0, 0.5, 100, 5).geometric_diverges);
}

}  // namespace
}  // namespace dpre
