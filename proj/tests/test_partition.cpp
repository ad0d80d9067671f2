#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dpre/oracle.hpp"
#include "dpre/partition.hpp"
#include "dpre/validation.hpp"

namespace dpre {
namespace {

constexpr double kTol = 1e-9;

struct RandomCase {
  Environment env;
  PolymerParams params;
  PathConstraint constraint;
  StartMeasure start;
};

// Random single-walk instance of length n: a mix of unconstrained, boxed and
// windowed constraints with point or spread start measures.
RandomCase random_case(std::mt19937_64& rng, std::int64_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DisorderSpec specs[] = {{DisorderFamily::gaussian}, {DisorderFamily::rademacher}, {DisorderFamily::uniform}};
  RandomCase c;
  c.env = Environment(specs[rng() % 3], rng());
  c.params = {2.0 * unit(rng), 3.0 * unit(rng) - 1.0};
  c.constraint = PathConstraint::unconstrained(n);
  switch (rng() % 4) {
    case 1:
      c.constraint.box = Interval::centered(0, 3);
      break;
    case 2:
      c.constraint.start_window = Interval::centered(0, 2);
      c.constraint.box = Interval{-2, 5};
      c.constraint.end_window = Interval{-1, 3};
      break;
    case 3:
      c.constraint.end_point = static_cast<Height>(n % 2 == 0 ? 2 : 1);
      break;
    default:
      break;
  }
  if (rng() % 2 == 0) {
    c.start = StartMeasure::delta(0);
  } else {
    c.start = StartMeasure::from_weights(-1, {unit(rng), unit(rng), unit(rng)});
    if (c.constraint.start_window.bounded()) c.constraint.start_window = Interval::centered(0, 2);
  }
  return c;
}

TEST(QuenchedEngine, MatchesEnumeration) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 60; ++t) {
    const auto c = random_case(rng, 4 + t % 9);
    const double dp = quenched_log_partition(c.env, c.params, c.constraint, c.start);
    const double bf = oracle::quenched_log_partition(c.env, c.params, c.constraint, c.start);
    if (bf == kNegInf) {
      EXPECT_EQ(dp, kNegInf);
    } else {
      EXPECT_NEAR(dp, bf, kTol) << "case " << t;
    }
  }
}

TEST(QuenchedEngine, EndpointColumnMatchesEnumeration) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto c = random_case(rng, 10);
    const auto dp = quenched_endpoint_column(c.env, c.params, c.constraint, c.start);
    const auto bf = oracle::quenched_endpoint_column(c.env, c.params, c.constraint, c.start);
    for (Height x = -12; x <= 12; ++x) {
      const double a = dp.log_at(x);
      const double b = bf.log_at(x);
      if (b == kNegInf) {
        EXPECT_EQ(a, kNegInf) << "x=" << x;
      } else {
        EXPECT_NEAR(a, b, kTol) << "x=" << x;
      }
    }
    EXPECT_NEAR(dp.log_total(), quenched_log_partition(c.env, c.params, c.constraint, c.start), 1e-12);
  }
}

TEST(QuenchedEngine, ZeroCouplingIsNormalized) {
  const Environment env({DisorderFamily::gaussian}, 3);
  EXPECT_NEAR(quenched_log_partition(env, {0.0, 0.0}, PathConstraint::unconstrained(500), StartMeasure::delta(0)),
              0.0, 1e-12);
}

TEST(QuenchedEngine, ParityEmptySetIsNegInf) {
  const Environment env({DisorderFamily::gaussian}, 3);
  PathConstraint c = PathConstraint::unconstrained(7);
  c.end_point = 0;
  EXPECT_EQ(quenched_log_partition(env, {0.5, 0.2}, c, StartMeasure::delta(0)), kNegInf);
  EXPECT_TRUE(quenched_endpoint_column(env, {0.5, 0.2}, c, StartMeasure::delta(0)).empty());
}

TEST(QuenchedEngine, StartOutsideWindowThrows) {
  const Environment env({DisorderFamily::gaussian}, 3);
  EXPECT_THROW(quenched_log_partition(env, {0.5, 0.0}, PathConstraint::forward(64), StartMeasure::delta(5)),
               std::invalid_argument);
  EXPECT_THROW(quenched_log_partition(env, {0.5, 0.0}, PathConstraint::unconstrained(0), StartMeasure::delta(0)),
               std::invalid_argument);
}

TEST(QuenchedEngine, SharedEnvironmentSweepsAreBitIdentical) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto c = random_case(rng, 60 + t);
    const std::vector<PolymerParams> grid{{0.3, 0.0}, {0.6, 0.5}, {1.2, -0.4}, {0.0, 2.0}};
    const auto many = quenched_log_partitions(c.env, grid, c.constraint, c.start);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_EQ(many[k], quenched_log_partition(c.env, grid[k], c.constraint, c.start)) << t << " " << k;
    }
  }
}

TEST(QuenchedEngine, TwoStepColumn) {
  const Environment env({DisorderFamily::gaussian}, 3);
  const auto col = quenched_endpoint_column(env, {0.0, 0.0}, PathConstraint::unconstrained(2), StartMeasure::delta(0));
  EXPECT_NEAR(col.log_at(-2), std::log(0.25), 1e-15);
  EXPECT_NEAR(col.log_at(0), std::log(0.5), 1e-15);
  EXPECT_NEAR(col.log_at(2), std::log(0.25), 1e-15);
  EXPECT_EQ(col.log_at(1), kNegInf);
}

TEST(QuenchedEngine, EndWindowNarrowsSupport) {
  const Environment env({DisorderFamily::rademacher}, 8);
  auto c = PathConstraint::unconstrained(20);
  c.end_window = Interval{2, 6};
  const auto col = quenched_endpoint_column(env, {0.7, 0.3}, c, StartMeasure::delta(0));
  EXPECT_EQ(col.x_min, 2);
  EXPECT_EQ(col.x_max(), 6);
  const auto nu = col.normalized();
  double total = 0.0;
  for (double p : nu.probabilities()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(QuenchedEngine, MonotoneInBoxAndWindow) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Environment env({DisorderFamily::gaussian}, rng());
    auto narrow = PathConstraint::forward(100);
    auto wide = narrow;
    wide.box = Interval::centered(0, 25);
    wide.end_window = Interval::centered(0, 4);
    const PolymerParams p{0.8, 0.4};
    const double a = quenched_log_partition(env, p, narrow, StartMeasure::delta(0));
    const double b = quenched_log_partition(env, p, wide, StartMeasure::delta(0));
    EXPECT_LE(a, b + 1e-12);
    EXPECT_LE(b, quenched_log_partition(env, p, PathConstraint::unconstrained(100), StartMeasure::delta(0)) + 1e-12);
  }
}

TEST(QuenchedEngine, LongSweepIsFinite) {
  const Environment env({DisorderFamily::gaussian}, 12);
  const double v = quenched_log_partition(env, {1.2, 0.0}, PathConstraint::unconstrained(4000), StartMeasure::delta(0));
  EXPECT_TRUE(std::isfinite(v));
  // f^q ≤ Λ(β) = 0.72; the quenched value is well below it.
  EXPECT_LT(v / 4000.0, 0.72);
}

TEST(QuenchedEngine, CorridorEqualsSingleSegment) {
  const Environment env({DisorderFamily::gaussian}, 21);
  const auto c = PathConstraint::up(36);
  Corridor corridor;
  corridor.start_window = c.start_window;
  corridor.segments = {{20, c.box, Interval::unbounded()}, {16, c.box, c.end_window}};
  const PolymerParams p{0.6, 0.5};
  EXPECT_NEAR(corridor_log_partition(env, p, corridor, StartMeasure::delta(0)),
              quenched_log_partition(env, p, c, StartMeasure::delta(0)), 1e-12);
}

TEST(AnnealedEngine, SmallCases) {
  const double g = 0.7;
  EXPECT_NEAR(annealed_log_mgf(g, PathConstraint::unconstrained(2), StartMeasure::delta(0)),
              std::log((std::exp(g) + 1.0) / 2.0), 1e-15);
  EXPECT_NEAR(annealed_log_mgf(g, PathConstraint::unconstrained(1), StartMeasure::delta(0)), 0.0, 1e-15);
}

TEST(AnnealedEngine, MatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto c = random_case(rng, 12);
    const double g = c.params.beta * c.params.u;
    const double dp = annealed_log_mgf(g, c.constraint, c.start);
    const double bf = oracle::annealed_log_mgf(g, c.constraint, c.start);
    if (bf == kNegInf) {
      EXPECT_EQ(dp, kNegInf);
    } else {
      EXPECT_NEAR(dp, bf, 1e-10);
    }
  }
}

TEST(AnnealedEngine, TrajectoryMatchesPointwise) {
  const auto traj = annealed_log_mgf_trajectory(0.4, 60, 2);
  EXPECT_EQ(traj[0], 0.0);
  for (std::int64_t n : {1, 7, 30, 60}) {
    EXPECT_NEAR(traj[static_cast<std::size_t>(n)],
                annealed_log_mgf(0.4, PathConstraint::unconstrained(n), StartMeasure::delta(2)), 1e-12);
  }
}

TEST(AnnealedEngine, ChainBoundFromWindowStarts) {
  for (std::int64_t n : {64, 256}) {
    for (double g : {0.2, 0.5}) {
      const double rhs = g + annealed_log_mgf(g, PathConstraint::unconstrained(n), StartMeasure::delta(0));
      const Height w = block_scales(n).window;
      for (Height x = -w; x <= w; ++x) {
        EXPECT_LE(annealed_log_mgf(g, PathConstraint::unconstrained(n), StartMeasure::delta(x)), rhs + 1e-12);
      }
    }
  }
}

TEST(QuenchedEngine, JensenAgainstAnnealed) {
  const DisorderSpec spec{DisorderFamily::gaussian};
  const PolymerParams p{0.5, 0.4};
  const auto c = PathConstraint::forward(64);
  const int reps = 200;
  double s = 0.0;
  double s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double v = quenched_log_partition(Environment(spec, child_seed(99, r)), p, c, StartMeasure::delta(0)) / 64.0;
    s += v;
    s2 += v * v;
  }
  const double mean = s / reps;
  const double se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
  const double annealed = cumulant(spec, p.beta) + annealed_log_mgf(p.beta * p.u, c, StartMeasure::delta(0)) / 64.0;
  EXPECT_LE(mean, annealed + 3.0 * se);
}

TEST(PairOverlap, SmallCases) {
  const double g = 0.9;
  EXPECT_NEAR(pair_overlap_log_mgf(g, 1, 0, 0), std::log(std::exp(g) / 2.0 + 0.5), 1e-15);
  EXPECT_EQ(pair_overlap_log_mgf(0.0, 50, 0, 0), 0.0);
  EXPECT_EQ(pair_overlap_log_mgf(g, 50, 0, 1), 0.0);
}

TEST(PairOverlap, MatchesEnumeration) {
  EXPECT_NEAR(pair_overlap_log_mgf(0.4, 10, 0, 0), oracle::pair_overlap_log_mgf(0.4, 10, 0, 0), 1e-10);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(-1.0, 1.5);
  for (int t = 0; t < 50; ++t) {
    const double g = unit(rng);
    const Height x1 = static_cast<Height>(rng() % 5) - 2;
    const Height x2 = static_cast<Height>(rng() % 5) - 2;
    const std::int64_t n = 1 + t % 8;
    EXPECT_NEAR(pair_overlap_log_mgf(g, n, x1, x2), oracle::pair_overlap_log_mgf(g, n, x1, x2), 1e-10);
  }
}

TEST(PairOverlap, TrajectoryMatchesPointwise) {
  const auto traj = pair_overlap_log_mgf_trajectory(0.3, 80);
  for (std::int64_t n : {0, 1, 2, 17, 80}) {
    EXPECT_NEAR(traj[static_cast<std::size_t>(n)], pair_overlap_log_mgf(0.3, n, 0, 0), 1e-12);
  }
}

TEST(SecondMoment, MatchesEnumeration) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    auto c = random_case(rng, 8);
    c.params.beta *= 0.5;
    const auto dp = pair_constrained_second_moment(c.env.spec(), c.params, c.constraint, c.start);
    const auto bf = oracle::pair_constrained_second_moment(c.env.spec(), c.params, c.constraint, c.start);
    if (bf.log_mean == kNegInf) {
      EXPECT_EQ(dp.log_mean, kNegInf);
      continue;
    }
    EXPECT_NEAR(dp.log_mean, bf.log_mean, kTol);
    EXPECT_NEAR(dp.log_second, bf.log_second, kTol);
  }
}

TEST(SecondMoment, NoDisorderMeansNoVariance) {
  const auto m = pair_constrained_second_moment({DisorderFamily::gaussian}, {0.0, 3.0}, PathConstraint::forward(36),
                                                StartMeasure::delta(0));
  EXPECT_NEAR(m.log_second, 2.0 * m.log_mean, 1e-12);
  EXPECT_NEAR(m.variance_ratio(), 0.0, 1e-12);
}

TEST(SecondMoment, VarianceRatioMatchesMonteCarlo) {
  const DisorderSpec spec{DisorderFamily::gaussian};
  const PolymerParams p{0.3, 0.0};
  const auto c = PathConstraint::unconstrained(32);
  const auto exact = pair_constrained_second_moment(spec, p, c, StartMeasure::delta(0));
  const double mean_z = std::exp(exact.log_mean);
  const int reps = 10000;
  double s = 0.0;
  double s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double z = std::exp(quenched_log_partition(Environment(spec, child_seed(5, r)), p, c, StartMeasure::delta(0)));
    const double dev = (z - mean_z) * (z - mean_z) / (mean_z * mean_z);
    s += dev;
    s2 += dev * dev;
  }
  const double est = s / reps;
  const double se = std::sqrt((s2 / reps - est * est) / (reps - 1));
  EXPECT_NEAR(est, exact.variance_ratio(), 3.0 * se);
}

TEST(PolymerKernel, ZeroCouplingIsSimpleWalk) {
  const auto row = polymer_kernel(0.0, 20, 3, 5);
  EXPECT_DOUBLE_EQ(row.prob_up, 0.5);
  EXPECT_DOUBLE_EQ(row.prob_down, 0.5);
}

TEST(PolymerKernel, RowsSumToOneAndDriftTowardDefect) {
  const PinningWeights w(0.5, 100);
  for (std::int64_t k = 0; k < 100; ++k) {
    for (Height z = -100; z <= 100; ++z) {
      const auto row = polymer_kernel(w, k, z);
      EXPECT_NEAR(row.prob_up + row.prob_down, 1.0, 1e-12);
      if (z >= 1) EXPECT_GE(row.prob_down, 0.5 - 1e-15);
    }
  }
  EXPECT_THROW(polymer_kernel(w, 100, 0), std::invalid_argument);
}

TEST(PinningWeights, AgreesWithForwardEngine) {
  const PinningWeights w(0.6, 40);
  for (Height x : {-3, 0, 1, 6}) {
    EXPECT_NEAR(w.log_w(40, x), annealed_log_mgf(0.6, PathConstraint::unconstrained(40), StartMeasure::delta(x)),
                1e-12);
  }
}

}  // namespace
}  // namespace dpre

TEST(OracleSuite, AllEnginesPass) {
  const auto rep = dpre::run_oracle_suite(12345, 50);
  ASSERT_EQ(rep.rows.size(), 5u);
  for (const auto& r : rep.rows) {
    EXPECT_TRUE(r.pass) << r.engine << " err=" << r.max_abs_error << " inf=" << r.infinity_mismatches;
    EXPECT_EQ(r.instances, 50);
  }
  EXPECT_TRUE(rep.pass);
}
