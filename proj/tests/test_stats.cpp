#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "dpre/stats.hpp"

using namespace dpre;

TEST(Stats, Summarize) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto e = summarize(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0 / 4.0));
  const std::vector<std::uint64_t> s1{1, 2}, s2{2, 1};
  EXPECT_NE(digest_seeds(s1), digest_seeds(s2));
}

TEST(Stats, FitLine) {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1, 3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  const std::vector<double> noisy{1.1, 2.9, 5.2, 6.8, 9.1};
  const auto g = fit_line(x, noisy);
  // Reference values from a textbook OLS computation.
  EXPECT_NEAR(g.slope, 1.99, 1e-12);
  EXPECT_NEAR(g.slope_se, std::sqrt(0.107 / 3.0 / 10.0), 1e-12);
  EXPECT_NEAR(g.slope_hi - g.slope, 3.182446305284263 * g.slope_se, 1e-9);
  EXPECT_THROW(fit_line(std::vector<double>{1, 1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(Stats, Wilson) {
  const auto w = wilson_interval(20, 20);
  EXPECT_DOUBLE_EQ(w.estimate, 1.0);
  EXPECT_NEAR(w.lo, 0.8389, 1e-4);
  EXPECT_DOUBLE_EQ(w.hi, 1.0);
}

TEST(Stats, ParallelMapOrdered) {
  const auto a = parallel_map<int>(100, 4, [](std::size_t k) { return static_cast<int>(k * k); });
  for (std::size_t k = 0; k < 100; ++k) EXPECT_EQ(a[k], static_cast<int>(k * k));
  EXPECT_THROW(parallel_map<int>(10, 3, [](std::size_t k) -> int {
                 if (k == 7) throw std::runtime_error("x");
                 return 0;
               }),
               std::runtime_error);
}
