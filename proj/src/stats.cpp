#include "dpre/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

#include "dpre/disorder.hpp"

namespace dpre {

std::uint64_t digest_seeds(std::span<const std::uint64_t> seeds) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t s : seeds) h = mix64(h ^ s);
  return h;
}

McEstimate summarize(std::span<const double> values, std::span<const std::uint64_t> seeds) {
  McEstimate e;
  e.count = values.size();
  e.seed_digest = digest_seeds(seeds);
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return e;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.variance = ss / static_cast<double>(values.size() - 1);
  e.std_error = std::sqrt(e.variance / static_cast<double>(values.size()));
  return e;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y, double level) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  LinearFit f;
  f.points = x.size();
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) {
    const double dof = n - 2.0;
    f.slope_se = std::sqrt(sse / dof / sxx);
    const boost::math::students_t dist(dof);
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
    f.slope_lo = f.slope - t * f.slope_se;
    f.slope_hi = f.slope + t * f.slope_se;
  } else {
    f.slope_lo = f.slope_hi = f.slope;
  }
  return f;
}

ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  ProportionInterval r;
  if (trials == 0) return {0.0, 0.0, 1.0};
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  r.estimate = p;
  r.lo = std::max(0.0, center - half);
  r.hi = std::min(1.0, center + half);
  return r;
}

}  // namespace dpre
