#include "dpre/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dpre/log_math.hpp"
#include "dpre/partition.hpp"

namespace dpre {

FreeEnergyBracket free_energy_bracket(double gamma, std::int64_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("free_energy_bracket: N must be even and >= 2");
  FreeEnergyBracket b;
  b.gamma = gamma;
  b.n = n;
  PathConstraint pinned = PathConstraint::unconstrained(n);
  pinned.end_point = 0;
  const double nn = static_cast<double>(n);
  b.lower = annealed_log_mgf(gamma, pinned, StartMeasure::delta(0)) / nn;
  if (gamma <= 0.0) {
    b.upper = 0.0;
  } else {
    b.upper = (gamma + annealed_log_mgf(gamma, PathConstraint::unconstrained(n), StartMeasure::delta(0))) / nn;
  }
  return b;
}

double free_energy_oracle(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("free_energy_oracle: gamma must be > 0");
  const double q = -std::expm1(-gamma);
  return -0.5 * std::log1p(-q * q);
}

double certified_free_energy(double gamma, std::int64_t n) {
  if (gamma <= 0.0) return 0.0;
  const double f = free_energy_oracle(gamma);
  const FreeEnergyBracket b = free_energy_bracket(gamma, n);
  return b.contains(f) ? f : b.lower;
}

double correlation_length(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("correlation_length: F(gamma) = 0 for gamma <= 0");
  return 1.0 / free_energy_oracle(gamma);
}

double normal_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

double xi_tail(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("xi_tail: eps must be > 0");
  return normal_tail(1.0 / (4.0 * std::sqrt(eps)));
}

double LinkProbabilities::min() const { return std::min({forward, up, down}); }

LinkProbabilities link_probabilities(std::int64_t n) {
  LinkProbabilities p;
  p.n = n;
  const Height w = block_scales(n).window;
  auto min_over_window = [&](int offset) {
    double best = 1.0;
    const auto c = PathConstraint::link(n, offset);
    for (Height x = -w; x <= w; ++x) best = std::min(best, std::exp(annealed_log_mgf(0.0, c, StartMeasure::delta(x))));
    return best;
  };
  p.forward = min_over_window(0);
  p.up = min_over_window(1);
  p.down = min_over_window(-1);
  return p;
}

HayatiReport hayati_check(double gamma, std::int64_t n) {
  HayatiReport r;
  r.n = n;
  r.gamma = gamma;
  const auto omega = PathConstraint::forward(n);
  const auto free = PathConstraint::unconstrained(n);
  const Height w = block_scales(n).window;
  r.epsilon0_hat = 1.0;
  r.min_walk_probability = 1.0;
  r.pass = true;
  for (Height x = -w; x <= w; ++x) {
    HayatiRow row;
    row.x = x;
    const auto start = StartMeasure::delta(x);
    row.ratio = std::exp(annealed_log_mgf(gamma, omega, start) - annealed_log_mgf(gamma, free, start));
    row.walk_probability = std::exp(annealed_log_mgf(0.0, omega, start));
    row.pass = row.ratio >= row.walk_probability;
    r.epsilon0_hat = std::min(r.epsilon0_hat, row.ratio);
    r.min_walk_probability = std::min(r.min_walk_probability, row.walk_probability);
    r.pass = r.pass && row.pass;
    r.rows.push_back(row);
  }
  r.pass = r.pass && r.epsilon0_hat > 0.0;
  return r;
}

KustoReport kusto_check(double gamma, double eps, std::int64_t n) {
  KustoReport r;
  r.n = n;
  r.gamma = gamma;
  r.eps = eps;
  r.f_lower = free_energy_bracket(gamma, kBracketLength).lower;
  r.f_certified = certified_free_energy(gamma);
  const double log_const = std::log(0.5 * xi_tail(eps));
  const double scale = (1.0 - eps) * static_cast<double>(n);
  const Height w = block_scales(n).window;
  r.pass = true;
  r.pass_certified = true;
  for (Height x = -w; x <= w; ++x) {
    KustoRow row;
    row.x = x;
    row.log_lhs = annealed_log_mgf(gamma, PathConstraint::unconstrained(n), StartMeasure::delta(x));
    row.log_rhs = log_const + scale * r.f_lower;
    row.log_rhs_certified = log_const + scale * r.f_certified;
    row.pass = row.log_lhs >= row.log_rhs;
    r.pass = r.pass && row.pass;
    r.pass_certified = r.pass_certified && row.log_lhs >= row.log_rhs_certified;
    r.rows.push_back(row);
  }
  return r;
}

PinningConstants pinning_constants(double gamma, double eps, std::int64_t n) {
  PinningConstants c;
  c.n = n;
  c.gamma = gamma;
  c.eps = eps;
  c.epsilon0_hat = gamma > 0.0 ? hayati_check(gamma, n).epsilon0_hat : hayati_check(0.0, n).min_walk_probability;
  c.links = link_probabilities(n);
  c.xi_tail = xi_tail(eps);
  c.theta_on = 0.25 * c.epsilon0_hat * c.xi_tail;
  c.theta_off = 0.25 * std::min(c.links.min(), 4.0 * c.theta_on);
  return c;
}

UpbReport upb_check(double gamma, std::int64_t j_max) {
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("upb_check: gamma must lie in (0, 1]");
  if (j_max < 1) throw std::invalid_argument("upb_check: j_max must be >= 1");
  UpbReport r;
  r.gamma = gamma;
  r.correlation_length = correlation_length(gamma);
  if (static_cast<double>(j_max) * r.correlation_length > 1e5) {
    throw std::invalid_argument("upb_check: j_max * M exceeds 1e5");
  }
  for (std::int64_t j = 1; j <= j_max; ++j) {
    r.lengths.push_back(std::max<std::int64_t>(1, std::llround(static_cast<double>(j) * r.correlation_length)));
  }
  const auto traj = annealed_log_mgf_trajectory(gamma, r.lengths.back());
  r.max_per_block = -std::numeric_limits<double>::infinity();
  for (std::int64_t j = 1; j <= j_max; ++j) {
    const double v = (traj[static_cast<std::size_t>(r.lengths[static_cast<std::size_t>(j - 1)])] -
                      std::log(static_cast<double>(j))) /
                     static_cast<double>(j);
    r.per_block.push_back(v);
    r.max_per_block = std::max(r.max_per_block, v);
  }
  return r;
}

std::vector<double> overlap_tail(std::int64_t r, int k_max) {
  if (r < 1 || k_max < 1) throw std::invalid_argument("overlap_tail: need R >= 1 and k_max >= 1");
  // P(B_R ≥ k) = P(T_k ≤ R), T_k a sum of k i.i.d. excursion lengths.
  const auto pmf = hitting_time_pmf(WalkKind::difference, r);
  const auto size = static_cast<std::size_t>(r) + 1;
  std::vector<double> dist(size, 0.0);  // P(T_k = t), t = 0..R
  dist[0] = 1.0;
  std::vector<double> next(size);
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t t = 0; t < size; ++t) {
      const double base = dist[t];
      if (base == 0.0) continue;
      const std::size_t reach = size - t;
      for (std::size_t m = 1; m < reach; ++m) next[t + m] += base * pmf[m - 1];
    }
    std::swap(dist, next);
    double cdf = 0.0;
    for (double p : dist) cdf += p;
    out.push_back(cdf);
  }
  return out;
}

namespace {

double overlap_moment(double phi, double log_mgf) { return std::expm1(log_mgf + 2.0 * phi); }

}  // namespace

CrlReport crl_check(const DisorderSpec& spec, double beta, double a, std::int64_t r, int k_max) {
  if (r < 1 || r > 100000) throw std::invalid_argument("crl_check: R must lie in [1, 1e5]");
  CrlReport c;
  c.beta = beta;
  c.a = a;
  c.r = r;
  c.phi = overlap_coupling(spec, beta);
  c.value = overlap_moment(c.phi, pair_overlap_log_mgf(2.0 * c.phi, r, 0, 0));
  c.pass = c.value <= a;
  c.p_r = 1.0 / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(r));
  const double growth = (1.0 - c.p_r) * std::exp(2.0 * c.phi);
  c.geometric_diverges = growth >= 1.0;
  c.geometric_bound = c.geometric_diverges ? std::numeric_limits<double>::infinity()
                                           : c.p_r * std::exp(2.0 * c.phi) / (1.0 - growth) - 1.0;
  c.tail = overlap_tail(r, k_max);
  c.domination_holds = true;
  for (int k = 1; k <= k_max; ++k) {
    if (c.tail[static_cast<std::size_t>(k - 1)] > std::pow(1.0 - c.p_r, k)) c.domination_holds = false;
  }
  return c;
}

CrlScan crl_k5_scan(const DisorderSpec& spec, double beta, double a, std::int64_t r_max) {
  if (r_max < 1 || r_max > 100000) throw std::invalid_argument("crl_k5_scan: r_max must lie in [1, 1e5]");
  CrlScan s;
  s.beta = beta;
  s.a = a;
  s.r_max = r_max;
  const double phi = overlap_coupling(spec, beta);
  const auto traj = pair_overlap_log_mgf_trajectory(2.0 * phi, r_max);
  s.values.reserve(traj.size());
  for (double v : traj) s.values.push_back(overlap_moment(phi, v));
  s.monotone = std::is_sorted(s.values.begin(), s.values.end());
  for (std::int64_t r = 1; r <= r_max; ++r) {
    if (s.values[static_cast<std::size_t>(r)] <= a) s.largest_passing_r = r;
  }
  s.k5_hat = static_cast<double>(s.largest_passing_r) * std::pow(beta, 4);
  return s;
}

}  // namespace dpre
