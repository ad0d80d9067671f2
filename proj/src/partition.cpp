#include "dpre/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail/sweep.hpp"

namespace dpre {

using detail::ScaledColumn;

// ---- StartMeasure / LogColumn -------------------------------------------------

StartMeasure StartMeasure::delta(Height x) {
  StartMeasure m;
  m.x_min_ = x;
  m.probs_ = {1.0};
  return m;
}

StartMeasure StartMeasure::from_weights(Height x_min, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("StartMeasure: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("StartMeasure: weights have zero total");
  for (double& w : weights) w /= total;
  StartMeasure m;
  m.x_min_ = x_min;
  m.probs_ = std::move(weights);
  return m;
}

double StartMeasure::at(Height x) const {
  if (x < x_min_ || x > x_max()) return 0.0;
  return probs_[static_cast<std::size_t>(x - x_min_)];
}

Interval StartMeasure::support() const {
  Height lo = x_min_;
  Height hi = x_max();
  while (lo <= hi && at(lo) <= 0.0) ++lo;
  while (hi >= lo && at(hi) <= 0.0) --hi;
  return {lo, hi};
}

StartMeasure StartMeasure::shifted(Height dy) const {
  StartMeasure m = *this;
  m.x_min_ += dy;
  return m;
}

double LogColumn::log_at(Height x) const {
  if (x < x_min || x > x_max()) return kNegInf;
  return log_weights[static_cast<std::size_t>(x - x_min)];
}

double LogColumn::log_total() const { return log_sum_exp(log_weights); }

bool LogColumn::empty() const {
  return std::all_of(log_weights.begin(), log_weights.end(), [](double v) { return v == kNegInf; });
}

StartMeasure LogColumn::normalized() const {
  const double top = log_weights.empty() ? kNegInf : *std::max_element(log_weights.begin(), log_weights.end());
  if (top == kNegInf) throw std::invalid_argument("LogColumn::normalized: empty column");
  std::vector<double> w(log_weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_weights[k] - top);
  return StartMeasure::from_weights(x_min, std::move(w));
}

// ---- Corridor -----------------------------------------------------------------

Corridor Corridor::from(const PathConstraint& constraint) {
  Corridor c;
  c.start_window = constraint.start_window;
  c.segments.push_back({constraint.length, constraint.box, constraint.end_window});
  c.end_point = constraint.end_point;
  return c;
}

std::int64_t Corridor::total_length() const {
  std::int64_t n = 0;
  for (const auto& s : segments) n += s.length;
  return n;
}

namespace {

void require_length(const Corridor& corridor) {
  if (corridor.total_length() < 1) throw std::invalid_argument("path length must be >= 1");
}

LogColumn merge_columns(std::int64_t time, const std::vector<ScaledColumn>& cols) {
  LogColumn out;
  out.time = time;
  Height lo = Interval::kFar;
  Height hi = -Interval::kFar;
  for (const auto& c : cols) {
    if (c.empty()) continue;
    lo = std::min(lo, c.lo);
    hi = std::max(hi, c.hi());
  }
  if (lo > hi) return out;
  out.x_min = lo;
  out.log_weights.assign(static_cast<std::size_t>(hi - lo + 1), kNegInf);
  for (const auto& c : cols) {
    for (std::size_t k = 0; k < c.w.size(); ++k) {
      if (c.w[k] <= 0.0) continue;
      const auto idx = static_cast<std::size_t>(c.lo + 2 * static_cast<Height>(k) - lo);
      out.log_weights[idx] = c.log_scale + std::log(c.w[k]);
    }
  }
  return out;
}

template <class WeightFn>
std::vector<ScaledColumn> run_corridor(const Corridor& corridor, const StartMeasure& start, const WeightFn& weights) {
  require_length(corridor);
  std::vector<ScaledColumn> cols = detail::split_by_parity(start, corridor.start_window);
  for (auto& c : cols) c = detail::sweep(corridor, std::move(c), weights);
  return cols;
}

double total_of(const std::vector<ScaledColumn>& cols) {
  LogSumAccumulator acc;
  for (const auto& c : cols) acc.add(c.log_total());
  return acc.value();
}

}  // namespace

// ---- quenched ---------------------------------------------------------------

double corridor_log_partition(const Environment& env, PolymerParams params, const Corridor& corridor,
                              const StartMeasure& start) {
  return total_of(run_corridor(corridor, start, detail::QuenchedSiteWeights{&env, params.beta, params.u}));
}

LogColumn corridor_endpoint_column(const Environment& env, PolymerParams params, const Corridor& corridor,
                                   const StartMeasure& start) {
  return merge_columns(corridor.total_length(),
                       run_corridor(corridor, start, detail::QuenchedSiteWeights{&env, params.beta, params.u}));
}

double quenched_log_partition(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                              const StartMeasure& start) {
  return corridor_log_partition(env, params, Corridor::from(constraint), start);
}

LogColumn quenched_endpoint_column(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                                   const StartMeasure& start) {
  return corridor_endpoint_column(env, params, Corridor::from(constraint), start);
}

std::vector<double> quenched_log_partitions(const Environment& env, std::span<const PolymerParams> params,
                                            const PathConstraint& constraint, const StartMeasure& start) {
  const Corridor corridor = Corridor::from(constraint);
  require_length(corridor);
  const std::size_t k = params.size();
  std::vector<LogSumAccumulator> totals(k);
  detail::SweepScratch scratch;
  std::vector<double> values;
  for (const ScaledColumn& initial : detail::split_by_parity(start, corridor.start_window)) {
    std::vector<ScaledColumn> cols(k, initial);
    std::vector<Interval> ranges(k);
    for (std::int64_t t = 1; t <= constraint.length; ++t) {
      // Union of the live ranges; every column shares the parity lattice.
      Interval cover{Interval::kFar, -Interval::kFar};
      const Interval allowed = detail::allowed_at(corridor, 0, t);
      for (std::size_t c = 0; c < k; ++c) {
        if (cols[c].empty()) continue;
        ranges[c] = detail::next_range(cols[c], allowed);
        if (ranges[c].empty()) continue;
        cover.lo = std::min(cover.lo, ranges[c].lo);
        cover.hi = std::max(cover.hi, ranges[c].hi);
      }
      if (cover.empty()) {
        for (auto& col : cols) col.w.clear();
        break;
      }
      values.resize(static_cast<std::size_t>((cover.hi - cover.lo) / 2 + 1));
      env.fill(t, cover.lo, 2, values);
      for (std::size_t c = 0; c < k; ++c) {
        if (cols[c].empty()) continue;
        const PolymerParams p = params[c];
        auto weights = [&](std::int64_t, Height x_lo, std::span<double> out) {
          const auto base = static_cast<std::size_t>((x_lo - cover.lo) / 2);
          for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::exp(p.beta * values[base + m]);
          detail::QuenchedSiteWeights::apply_defect(x_lo, out, std::exp(p.beta * p.u));
        };
        detail::advance(cols[c], ranges[c], t, weights, scratch);
      }
    }
    for (std::size_t c = 0; c < k; ++c) totals[c].add(cols[c].log_total());
  }
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = totals[c].value();
  return out;
}

// ---- annealed -------------------------------------------------------------------

double annealed_log_mgf(double gamma, const PathConstraint& constraint, const StartMeasure& start) {
  return total_of(run_corridor(Corridor::from(constraint), start, detail::PinningSiteWeights{gamma}));
}

LogColumn annealed_endpoint_column(double gamma, const PathConstraint& constraint, const StartMeasure& start) {
  const Corridor corridor = Corridor::from(constraint);
  return merge_columns(corridor.total_length(), run_corridor(corridor, start, detail::PinningSiteWeights{gamma}));
}

std::vector<double> annealed_log_mgf_trajectory(double gamma, std::int64_t n_max, Height start) {
  if (n_max < 0) throw std::invalid_argument("annealed_log_mgf_trajectory: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (n_max == 0) return out;
  ScaledColumn col;
  col.lo = start;
  col.w = {1.0};
  const Corridor corridor = Corridor::from(PathConstraint::unconstrained(n_max));
  detail::sweep(corridor, std::move(col), detail::PinningSiteWeights{gamma},
                [&out](std::int64_t j, const ScaledColumn& c) { out[static_cast<std::size_t>(j)] = c.log_total(); });
  return out;
}

// ---- pairs ------------------------------------------------------------------

namespace {

// Lazy walk on k = (x1 − x2)/2 with steps −1, 0, +1 (probabilities 1/4, 1/2,
// 1/4) and weight e^γ whenever k = 0. Calls on_step(n, log E[e^{γ B_n}; k_n]).
template <class StepHook>
void difference_walk_sweep(double gamma, std::int64_t n, Height k0, StepHook&& on_step) {
  Height lo = k0;
  std::vector<double> w{1.0};
  std::vector<double> next;
  double log_scale = 0.0;
  const double hit = std::exp(gamma);
  for (std::int64_t j = 1; j <= n; ++j) {
    const std::size_t size = w.size();
    next.assign(size + 2, 0.0);
    for (std::size_t m = 0; m < size; ++m) {
      const double v = w[m];
      next[m] += 0.25 * v;
      next[m + 1] += 0.5 * v;
      next[m + 2] += 0.25 * v;
    }
    lo -= 1;
    if (lo <= 0 && -lo < static_cast<Height>(next.size())) next[static_cast<std::size_t>(-lo)] *= hit;
    const double top = *std::max_element(next.begin(), next.end());
    for (double& v : next) v /= top;
    log_scale += std::log(top);
    std::size_t first = 0;
    std::size_t last = next.size();
    while (first < last && next[first] < detail::kPruneRatio) ++first;
    while (last > first && next[last - 1] < detail::kPruneRatio) --last;
    w.assign(next.begin() + static_cast<std::ptrdiff_t>(first), next.begin() + static_cast<std::ptrdiff_t>(last));
    lo += static_cast<Height>(first);
    double s = 0.0;
    for (double v : w) s += v;
    on_step(j, log_scale + std::log(s));
  }
}

}  // namespace

double pair_overlap_log_mgf(double gamma, std::int64_t n, Height x1, Height x2) {
  if (n < 0) throw std::invalid_argument("pair_overlap_log_mgf: n must be >= 0");
  const Height d = x1 - x2;
  if (d % 2 != 0 || n == 0 || gamma == 0.0) return 0.0;
  double result = 0.0;
  difference_walk_sweep(gamma, n, d / 2, [&result](std::int64_t, double v) { result = v; });
  return result;
}

std::vector<double> pair_overlap_log_mgf_trajectory(double gamma, std::int64_t n_max) {
  if (n_max < 0) throw std::invalid_argument("pair_overlap_log_mgf_trajectory: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  difference_walk_sweep(gamma, n_max, 0, [&out](std::int64_t j, double v) { out[static_cast<std::size_t>(j)] = v; });
  return out;
}

double SecondMoment::variance_ratio() const {
  if (log_mean == kNegInf) return 0.0;
  return std::expm1(log_second - 2.0 * log_mean);
}

SecondMoment pair_constrained_second_moment(const DisorderSpec& spec, PolymerParams params,
                                            const PathConstraint& constraint, const StartMeasure& start) {
  if (constraint.length < 1) throw std::invalid_argument("path length must be >= 1");
  const Interval support = start.support();
  if (support.empty() || !constraint.start_window.contains(support.lo) ||
      !constraint.start_window.contains(support.hi)) {
    throw std::invalid_argument("start measure is not supported in the start window");
  }
  const double lambda = cumulant(spec, params.beta);
  const double phi = overlap_coupling(spec, params.beta);
  const double gamma = params.beta * params.u;
  const auto n = constraint.length;

  SecondMoment out;
  const double log_mgf = annealed_log_mgf(gamma, constraint, start);
  if (log_mgf == kNegInf) return out;
  out.log_mean = log_mgf + lambda * static_cast<double>(n);

  // Both walks live on heights [lo, hi]: the box intersected with the light cone.
  const Interval grid = constraint.box.intersect({support.lo - n, support.hi + n});
  const Height lo = grid.lo;
  const auto width = static_cast<std::size_t>(grid.size());
  auto at = [width](std::size_t a, std::size_t b) { return a * width + b; };

  std::vector<double> g(width * width, 0.0);
  std::vector<double> tmp(width * width, 0.0);
  for (Height x1 = support.lo; x1 <= support.hi; ++x1) {
    for (Height x2 = support.lo; x2 <= support.hi; ++x2) {
      g[at(static_cast<std::size_t>(x1 - lo), static_cast<std::size_t>(x2 - lo))] = start.at(x1) * start.at(x2);
    }
  }

  const double e_gamma = std::exp(gamma);
  const double e_phi = std::exp(phi);
  const bool zero_in_grid = grid.contains(0);
  const auto zero = static_cast<std::size_t>(zero_in_grid ? -lo : 0);
  double log_scale = 0.0;

  for (std::int64_t j = 1; j <= n; ++j) {
    // First walk.
    for (std::size_t a = 0; a < width; ++a) {
      for (std::size_t b = 0; b < width; ++b) {
        const double below = a > 0 ? g[at(a - 1, b)] : 0.0;
        const double above = a + 1 < width ? g[at(a + 1, b)] : 0.0;
        tmp[at(a, b)] = 0.5 * (below + above);
      }
    }
    // Second walk.
    for (std::size_t a = 0; a < width; ++a) {
      for (std::size_t b = 0; b < width; ++b) {
        const double below = b > 0 ? tmp[at(a, b - 1)] : 0.0;
        const double above = b + 1 < width ? tmp[at(a, b + 1)] : 0.0;
        g[at(a, b)] = 0.5 * (below + above);
      }
    }
    for (std::size_t a = 0; a < width; ++a) g[at(a, a)] *= e_phi;
    if (zero_in_grid) {
      for (std::size_t b = 0; b < width; ++b) {
        g[at(zero, b)] *= e_gamma;
        g[at(b, zero)] *= e_gamma;
      }
    }
    if (j == n) {
      const Interval allowed = constraint.allowed_at(n);
      for (std::size_t a = 0; a < width; ++a) {
        const bool keep_a = allowed.contains(lo + static_cast<Height>(a));
        for (std::size_t b = 0; b < width; ++b) {
          if (!keep_a || !allowed.contains(lo + static_cast<Height>(b))) g[at(a, b)] = 0.0;
        }
      }
    }
    const double top = *std::max_element(g.begin(), g.end());
    if (!(top > 0.0)) return out;
    for (double& v : g) v /= top;
    log_scale += std::log(top);
  }
  double sum = 0.0;
  for (double v : g) sum += v;
  out.log_second = log_scale + std::log(sum) + 2.0 * lambda * static_cast<double>(n);
  return out;
}

// ---- homogeneous polymer kernel ---------------------------------------------

PinningWeights::PinningWeights(double gamma, std::int64_t n) : gamma_(gamma), n_(n), half_width_(n + 1) {
  if (n < 0) throw std::invalid_argument("PinningWeights: n must be >= 0");
  const auto row = static_cast<std::size_t>(2 * half_width_ + 1);
  table_.assign(row * static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t m = 1; m <= n; ++m) {
    for (Height x = -half_width_; x <= half_width_; ++x) {
      // W(m, x) = ½ Σ_{y = x±1} e^{γ1{y=0}} W(m−1, y).
      const double up = log_w(m - 1, x + 1) + (x + 1 == 0 ? gamma : 0.0);
      const double down = log_w(m - 1, x - 1) + (x - 1 == 0 ? gamma : 0.0);
      table_[static_cast<std::size_t>(m) * row + static_cast<std::size_t>(x + half_width_)] =
          log_add(up, down) - std::log(2.0);
    }
  }
}

double PinningWeights::log_w(std::int64_t m, Height x) const {
  if (m < 0 || m > n_) throw std::out_of_range("PinningWeights::log_w: m outside table");
  if (x < -half_width_ || x > half_width_) return 0.0;
  const auto row = static_cast<std::size_t>(2 * half_width_ + 1);
  return table_[static_cast<std::size_t>(m) * row + static_cast<std::size_t>(x + half_width_)];
}

KernelRow polymer_kernel(const PinningWeights& weights, std::int64_t k, Height z) {
  const std::int64_t n = weights.length();
  if (k < 0 || k >= n) throw std::invalid_argument("polymer_kernel: need 0 <= k < N");
  const double gamma = weights.gamma();
  const double denom = weights.log_w(n - k, z);
  auto prob = [&](Height y) {
    return 0.5 * std::exp((y == 0 ? gamma : 0.0) + weights.log_w(n - k - 1, y) - denom);
  };
  return {prob(z + 1), prob(z - 1)};
}

KernelRow polymer_kernel(double gamma, std::int64_t n, std::int64_t k, Height z) {
  return polymer_kernel(PinningWeights(gamma, n), k, z);
}

}  // namespace dpre
