#pragma once

// Column sweep shared by the quenched and annealed engines.
//
// A column holds linear weights on heights lo, lo+2, ... (one parity class)
// together with a common log scale; after every step it is divided by its
// maximum. Edge entries below kPruneRatio of the maximum are dropped: they
// sit far below double resolution of the column total, and skipping them
// keeps unconstrained sweeps from touching the underflowed tails of the
// light cone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpre/log_math.hpp"
#include "dpre/partition.hpp"

namespace dpre::detail {

inline constexpr double kPruneRatio = 0x1p-1000;

struct ScaledColumn {
  Height lo = 0;
  std::vector<double> w;
  double log_scale = 0.0;

  bool empty() const { return w.empty(); }
  Height hi() const { return lo + 2 * (static_cast<Height>(w.size()) - 1); }
  double log_total() const {
    if (w.empty()) return kNegInf;
    double s = 0.0;
    for (double v : w) s += v;
    return s > 0.0 ? log_scale + std::log(s) : kNegInf;
  }
};

struct NoStepHook {
  void operator()(std::int64_t, const ScaledColumn&) const {}
};

inline Height round_up_even(Height d) { return d + (d & 1); }

/// Splits a start measure into its (at most two) parity classes.
inline std::vector<ScaledColumn> split_by_parity(const StartMeasure& start, const Interval& start_window) {
  const Interval support = start.support();
  if (support.empty()) throw std::invalid_argument("start measure has no mass");
  if (!start_window.contains(support.lo) || !start_window.contains(support.hi)) {
    throw std::invalid_argument("start measure is not supported in the start window");
  }
  std::vector<ScaledColumn> out;
  for (Height parity = 0; parity < 2; ++parity) {
    Height first = support.lo;
    if (((first % 2) + 2) % 2 != parity) ++first;
    Height last = first - 2;
    for (Height x = first; x <= support.hi; x += 2) {
      if (start.at(x) > 0.0) last = x;
    }
    Height lo = first;
    while (lo <= last && start.at(lo) <= 0.0) lo += 2;
    if (lo > last) continue;
    ScaledColumn col;
    col.lo = lo;
    for (Height x = lo; x <= last; x += 2) col.w.push_back(start.at(x));
    out.push_back(std::move(col));
  }
  return out;
}

/// Heights allowed at step t (1-based) of segment s.
inline Interval allowed_at(const Corridor& corridor, std::size_t s, std::int64_t t) {
  const CorridorSegment& seg = corridor.segments[s];
  Interval allowed = seg.box;
  if (t == seg.length) {
    allowed = allowed.intersect(seg.end_window);
    if (s + 1 == corridor.segments.size() && corridor.end_point) {
      allowed = allowed.intersect(Interval::point(*corridor.end_point));
    }
  }
  return allowed;
}

/// Candidate heights after one step from `col`, clipped to `allowed` with
/// the right parity; empty when nothing survives.
inline Interval next_range(const ScaledColumn& col, const Interval& allowed) {
  Height lo = col.lo - 1;
  Height hi = col.hi() + 1;
  if (lo < allowed.lo) lo += round_up_even(allowed.lo - lo);
  if (hi > allowed.hi) hi -= round_up_even(hi - allowed.hi);
  return {lo, hi};
}

/// Scratch buffers reused across steps.
struct SweepScratch {
  std::vector<double> padded;
  std::vector<double> site_w;
};

/// One step of `col` onto `range` (from next_range). Returns false and
/// empties the column when all mass is lost.
template <class WeightFn>
bool advance(ScaledColumn& col, const Interval& range, std::int64_t time, const WeightFn& weights,
             SweepScratch& scratch) {
  if (col.empty() || range.empty()) {
    col.w.clear();
    col.log_scale = kNegInf;
    return false;
  }
  const Height prev_lo = col.lo;
  const std::size_t n_prev = col.w.size();
  const Height lo = range.lo;
  const auto n_new = static_cast<std::size_t>((range.hi - lo) / 2 + 1);

  scratch.padded.assign(n_prev + 2, 0.0);
  std::copy(col.w.begin(), col.w.end(), scratch.padded.begin() + 1);
  // padded[offset + m] and padded[offset + m + 1] are the parents x∓1.
  const auto offset = static_cast<std::size_t>((lo - prev_lo - 1) / 2 + 1);

  scratch.site_w.resize(n_new);
  weights(time, lo, std::span<double>(scratch.site_w));

  col.w.resize(n_new);
  col.lo = lo;
  double max_w = 0.0;
  for (std::size_t m = 0; m < n_new; ++m) {
    const double v = 0.5 * (scratch.padded[offset + m] + scratch.padded[offset + m + 1]) * scratch.site_w[m];
    col.w[m] = v;
    max_w = std::max(max_w, v);
  }
  if (!(max_w > 0.0)) {
    col.w.clear();
    col.log_scale = kNegInf;
    return false;
  }
  const double inv = 1.0 / max_w;
  for (double& v : col.w) v *= inv;
  col.log_scale += std::log(max_w);

  std::size_t first = 0;
  std::size_t last = col.w.size();
  while (first < last && col.w[first] < kPruneRatio) ++first;
  while (last > first && col.w[last - 1] < kPruneRatio) --last;
  if (first > 0 || last < col.w.size()) {
    col.w.erase(col.w.begin() + static_cast<std::ptrdiff_t>(last), col.w.end());
    col.w.erase(col.w.begin(), col.w.begin() + static_cast<std::ptrdiff_t>(first));
    col.lo += 2 * static_cast<Height>(first);
  }
  return true;
}

/// Propagates `col` through every segment of `corridor`. WeightFn fills
/// multiplicative site weights: weights(time, x_lo, out) for heights
/// x_lo + 2k. StepHook is called after each step with the new column.
template <class WeightFn, class StepHook = NoStepHook>
ScaledColumn sweep(const Corridor& corridor, ScaledColumn col, const WeightFn& weights,
                   StepHook&& on_step = StepHook{}) {
  SweepScratch scratch;
  std::int64_t time = 0;
  for (std::size_t s = 0; s < corridor.segments.size(); ++s) {
    for (std::int64_t t = 1; t <= corridor.segments[s].length; ++t) {
      ++time;
      if (!advance(col, next_range(col, allowed_at(corridor, s, t)), time, weights, scratch)) return col;
      on_step(time, col);
    }
  }
  return col;
}

/// Site weights exp(β(v(j,x) + u·1{x=0})).
struct QuenchedSiteWeights {
  const Environment* env;
  double beta;
  double u;

  void operator()(std::int64_t time, Height x_lo, std::span<double> out) const {
    env->fill(time, x_lo, 2, out);
    for (double& v : out) v = std::exp(beta * v);
    apply_defect(x_lo, out, std::exp(beta * u));
  }

  static void apply_defect(Height x_lo, std::span<double> out, double factor) {
    if (x_lo > 0 || (x_lo & 1) != 0) return;
    const auto idx = static_cast<std::size_t>(-x_lo / 2);
    if (idx < out.size()) out[idx] *= factor;
  }
};

/// Site weights exp(γ·1{x=0}).
struct PinningSiteWeights {
  double gamma;

  void operator()(std::int64_t, Height x_lo, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 1.0);
    QuenchedSiteWeights::apply_defect(x_lo, out, std::exp(gamma));
  }
};

}  // namespace dpre::detail
