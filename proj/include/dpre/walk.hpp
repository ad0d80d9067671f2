#pragma once

// Simple-random-walk primitives: paths, local time, overlap, admissible
// path sets and first-return distributions.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpre {

using Height = std::int64_t;

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct Interval {
  static constexpr Height kFar = Height{1} << 60;

  Height lo = -kFar;
  Height hi = kFar;

  static constexpr Interval unbounded() { return {}; }
  static constexpr Interval point(Height x) { return {x, x}; }
  static constexpr Interval centered(Height center, Height half_width) {
    return {center - half_width, center + half_width};
  }

  constexpr bool empty() const { return lo > hi; }
  constexpr bool contains(Height x) const { return lo <= x && x <= hi; }
  constexpr bool bounded() const { return lo > -kFar && hi < kFar; }
  constexpr Height size() const { return empty() ? 0 : hi - lo + 1; }
  Interval intersect(const Interval& other) const;
  /// Translation; unbounded ends stay unbounded.
  Interval shifted(Height dy) const;

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Integer block dimensions derived from a block length N. Every √N-based
/// quantity in the library goes through this helper so that windows, boxes
/// and thresholds share one rounding rule (round half away from zero).
struct BlockScales {
  std::int64_t length = 0;
  Height root = 0;    // round(√N)
  Height window = 0;  // round(√N / 4), half-width of entry/exit windows
  Height box = 0;     // 2·root, half-height of the running box
};

/// round(factor · √n); the single rounding helper.
Height scaled_root(std::int64_t n, double factor);
BlockScales block_scales(std::int64_t n);

/// A lattice path stored as its start height and ±1 steps.
class WalkPath {
 public:
  WalkPath() = default;
  WalkPath(Height start, std::vector<int> steps);

  Height start() const { return start_; }
  std::int64_t length() const { return static_cast<std::int64_t>(steps_.size()); }
  std::span<const int> steps() const { return steps_; }
  Height position(std::int64_t j) const;
  /// Positions at times 0..N.
  std::vector<Height> positions() const;

 private:
  Height start_ = 0;
  std::vector<int> steps_;
};

/// Number of j in 1..N with position(j) = 0.
std::int64_t local_time(const WalkPath& path);
/// Number of i in 1..N where the two paths sit at the same height.
std::int64_t overlap(const WalkPath& a, const WalkPath& b);

/// Declarative admissible path set: start window, running box on times 1..N,
/// end window and optional exact endpoint.
struct PathConstraint {
  std::int64_t length = 0;
  Interval start_window = Interval::unbounded();
  Interval box = Interval::unbounded();
  Interval end_window = Interval::unbounded();
  std::optional<Height> end_point;

  static PathConstraint unconstrained(std::int64_t n);
  /// Paths from the window around 0 that stay in the 2√N box and end in the
  /// window around +√N, 0 or −√N respectively.
  static PathConstraint up(std::int64_t n);
  static PathConstraint forward(std::int64_t n);
  static PathConstraint down(std::int64_t n);
  /// Link set by vertical offset in blocks: -1 down, 0 forward, +1 up.
  static PathConstraint link(std::int64_t n, int offset);

  /// Every height interval translated by dy.
  PathConstraint translated(Height dy) const;
  /// Allowed heights at time j (1 ≤ j ≤ N), end constraints included at j = N.
  Interval allowed_at(std::int64_t j) const;
  bool admits(const WalkPath& path) const;
};

enum class WalkKind {
  simple,      // ±1 with probability 1/2 each
  difference,  // S¹ − S²: steps −2, 0, +2 with probabilities 1/4, 1/2, 1/4
};

std::string to_string(WalkKind kind);

/// P(τ_0 = n) for n = 1..n_max (entry n-1), where τ_0 is the first return to
/// 0 of a walk started at 0. Exact forward recursion on the killed half-line.
std::vector<double> hitting_time_pmf(WalkKind kind, std::int64_t n_max);

}  // namespace dpre
