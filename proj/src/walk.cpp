#include "dpre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpre {

Interval Interval::intersect(const Interval& other) const {
  return {std::max(lo, other.lo), std::min(hi, other.hi)};
}

Interval Interval::shifted(Height dy) const {
  Interval out = *this;
  if (lo > -kFar) out.lo = lo + dy;
  if (hi < kFar) out.hi = hi + dy;
  return out;
}

Height scaled_root(std::int64_t n, double factor) {
  if (n < 0) throw std::invalid_argument("scaled_root: negative length");
  return static_cast<Height>(std::llround(factor * std::sqrt(static_cast<double>(n))));
}

BlockScales block_scales(std::int64_t n) {
  BlockScales s;
  s.length = n;
  s.root = scaled_root(n, 1.0);
  s.window = scaled_root(n, 0.25);
  s.box = 2 * s.root;
  return s;
}

WalkPath::WalkPath(Height start, std::vector<int> steps) : start_(start), steps_(std::move(steps)) {
  for (int s : steps_) {
    if (s != 1 && s != -1) throw std::invalid_argument("WalkPath: steps must be +1 or -1");
  }
}

Height WalkPath::position(std::int64_t j) const {
  if (j < 0 || j > length()) throw std::out_of_range("WalkPath::position: time outside path");
  Height x = start_;
  for (std::int64_t k = 0; k < j; ++k) x += steps_[static_cast<std::size_t>(k)];
  return x;
}

std::vector<Height> WalkPath::positions() const {
  std::vector<Height> out;
  out.reserve(steps_.size() + 1);
  Height x = start_;
  out.push_back(x);
  for (int s : steps_) {
    x += s;
    out.push_back(x);
  }
  return out;
}

std::int64_t local_time(const WalkPath& path) {
  std::int64_t count = 0;
  Height x = path.start();
  for (int s : path.steps()) {
    x += s;
    if (x == 0) ++count;
  }
  return count;
}

std::int64_t overlap(const WalkPath& a, const WalkPath& b) {
  if (a.length() != b.length()) throw std::invalid_argument("overlap: paths differ in length");
  std::int64_t count = 0;
  Height xa = a.start();
  Height xb = b.start();
  for (std::size_t i = 0; i < a.steps().size(); ++i) {
    xa += a.steps()[i];
    xb += b.steps()[i];
    if (xa == xb) ++count;
  }
  return count;
}

PathConstraint PathConstraint::unconstrained(std::int64_t n) {
  PathConstraint c;
  c.length = n;
  return c;
}

PathConstraint PathConstraint::link(std::int64_t n, int offset) {
  if (offset < -1 || offset > 1) throw std::invalid_argument("PathConstraint::link: offset must be -1, 0 or 1");
  const BlockScales s = block_scales(n);
  PathConstraint c;
  c.length = n;
  c.start_window = Interval::centered(0, s.window);
  c.box = Interval::centered(0, s.box);
  c.end_window = Interval::centered(offset * s.root, s.window);
  return c;
}

PathConstraint PathConstraint::up(std::int64_t n) { return link(n, 1); }
PathConstraint PathConstraint::forward(std::int64_t n) { return link(n, 0); }
PathConstraint PathConstraint::down(std::int64_t n) { return link(n, -1); }

PathConstraint PathConstraint::translated(Height dy) const {
  PathConstraint c = *this;
  c.start_window = start_window.shifted(dy);
  c.box = box.shifted(dy);
  c.end_window = end_window.shifted(dy);
  if (end_point) c.end_point = *end_point + dy;
  return c;
}

Interval PathConstraint::allowed_at(std::int64_t j) const {
  Interval a = box;
  if (j == length) {
    a = a.intersect(end_window);
    if (end_point) a = a.intersect(Interval::point(*end_point));
  }
  return a;
}

bool PathConstraint::admits(const WalkPath& path) const {
  if (path.length() != length) return false;
  if (!start_window.contains(path.start())) return false;
  Height x = path.start();
  std::int64_t j = 0;
  for (int s : path.steps()) {
    x += s;
    ++j;
    if (!box.contains(x)) return false;
  }
  if (!end_window.contains(x)) return false;
  if (end_point && x != *end_point) return false;
  return true;
}

std::string to_string(WalkKind kind) {
  return kind == WalkKind::simple ? "simple" : "difference";
}

std::vector<double> hitting_time_pmf(WalkKind kind, std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("hitting_time_pmf: n_max must be >= 1");
  std::vector<double> pmf(static_cast<std::size_t>(n_max), 0.0);

  // By symmetry only the distance from 0 matters. surv[d] is the probability
  // of sitting at distance d (in units of the jump size) without having hit 0.
  const double p_move = kind == WalkKind::simple ? 0.5 : 0.25;
  const double p_stay = kind == WalkKind::simple ? 0.0 : 0.5;

  // Time 1: the simple walk always leaves 0; the difference walk returns
  // immediately with the hold probability.
  std::vector<double> surv(static_cast<std::size_t>(n_max) + 2, 0.0);
  std::vector<double> next(surv.size(), 0.0);
  surv[1] = 1.0 - p_stay;
  pmf[0] = p_stay;

  for (std::int64_t n = 2; n <= n_max; ++n) {
    const auto reach = static_cast<std::size_t>(std::min<std::int64_t>(n, n_max + 1));
    pmf[static_cast<std::size_t>(n - 1)] = p_move * surv[1];
    for (std::size_t d = 1; d <= reach; ++d) {
      // Mass arriving from distance 0 is killed, so d = 1 only receives from 2.
      const double from_below = d >= 2 ? surv[d - 1] : 0.0;
      const double from_above = d + 1 < surv.size() ? surv[d + 1] : 0.0;
      next[d] = p_stay * surv[d] + p_move * (from_below + from_above);
    }
    std::swap(surv, next);
  }
  return pmf;
}

}  // namespace dpre
