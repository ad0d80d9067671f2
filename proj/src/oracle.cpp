#include "dpre/oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace dpre::oracle {

namespace {

void require_single(std::int64_t n) {
  if (n < 0 || n > kMaxSingleLength) {
    throw std::invalid_argument("brute-force oracle: N = " + std::to_string(n) + " exceeds " +
                                std::to_string(kMaxSingleLength));
  }
}

void require_pair(std::int64_t n) {
  if (n < 0 || n > kMaxPairLength) {
    throw std::invalid_argument("brute-force pair oracle: N = " + std::to_string(n) + " exceeds " +
                                std::to_string(kMaxPairLength));
  }
}

// All admissible paths from every start height with positive mass, with
// their start probabilities.
struct WeightedPath {
  WalkPath path;
  double prob;
};

std::vector<WeightedPath> admissible_paths(const PathConstraint& constraint, const StartMeasure& start) {
  std::vector<WeightedPath> out;
  for (Height x = start.x_min(); x <= start.x_max(); ++x) {
    const double p = start.at(x);
    if (p <= 0.0) continue;
    if (!constraint.start_window.contains(x)) throw std::invalid_argument("start measure outside start window");
    for_each_path(x, constraint.length, [&](const WalkPath& path) {
      if (constraint.admits(path)) out.push_back({path, p});
    });
  }
  return out;
}

double quenched_energy(const Environment& env, PolymerParams params, const WalkPath& path) {
  double h = 0.0;
  const auto pos = path.positions();
  for (std::size_t j = 1; j < pos.size(); ++j) h += env.value(static_cast<std::int64_t>(j), pos[j]);
  return params.beta * (h + params.u * static_cast<double>(local_time(path)));
}

}  // namespace

void for_each_path(Height start, std::int64_t n, const std::function<void(const WalkPath&)>& visit) {
  require_single(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<int> steps(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::int64_t j = 0; j < n; ++j) steps[static_cast<std::size_t>(j)] = ((mask >> j) & 1U) != 0 ? 1 : -1;
    visit(WalkPath(start, steps));
  }
}

double quenched_log_partition(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                              const StartMeasure& start) {
  LogSumAccumulator acc;
  const double log_step = -static_cast<double>(constraint.length) * std::log(2.0);
  for (const auto& wp : admissible_paths(constraint, start)) {
    acc.add(std::log(wp.prob) + log_step + quenched_energy(env, params, wp.path));
  }
  return acc.value();
}

LogColumn quenched_endpoint_column(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                                   const StartMeasure& start) {
  std::map<Height, LogSumAccumulator> by_end;
  const double log_step = -static_cast<double>(constraint.length) * std::log(2.0);
  for (const auto& wp : admissible_paths(constraint, start)) {
    by_end[wp.path.position(wp.path.length())].add(std::log(wp.prob) + log_step +
                                                     quenched_energy(env, params, wp.path));
  }
  LogColumn col;
  col.time = constraint.length;
  if (by_end.empty()) return col;
  col.x_min = by_end.begin()->first;
  col.log_weights.assign(static_cast<std::size_t>(by_end.rbegin()->first - col.x_min + 1), kNegInf);
  for (const auto& [x, acc] : by_end) col.log_weights[static_cast<std::size_t>(x - col.x_min)] = acc.value();
  return col;
}

double annealed_log_mgf(double gamma, const PathConstraint& constraint, const StartMeasure& start) {
  LogSumAccumulator acc;
  const double log_step = -static_cast<double>(constraint.length) * std::log(2.0);
  for (const auto& wp : admissible_paths(constraint, start)) {
    acc.add(std::log(wp.prob) + log_step + gamma * static_cast<double>(local_time(wp.path)));
  }
  return acc.value();
}

double pair_overlap_log_mgf(double gamma, std::int64_t n, Height x1, Height x2) {
  require_pair(n);
  std::vector<WalkPath> first;
  std::vector<WalkPath> second;
  for_each_path(x1, n, [&](const WalkPath& p) { first.push_back(p); });
  for_each_path(x2, n, [&](const WalkPath& p) { second.push_back(p); });
  LogSumAccumulator acc;
  const double log_step = -2.0 * static_cast<double>(n) * std::log(2.0);
  for (const auto& a : first) {
    for (const auto& b : second) acc.add(log_step + gamma * static_cast<double>(overlap(a, b)));
  }
  return acc.value();
}

SecondMoment pair_constrained_second_moment(const DisorderSpec& spec, PolymerParams params,
                                            const PathConstraint& constraint, const StartMeasure& start) {
  require_pair(constraint.length);
  const auto paths = admissible_paths(constraint, start);
  const double lambda1 = cumulant(spec, params.beta);
  const double lambda2 = cumulant(spec, 2.0 * params.beta);
  const double gamma = params.beta * params.u;
  const double n = static_cast<double>(constraint.length);
  const double log_step = -n * std::log(2.0);

  SecondMoment out;
  LogSumAccumulator mean;
  for (const auto& wp : paths) {
    mean.add(std::log(wp.prob) + log_step + gamma * static_cast<double>(local_time(wp.path)) + lambda1 * n);
  }
  out.log_mean = mean.value();

  LogSumAccumulator second;
  for (const auto& a : paths) {
    const auto pa = a.path.positions();
    for (const auto& b : paths) {
      const auto pb = b.path.positions();
      double log_moment = 0.0;
      for (std::size_t j = 1; j < pa.size(); ++j) log_moment += pa[j] == pb[j] ? lambda2 : 2.0 * lambda1;
      const double pin = gamma * static_cast<double>(local_time(a.path) + local_time(b.path));
      second.add(std::log(a.prob) + std::log(b.prob) + 2.0 * log_step + pin + log_moment);
    }
  }
  out.log_second = second.value();
  return out;
}

}  // namespace dpre::oracle
