#pragma once

// Log-domain transfer-matrix engines for quenched and annealed partition
// functions over restricted path sets.
//
// Conventions: a path starts at time 0 from a StartMeasure and makes N steps;
// the potential is collected at times 1..N. Quenched weights are
//   exp(β Σ_{j=1}^N (v(j, S_j) + u·1{S_j = 0})),
// annealed weights exp(γ L_N). Results are natural logs; an empty admissible
// set yields -inf.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpre/disorder.hpp"
#include "dpre/log_math.hpp"
#include "dpre/walk.hpp"

namespace dpre {

struct PolymerParams {
  double beta = 0.0;
  double u = 0.0;
};

/// Probability measure on a finite set of heights (stride 1).
class StartMeasure {
 public:
  StartMeasure() = default;

  static StartMeasure delta(Height x);
  /// Normalises nonnegative weights on heights x_min, x_min+1, ...
  static StartMeasure from_weights(Height x_min, std::vector<double> weights);

  Height x_min() const { return x_min_; }
  Height x_max() const { return x_min_ + static_cast<Height>(probs_.size()) - 1; }
  const std::vector<double>& probabilities() const { return probs_; }
  double at(Height x) const;
  /// Smallest interval holding all positive mass.
  Interval support() const;
  StartMeasure shifted(Height dy) const;

 private:
  Height x_min_ = 0;
  std::vector<double> probs_{1.0};
};

/// Endpoint-resolved log weights at one time slice (stride 1, -inf where
/// a height is excluded or has the wrong parity).
struct LogColumn {
  std::int64_t time = 0;
  Height x_min = 0;
  std::vector<double> log_weights;

  Height x_max() const { return x_min + static_cast<Height>(log_weights.size()) - 1; }
  double log_at(Height x) const;
  double log_total() const;
  bool empty() const;
  /// The endpoint distribution; requires a nonempty column.
  StartMeasure normalized() const;
};

/// A path set built from consecutive segments, each with its own running box
/// and exit window. Used for coarse-grained corridors.
struct CorridorSegment {
  std::int64_t length = 0;
  Interval box = Interval::unbounded();
  Interval end_window = Interval::unbounded();
};

struct Corridor {
  Interval start_window = Interval::unbounded();
  std::vector<CorridorSegment> segments;
  std::optional<Height> end_point;

  static Corridor from(const PathConstraint& constraint);
  std::int64_t total_length() const;
};

// ---- quenched ---------------------------------------------------------------

double quenched_log_partition(const Environment& env, PolymerParams params,
                              const PathConstraint& constraint, const StartMeasure& start);
LogColumn quenched_endpoint_column(const Environment& env, PolymerParams params,
                                   const PathConstraint& constraint, const StartMeasure& start);
/// quenched_log_partition for several parameter sets on one environment.
/// Each disorder value is drawn once per site and shared by all sweeps;
/// results equal the one-at-a-time engine bit for bit.
std::vector<double> quenched_log_partitions(const Environment& env, std::span<const PolymerParams> params,
                                            const PathConstraint& constraint, const StartMeasure& start);
double corridor_log_partition(const Environment& env, PolymerParams params, const Corridor& corridor,
                              const StartMeasure& start);
LogColumn corridor_endpoint_column(const Environment& env, PolymerParams params, const Corridor& corridor,
                                   const StartMeasure& start);

// ---- annealed / homogeneous pinning ------------------------------------------

/// log E_start[e^{γ L_N} 1_admissible].
double annealed_log_mgf(double gamma, const PathConstraint& constraint, const StartMeasure& start);
LogColumn annealed_endpoint_column(double gamma, const PathConstraint& constraint, const StartMeasure& start);
/// log E_x[e^{γ L_n}] for n = 0..n_max, unconstrained, in a single sweep.
std::vector<double> annealed_log_mgf_trajectory(double gamma, std::int64_t n_max, Height start = 0);

// ---- pairs ------------------------------------------------------------------

/// log E^{⊗2}_{(x1,x2)} e^{γ B_N}. Starts of unequal parity never meet, so
/// the result is exactly 0 for them.
double pair_overlap_log_mgf(double gamma, std::int64_t n, Height x1, Height x2);
/// log E^{⊗2}_{(0,0)} e^{γ B_n} for n = 0..n_max.
std::vector<double> pair_overlap_log_mgf_trajectory(double gamma, std::int64_t n_max);

/// Disorder moments of a restricted quenched partition function.
struct SecondMoment {
  double log_mean = kNegInf;    // log E^Q Z
  double log_second = kNegInf;  // log E^Q Z²
  /// Var(Z)/(E Z)².
  double variance_ratio() const;
};

/// E^Q Z via the annealed engine, E^Q Z² via a two-walk sweep with per-step
/// weight e^{βu(1{x¹=0}+1{x²=0})} e^{Φ(β)1{x¹=x²}} e^{2Λ(β)}.
SecondMoment pair_constrained_second_moment(const DisorderSpec& spec, PolymerParams params,
                                            const PathConstraint& constraint, const StartMeasure& start);

// ---- homogeneous polymer kernel ---------------------------------------------

/// Table of log W(n, x) = log E_x[e^{γ L_n}] for 0 ≤ n ≤ N, |x| ≤ N + 1,
/// filled by backward recursion. Build once per (γ, N) and reuse.
class PinningWeights {
 public:
  PinningWeights(double gamma, std::int64_t n);

  double gamma() const { return gamma_; }
  std::int64_t length() const { return n_; }
  /// log W(m, x); heights beyond the table never reach 0 within m steps.
  double log_w(std::int64_t m, Height x) const;

 private:
  double gamma_;
  std::int64_t n_;
  Height half_width_;
  std::vector<double> table_;  // row m holds heights −half_width..half_width
};

struct KernelRow {
  double prob_up = 0.5;
  double prob_down = 0.5;
};

/// Transition probabilities of the homogeneous polymer chain from height z at
/// time k: π(z, y) = e^{γ1{y=0}}/2 · W(N−k−1, y) / W(N−k, z).
KernelRow polymer_kernel(const PinningWeights& weights, std::int64_t k, Height z);
KernelRow polymer_kernel(double gamma, std::int64_t n, std::int64_t k, Height z);

}  // namespace dpre
