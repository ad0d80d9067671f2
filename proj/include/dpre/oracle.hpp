#pragma once

// Brute-force enumeration over all step sequences. Exponential cost; used only
// as an independent reference for the transfer-matrix engines.

#include <cstdint>
#include <functional>

#include "dpre/disorder.hpp"
#include "dpre/partition.hpp"
#include "dpre/walk.hpp"

namespace dpre::oracle {

inline constexpr std::int64_t kMaxSingleLength = 16;
inline constexpr std::int64_t kMaxPairLength = 10;

/// Calls visit(path) for every ±1 sequence of length n from `start`.
/// Throws std::invalid_argument when n > kMaxSingleLength.
void for_each_path(Height start, std::int64_t n, const std::function<void(const WalkPath&)>& visit);

double quenched_log_partition(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                              const StartMeasure& start);
LogColumn quenched_endpoint_column(const Environment& env, PolymerParams params, const PathConstraint& constraint,
                                   const StartMeasure& start);
double annealed_log_mgf(double gamma, const PathConstraint& constraint, const StartMeasure& start);

/// Enumerates all pairs of paths (n ≤ kMaxPairLength).
double pair_overlap_log_mgf(double gamma, std::int64_t n, Height x1, Height x2);
/// E^Q Z and E^Q Z² summed over admissible path pairs, using the exact
/// per-site moments E e^{βv} = e^{Λ(β)} and E e^{2βv} = e^{Λ(2β)}.
SecondMoment pair_constrained_second_moment(const DisorderSpec& spec, PolymerParams params,
                                            const PathConstraint& constraint, const StartMeasure& start);

}  // namespace dpre::oracle
