#pragma once

// Lipschitz percolation on a strip of columns x ∈ [0, X) and heights
// h ∈ [0, H): the lowest open Lipschitz function, its height and excursion
// tails, and on-axis density.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpre/coarse_grain.hpp"
#include "dpre/stats.hpp"

namespace dpre {

inline constexpr int kDefaultHeightCap = 64;

class SiteField {
 public:
  /// Each site open independently with probability p, from (seed, x, h).
  static SiteField independent(double p, int columns, int heights, std::uint64_t seed);
  /// open[x][h]; columns may be ragged, missing heights count as closed.
  static SiteField from_flags(const std::vector<std::vector<bool>>& open, int heights, std::string provenance);
  /// The X-field of a classified coarse lattice: x = I, h = J.
  static SiteField from_lattice(const CoarseLattice& lattice);

  int columns() const { return columns_; }
  int heights() const { return heights_; }
  bool open(int x, int h) const { return flags_[static_cast<std::size_t>(x) * static_cast<std::size_t>(heights_) + static_cast<std::size_t>(h)] != 0; }
  const std::string& provenance() const { return provenance_; }
  double open_density() const;
  /// A copy with one more open site.
  SiteField with_open(int x, int h) const;

 private:
  int columns_ = 0;
  int heights_ = 0;
  std::vector<std::uint8_t> flags_;
  std::string provenance_;
};

struct LipschitzFunction {
  std::vector<int> heights;
  int sweeps = 0;  // passes until the fixed point was reached

  int at(int x) const { return heights[static_cast<std::size_t>(x)]; }
  int size() const { return static_cast<int>(heights.size()); }
};

/// Pointwise-lowest open Lipschitz function on the strip. Columns outside
/// [0, X) are fully open, so they never push values up. Absent when some
/// column has no admissible open site below the height cap.
std::optional<LipschitzFunction> lowest_lipschitz(const SiteField& field);

/// Lipschitz, open, and no single value can be lowered.
bool is_open_lipschitz(const SiteField& field, const LipschitzFunction& f);
bool is_pointwise_minimal(const SiteField& field, const LipschitzFunction& f);

/// Fraction of x in [lo, hi) with ℒ(x−1) = ℒ(x) = 0 (x−1 ≥ 0).
double axis_density(const LipschitzFunction& f, int lo, int hi);
/// Over the middle half of the strip.
double axis_density(const LipschitzFunction& f);
/// For one independent field; nullopt on percolation failure.
std::optional<double> axis_density(double p, int columns, std::uint64_t seed, int heights = kDefaultHeightCap);

struct TailFit {
  std::vector<double> tail;  // tail[n] = empirical P(· > n) or P(· ≥ n), see below
  std::vector<std::size_t> counts;
  std::optional<LinearFit> fit;  // of log tail over n with ≥ 20 observations
  bool decreasing = false;       // strictly decreasing on the fitted range
};

struct TailReport {
  double p = 0.0;
  int columns = 0;
  int heights = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;  // samples without an open Lipschitz function
  std::size_t observations = 0;
  TailFit height;     // tail[n] = P(ℒ(x) > n)
  TailFit component;  // tail[n] = P(|D_x| ≥ n), D_x the run of {ℒ > 0} containing x
  double alpha_hat = 0.0;   // −slope of the height fit
  double gamma_hat = 0.0;   // min over the component fit range of −log P/n
  double lambda_hat = 0.0;  // max over the same range
  double axis_density = 0.0;  // mean over successful samples
};

/// Pools every column of the middle half of each sample.
TailReport tail_statistics(double p, int columns, std::size_t samples, std::uint64_t seed,
                           int heights = kDefaultHeightCap, unsigned threads = 1);

/// 1 − k^k/(k+1)^{k+1}.
double lss_threshold(int k);

}  // namespace dpre
