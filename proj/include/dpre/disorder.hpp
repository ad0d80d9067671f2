#pragma once

// Reproducible i.i.d. disorder fields v(i, x) with closed-form cumulant
// generating functions.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

#include "dpre/walk.hpp"

namespace dpre {

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replica `index` under `master`: mix64(mix64(master) ^ mix64(~index)).
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(~index));
}

/// splitmix64 as a UniformRandomBitGenerator, for feeding boost distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

enum class DisorderFamily { gaussian, rademacher, uniform };

/// Disorder law; every family has mean 0, variance 1 and a closed-form Λ.
struct DisorderSpec {
  DisorderFamily family = DisorderFamily::gaussian;

  std::string name() const;
  /// Accepts "gaussian", "rademacher", "uniform".
  static DisorderSpec parse(std::string_view name);

  /// One draw keyed on a 64-bit counter.
  double sample(std::uint64_t key) const {
    switch (family) {
      case DisorderFamily::rademacher:
        return (mix64(key) >> 63) != 0 ? 1.0 : -1.0;
      case DisorderFamily::uniform: {
        const double unit = static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
        return std::sqrt(3.0) * (2.0 * unit - 1.0);
      }
      case DisorderFamily::gaussian:
      default: {
        SplitMix64 engine(key);
        boost::random::normal_distribution<double> normal;
        return normal(engine);
      }
    }
  }

  friend bool operator==(const DisorderSpec&, const DisorderSpec&) = default;
};

/// Λ(β) = log E e^{βv}.
double cumulant(const DisorderSpec& spec, double beta);
/// Φ(β) = Λ(2β) − 2Λ(β), the coupling of the pair overlap.
double overlap_coupling(const DisorderSpec& spec, double beta);

/// Rectangle of absolute space-time sites (times and heights inclusive).
struct SiteRegion {
  Interval times;
  Interval heights;
  bool contains(std::int64_t i, Height x) const { return times.contains(i) && heights.contains(x); }
};

/// A disorder realisation v(i, x), i ≥ 1, computed on demand from (seed, i, x).
/// Values depend only on the absolute site, so shifted views satisfy
/// shifted(n, y).value(k, x) == value(k + n, x + y) bit for bit.
class Environment {
 public:
  Environment() = default;
  Environment(DisorderSpec spec, std::uint64_t seed) : spec_(spec), seed_(seed) {}

  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t origin_time() const { return origin_time_; }
  Height origin_height() const { return origin_height_; }

  /// θ_{n,y}: a view with the origin moved by (n, y).
  Environment shifted(std::int64_t dn, Height dy) const {
    Environment e = *this;
    e.origin_time_ += dn;
    e.origin_height_ += dy;
    return e;
  }

  /// A copy whose values inside `region` (absolute coordinates) are redrawn
  /// from `patch_seed`. Used for locality experiments.
  Environment with_resampled(SiteRegion region, std::uint64_t patch_seed) const {
    Environment e = *this;
    e.patch_ = Patch{region, patch_seed};
    return e;
  }

  double value(std::int64_t i, Height x) const {
    const std::int64_t ai = i + origin_time_;
    const Height ax = x + origin_height_;
    std::uint64_t seed = seed_;
    if (patch_ && patch_->region.contains(ai, ax)) seed = patch_->seed;
    return spec_.sample(site_key(seed, ai, ax));
  }

  /// out[k] = value(i, x_lo + stride·k).
  void fill(std::int64_t i, Height x_lo, Height stride, std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = value(i, x_lo + stride * static_cast<Height>(k));
    }
  }

 private:
  static std::uint64_t site_key(std::uint64_t seed, std::int64_t i, Height x) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(i));
    return mix64(h ^ static_cast<std::uint64_t>(x) * 0xD1B54A32D192ED03ULL);
  }

  struct Patch {
    SiteRegion region;
    std::uint64_t seed;
  };

  DisorderSpec spec_{};
  std::uint64_t seed_ = 0;
  std::int64_t origin_time_ = 0;
  Height origin_height_ = 0;
  std::optional<Patch> patch_;
};

}  // namespace dpre
