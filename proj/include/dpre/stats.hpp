#pragma once

// Sample summaries, least-squares fits and an ordered parallel map.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace dpre {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample stdev / √count
  double variance = 0.0;   // unbiased sample variance
  std::size_t count = 0;
  std::uint64_t seed_digest = 0;  // hash of the per-sample seeds, in order
};

McEstimate summarize(std::span<const double> values, std::span<const std::uint64_t> seeds = {});

/// Order-dependent digest of a seed list.
std::uint64_t digest_seeds(std::span<const std::uint64_t> seeds);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  double slope_lo = 0.0;  // two-sided t interval at `level`
  double slope_hi = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = a + b x; needs at least 3 points for an interval.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, double level = 0.95);

struct ProportionInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at normal quantile z.
ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

/// out[k] = fn(k) for k = 0..count-1 on up to `threads` workers. Results do
/// not depend on the thread count; the first exception is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<T> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        out[k] = fn(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace dpre
