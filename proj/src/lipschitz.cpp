#include "dpre/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpre/disorder.hpp"

namespace dpre {

SiteField SiteField::independent(double p, int columns, int heights, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("SiteField: p must lie in [0, 1]");
  if (columns < 1 || heights < 1) throw std::invalid_argument("SiteField: empty domain");
  SiteField f;
  f.columns_ = columns;
  f.heights_ = heights;
  f.provenance_ = "independent";
  f.flags_.resize(static_cast<std::size_t>(columns) * static_cast<std::size_t>(heights));
  const std::uint64_t base = mix64(seed);
  for (int x = 0; x < columns; ++x) {
    for (int h = 0; h < heights; ++h) {
      const std::uint64_t key = mix64(mix64(base ^ static_cast<std::uint64_t>(x)) ^ static_cast<std::uint64_t>(h));
      const double unit = static_cast<double>(key >> 11) * 0x1.0p-53;
      f.flags_[static_cast<std::size_t>(x) * static_cast<std::size_t>(heights) + static_cast<std::size_t>(h)] =
          unit < p ? 1 : 0;
    }
  }
  return f;
}

SiteField SiteField::from_flags(const std::vector<std::vector<bool>>& open, int heights, std::string provenance) {
  if (open.empty() || heights < 1) throw std::invalid_argument("SiteField: empty domain");
  SiteField f;
  f.columns_ = static_cast<int>(open.size());
  f.heights_ = heights;
  f.provenance_ = std::move(provenance);
  f.flags_.assign(static_cast<std::size_t>(f.columns_) * static_cast<std::size_t>(heights), 0);
  for (int x = 0; x < f.columns_; ++x) {
    const auto& col = open[static_cast<std::size_t>(x)];
    for (int h = 0; h < heights && h < static_cast<int>(col.size()); ++h) {
      f.flags_[static_cast<std::size_t>(x) * static_cast<std::size_t>(heights) + static_cast<std::size_t>(h)] =
          col[static_cast<std::size_t>(h)] ? 1 : 0;
    }
  }
  return f;
}

SiteField SiteField::from_lattice(const CoarseLattice& lattice) {
  return from_flags(open_grid(lattice), lattice.horizon_j() + 1, "coarse-grain");
}

double SiteField::open_density() const {
  std::size_t c = 0;
  for (auto v : flags_) c += v;
  return static_cast<double>(c) / static_cast<double>(flags_.size());
}

SiteField SiteField::with_open(int x, int h) const {
  SiteField f = *this;
  f.flags_[static_cast<std::size_t>(x) * static_cast<std::size_t>(heights_) + static_cast<std::size_t>(h)] = 1;
  return f;
}

std::optional<LipschitzFunction> lowest_lipschitz(const SiteField& field) {
  const int cols = field.columns();
  const int cap = field.heights();
  LipschitzFunction f;
  f.heights.assign(static_cast<std::size_t>(cols), 0);
  auto& l = f.heights;
  // Raise ℒ(x) to the lowest open height compatible with its neighbours;
  // values only go up, so the first stable state is the lowest one.
  auto relax = [&](int x) -> int {
    int need = l[static_cast<std::size_t>(x)];
    if (x > 0) need = std::max(need, l[static_cast<std::size_t>(x) - 1] - 1);
    if (x + 1 < cols) need = std::max(need, l[static_cast<std::size_t>(x) + 1] - 1);
    while (need < cap && !field.open(x, need)) ++need;
    return need;
  };
  bool changed = true;
  bool forward = true;
  while (changed) {
    changed = false;
    ++f.sweeps;
    for (int k = 0; k < cols; ++k) {
      const int x = forward ? k : cols - 1 - k;
      const int h = relax(x);
      if (h >= cap) return std::nullopt;
      if (h != l[static_cast<std::size_t>(x)]) {
        l[static_cast<std::size_t>(x)] = h;
        changed = true;
      }
    }
    forward = !forward;
  }
  return f;
}

bool is_open_lipschitz(const SiteField& field, const LipschitzFunction& f) {
  if (f.size() != field.columns()) return false;
  for (int x = 0; x < f.size(); ++x) {
    const int h = f.at(x);
    if (h < 0 || h >= field.heights() || !field.open(x, h)) return false;
    if (x > 0 && std::abs(h - f.at(x - 1)) > 1) return false;
  }
  return true;
}

bool is_pointwise_minimal(const SiteField& field, const LipschitzFunction& f) {
  LipschitzFunction g = f;
  for (int x = 0; x < f.size(); ++x) {
    for (int h = 0; h < f.at(x); ++h) {
      g.heights[static_cast<std::size_t>(x)] = h;
      if (is_open_lipschitz(field, g)) return false;
    }
    g.heights[static_cast<std::size_t>(x)] = f.at(x);
  }
  return true;
}

double axis_density(const LipschitzFunction& f, int lo, int hi) {
  lo = std::max(lo, 1);
  hi = std::min(hi, f.size());
  if (hi <= lo) return 0.0;
  int c = 0;
  for (int x = lo; x < hi; ++x) c += (f.at(x - 1) == 0 && f.at(x) == 0) ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(hi - lo);
}

double axis_density(const LipschitzFunction& f) { return axis_density(f, f.size() / 4, 3 * f.size() / 4); }

std::optional<double> axis_density(double p, int columns, std::uint64_t seed, int heights) {
  const auto f = lowest_lipschitz(SiteField::independent(p, columns, heights, seed));
  if (!f) return std::nullopt;
  return axis_density(*f);
}

namespace {

struct SampleCounts {
  bool ok = false;
  std::vector<std::size_t> height_hist;
  std::vector<std::size_t> component_hist;
  double density = 0.0;
};

void add_at(std::vector<std::size_t>& hist, std::size_t k) {
  if (hist.size() <= k) hist.resize(k + 1, 0);
  ++hist[k];
}

void merge_into(std::vector<std::size_t>& into, const std::vector<std::size_t>& from) {
  if (into.size() < from.size()) into.resize(from.size(), 0);
  for (std::size_t n = 0; n < from.size(); ++n) into[n] += from[n];
}

// tail[n] = #{v > n} (strict) or #{v ≥ n}, from a histogram.
std::vector<std::size_t> tail_counts(const std::vector<std::size_t>& hist, bool strict) {
  std::vector<std::size_t> out(hist.size() + 1, 0);
  std::size_t above = 0;
  for (std::size_t n = hist.size(); n-- > 0;) {
    if (strict) {
      out[n] = above;
      above += hist[n];
    } else {
      above += hist[n];
      out[n] = above;
    }
  }
  return out;
}

TailFit make_fit(const std::vector<std::size_t>& counts, std::size_t total, std::size_t first) {
  TailFit t;
  t.counts = counts;
  for (std::size_t c : counts) t.tail.push_back(total ? static_cast<double>(c) / static_cast<double>(total) : 0.0);
  std::vector<double> xs, ys;
  for (std::size_t n = first; n < counts.size() && counts[n] >= 20; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(t.tail[n]));
  }
  if (xs.size() >= 2) {
    t.fit = fit_line(xs, ys);
    t.decreasing = true;
    for (std::size_t k = 1; k < ys.size(); ++k) t.decreasing = t.decreasing && ys[k] < ys[k - 1];
  }
  return t;
}

}  // namespace

TailReport tail_statistics(double p, int columns, std::size_t samples, std::uint64_t seed, int heights,
                           unsigned threads) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("tail_statistics: p must lie in (0, 1]");
  if (columns < 4) throw std::invalid_argument("tail_statistics: need at least 4 columns");
  TailReport r;
  r.p = p;
  r.columns = columns;
  r.heights = heights;
  r.samples = samples;
  const int lo = columns / 4;
  const int hi = 3 * columns / 4;
  auto per_sample = parallel_map<SampleCounts>(samples, threads, [&](std::size_t k) {
    SampleCounts s;
    const auto f = lowest_lipschitz(SiteField::independent(p, columns, heights, child_seed(seed, k)));
    if (!f) return s;
    s.ok = true;
    s.density = axis_density(*f, lo, hi);
    for (int x = lo; x < hi; ++x) {
      add_at(s.height_hist, static_cast<std::size_t>(f->at(x)));
      std::size_t size = 0;
      if (f->at(x) > 0) {
        int a = x, b = x;
        while (a > 0 && f->at(a - 1) > 0) --a;
        while (b + 1 < f->size() && f->at(b + 1) > 0) ++b;
        size = static_cast<std::size_t>(b - a + 1);
      }
      add_at(s.component_hist, size);
    }
    return s;
  });
  std::vector<std::size_t> heights_hist, comp_hist;
  double density_sum = 0.0;
  for (const auto& s : per_sample) {
    if (!s.ok) {
      ++r.failures;
      continue;
    }
    density_sum += s.density;
    merge_into(heights_hist, s.height_hist);
    merge_into(comp_hist, s.component_hist);
  }
  const std::size_t good = samples - r.failures;
  r.observations = good * static_cast<std::size_t>(hi - lo);
  r.axis_density = good ? density_sum / static_cast<double>(good) : 0.0;
  r.height = make_fit(tail_counts(heights_hist, true), r.observations, 0);
  r.component = make_fit(tail_counts(comp_hist, false), r.observations, 1);
  if (r.height.fit) r.alpha_hat = -r.height.fit->slope;
  if (r.component.fit) {
    r.gamma_hat = std::numeric_limits<double>::infinity();
    r.lambda_hat = 0.0;
    for (std::size_t n = 1; n < r.component.counts.size() && r.component.counts[n] >= 20; ++n) {
      const double rate = -std::log(r.component.tail[n]) / static_cast<double>(n);
      r.gamma_hat = std::min(r.gamma_hat, rate);
      r.lambda_hat = std::max(r.lambda_hat, rate);
    }
  }
  return r;
}

double lss_threshold(int k) {
  if (k < 1) throw std::invalid_argument("lss_threshold: k must be >= 1");
  const double kk = k;
  return 1.0 - std::exp(kk * std::log(kk) - (kk + 1.0) * std::log(kk + 1.0));
}

}  // namespace dpre
