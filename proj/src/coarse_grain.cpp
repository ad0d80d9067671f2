#include "dpre/coarse_grain.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace dpre {

namespace {

std::int64_t nearest_even(double x) {
  const auto n = static_cast<std::int64_t>(std::llround(x / 2.0)) * 2;
  return std::max<std::int64_t>(n, 4);
}

void check_memory(std::int64_t n, std::size_t cap) {
  const std::size_t need = block_memory_bytes(n);
  if (need > cap) throw MemoryCapExceeded(n, need, cap);
}

void set_horizon(CoarseGeometry& g, const GeometryOptions& opts) {
  if (opts.horizon_i < 1) throw std::invalid_argument("horizon_i must be >= 1");
  g.horizon_i = opts.horizon_i;
  g.horizon_j = opts.horizon_j.value_or(opts.horizon_i);
  if (g.horizon_j < 0) throw std::invalid_argument("horizon_j must be >= 0");
}

}  // namespace

std::size_t block_memory_bytes(std::int64_t n) {
  const auto side = static_cast<std::size_t>(2 * block_scales(n).box + 1);
  return 2 * sizeof(double) * side * side;
}

Interval CoarseGeometry::window(int j) const { return Interval::centered(j * scales.root, scales.window); }

Interval CoarseGeometry::box(int j) const { return Interval::centered(j * scales.root, scales.box); }

PathConstraint CoarseGeometry::link(int j, int offset) const {
  return PathConstraint::link(n, offset).translated(j * scales.root);
}

int default_k0(double theta_off, double eps, double* k9_hat) {
  if (!(theta_off > 0.0) || !(eps > 0.0)) throw std::invalid_argument("default_k0: need Θ_off > 0 and ε > 0");
  const double k9 = eps * -std::log(theta_off);
  if (k9_hat) *k9_hat = k9;
  return static_cast<int>(std::floor(k9 / (eps * eps) + 1.0));
}

CoarseGeometry build_geometry(double beta, double u, double eps, const DisorderSpec& spec,
                              const GeometryOptions& opts) {
  const double gamma = beta * u;
  if (!(gamma > 0.0)) throw std::invalid_argument("build_geometry: βu must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_geometry: ε must lie in (0, 1)");
  CoarseGeometry g;
  g.spec = spec;
  g.params = {beta, u};
  g.eps = eps;
  g.lambda = cumulant(spec, beta);
  g.free_energy = certified_free_energy(gamma);
  g.correlation_length = 1.0 / g.free_energy;

  const std::int64_t n1 = nearest_even(g.correlation_length);
  check_memory(n1, opts.mem_cap_bytes);
  const PinningConstants c1 = pinning_constants(gamma, eps, n1);
  g.k0 = default_k0(c1.theta_off, eps, &g.k9_hat);
  if (opts.k0) {
    if (*opts.k0 < 1) throw std::invalid_argument("build_geometry: k0 must be >= 1");
    g.k0 = *opts.k0;
  }
  g.n = nearest_even(g.k0 * g.correlation_length);
  check_memory(g.n, opts.mem_cap_bytes);
  g.scales = block_scales(g.n);
  set_horizon(g, opts);
  g.constants = g.n == n1 ? c1 : pinning_constants(gamma, eps, g.n);
  g.theta_on = g.constants.theta_on;
  g.theta_off = g.constants.theta_off;
  const auto nn = static_cast<double>(g.n);
  g.log_u_on = std::log(g.theta_on) + (g.lambda + (1.0 - eps) * g.free_energy) * nn;
  g.log_u_off = std::log(g.theta_off) + g.lambda * nn;
  return g;
}

CoarseGeometry build_gap_geometry(double beta, double eps, const DisorderSpec& spec, double k5_hat,
                                  const GeometryOptions& opts) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_gap_geometry: β must be > 0");
  if (!(k5_hat > 0.0)) throw std::invalid_argument("build_gap_geometry: K5 must be > 0");
  CoarseGeometry g;
  g.spec = spec;
  g.params = {beta, 0.0};
  g.eps = eps;
  g.lambda = cumulant(spec, beta);
  g.single_threshold = true;
  g.n = nearest_even(k5_hat / std::pow(beta, 4));
  check_memory(g.n, opts.mem_cap_bytes);
  g.scales = block_scales(g.n);
  set_horizon(g, opts);
  g.constants = pinning_constants(0.0, eps, g.n);
  g.theta_on = g.theta_off = 0.25 * g.constants.links.min();
  g.log_u_on = g.log_u_off = std::log(g.theta_off) + g.lambda * static_cast<double>(g.n);
  return g;
}

CoarseLattice::CoarseLattice(CoarseGeometry geom) : geom_(std::move(geom)) {
  columns_.resize(static_cast<std::size_t>(geom_.horizon_i) + 1);
  for (int i = 0; i <= geom_.horizon_i; ++i) {
    auto& col = columns_[static_cast<std::size_t>(i)];
    col.resize(static_cast<std::size_t>(column_height(i)) + 1);
    for (int j = 0; j <= column_height(i); ++j) {
      col[static_cast<std::size_t>(j)].i = i;
      col[static_cast<std::size_t>(j)].j = j;
    }
  }
}

const CoarseSite& CoarseLattice::at(int i, int j) const {
  if (!contains(i, j)) throw std::out_of_range("CoarseLattice: site outside the lattice");
  return columns_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

CoarseSite& CoarseLattice::at(int i, int j) {
  if (!contains(i, j)) throw std::out_of_range("CoarseLattice: site outside the lattice");
  return columns_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

std::size_t CoarseLattice::open_count() const {
  std::size_t c = 0;
  for (const auto& col : columns_)
    for (const auto& s : col) c += s.open ? 1 : 0;
  return c;
}

std::size_t CoarseLattice::site_count() const {
  std::size_t c = 0;
  for (const auto& col : columns_) c += col.size();
  return c;
}

OpenGrid open_grid(const CoarseLattice& lattice) {
  OpenGrid g(static_cast<std::size_t>(lattice.horizon_i()) + 1);
  for (int i = 0; i <= lattice.horizon_i(); ++i) {
    for (int j = 0; j <= lattice.column_height(i); ++j) g[static_cast<std::size_t>(i)].push_back(lattice.at(i, j).open);
  }
  return g;
}

std::vector<int> optimal_path(const OpenGrid& grid, int target_i, int target_j) {
  if (target_i < 0 || static_cast<std::size_t>(target_i) >= grid.size() || target_j < 0 ||
      static_cast<std::size_t>(target_j) >= grid[static_cast<std::size_t>(target_i)].size() || target_j > target_i) {
    throw std::out_of_range("optimal_path: target outside the lattice");
  }
  auto height = [&](int i) { return static_cast<int>(grid[static_cast<std::size_t>(i)].size()); };
  auto open = [&](int i, int j) { return grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ? 1 : 0; };
  // best[i][j]: most open sites on a path (i, j) → target, both ends counted; −1 if none.
  std::vector<std::vector<int>> best(static_cast<std::size_t>(target_i) + 1);
  for (int i = target_i; i >= 0; --i) {
    auto& row = best[static_cast<std::size_t>(i)];
    row.assign(static_cast<std::size_t>(height(i)), -1);
    for (int j = 0; j < height(i); ++j) {
      if (i == target_i) {
        if (j == target_j) row[static_cast<std::size_t>(j)] = open(i, j);
        continue;
      }
      int b = -1;
      const auto& next = best[static_cast<std::size_t>(i) + 1];
      for (int d = -1; d <= 1; ++d) {
        const int k = j + d;
        if (k >= 0 && k < static_cast<int>(next.size())) b = std::max(b, next[static_cast<std::size_t>(k)]);
      }
      if (b >= 0) row[static_cast<std::size_t>(j)] = b + open(i, j);
    }
  }
  std::vector<int> path{0};
  for (int i = 0; i < target_i; ++i) {
    const int j = path.back();
    const int want = best[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - open(i, j);
    const auto& next = best[static_cast<std::size_t>(i) + 1];
    for (int k = std::max(0, j - 1); k <= j + 1 && k < static_cast<int>(next.size()); ++k) {
      if (next[static_cast<std::size_t>(k)] == want) {
        path.push_back(k);
        break;
      }
    }
  }
  return path;
}

std::vector<int> optimal_path(const CoarseLattice& lattice, int target_i, int target_j) {
  return optimal_path(open_grid(lattice), target_i, target_j);
}

std::optional<std::vector<int>> good_path(const OpenGrid& grid) {
  if (grid.empty() || grid[0].empty()) return std::nullopt;
  const int last = static_cast<int>(grid.size()) - 1;
  // alive[i][j]: (i, j) is open and starts an open path to the last column.
  std::vector<std::vector<bool>> alive(grid.size());
  for (int i = last; i >= 0; --i) {
    const auto& row = grid[static_cast<std::size_t>(i)];
    auto& a = alive[static_cast<std::size_t>(i)];
    a.assign(row.size(), false);
    for (int j = 0; j < static_cast<int>(row.size()); ++j) {
      if (!row[static_cast<std::size_t>(j)]) continue;
      if (i == last) {
        a[static_cast<std::size_t>(j)] = true;
        continue;
      }
      const auto& next = alive[static_cast<std::size_t>(i) + 1];
      for (int k = std::max(0, j - 1); k <= j + 1 && k < static_cast<int>(next.size()); ++k) {
        if (next[static_cast<std::size_t>(k)]) a[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  if (!alive[0][0]) return std::nullopt;
  std::vector<int> path{0};
  for (int i = 0; i < last; ++i) {
    const int j = path.back();
    const auto& next = alive[static_cast<std::size_t>(i) + 1];
    for (int k = std::max(0, j - 1); k <= j + 1 && k < static_cast<int>(next.size()); ++k) {
      if (next[static_cast<std::size_t>(k)]) {
        path.push_back(k);
        break;
      }
    }
  }
  return path;
}

std::optional<std::vector<int>> good_path(const CoarseLattice& lattice) { return good_path(open_grid(lattice)); }

namespace {

// Endpoint measures along corridors from δ_0, keyed by the J-sequence.
class NuCache {
 public:
  NuCache(const Environment& env, const CoarseGeometry& geom) : env_(env), geom_(geom) {}

  const std::optional<StartMeasure>& get(const std::vector<int>& path) {
    if (auto it = cache_.find(path); it != cache_.end()) return it->second;
    std::optional<StartMeasure> nu;
    if (path.size() == 1) {
      nu = StartMeasure::delta(0);
    } else {
      std::vector<int> parent(path.begin(), path.end() - 1);
      const auto& from = get(parent);
      if (from) {
        const int i = static_cast<int>(parent.size()) - 1;
        nu = step(i, parent.back(), path.back() - parent.back(), *from).second;
      }
    }
    return cache_.emplace(path, std::move(nu)).first->second;
  }

  // One block from (i, j) along link `offset`: log partition and exit measure.
  std::pair<double, std::optional<StartMeasure>> step(int i, int j, int offset, const StartMeasure& nu) const {
    const Environment shifted = env_.shifted(static_cast<std::int64_t>(i) * geom_.n, 0);
    const LogColumn col = quenched_endpoint_column(shifted, geom_.params, geom_.link(j, offset), nu);
    if (col.empty()) return {kNegInf, std::nullopt};
    return {col.log_total(), col.normalized()};
  }

  void put(std::vector<int> path, std::optional<StartMeasure> nu) { cache_.emplace(std::move(path), std::move(nu)); }

 private:
  const Environment& env_;
  const CoarseGeometry& geom_;
  std::map<std::vector<int>, std::optional<StartMeasure>> cache_;
};

bool decide_open(const CoarseGeometry& g, const CoarseSite& s) {
  if (!s.reachable) return false;
  const double up = s.link_value(1);
  const double fwd = s.link_value(0);
  if (s.j == 0) {
    const double need_fwd = g.single_threshold ? g.log_u_off : g.log_u_on;
    return fwd >= need_fwd && up >= g.log_u_off;
  }
  return up >= g.log_u_off && fwd >= g.log_u_off && s.link_value(-1) >= g.log_u_off;
}

}  // namespace

CoarseLattice classify_lattice(const Environment& env, const CoarseGeometry& geom) {
  CoarseLattice lattice(geom);
  NuCache cache(env, lattice.geometry());
  OpenGrid grid;
  for (int i = 0; i <= geom.horizon_i; ++i) {
    grid.emplace_back(static_cast<std::size_t>(lattice.column_height(i)) + 1, false);
    for (int j = 0; j <= lattice.column_height(i); ++j) {
      CoarseSite& site = lattice.at(i, j);
      // The target's own flag is shared by every candidate path, so the
      // not-yet-decided entry of column i does not affect the choice.
      site.optimal_path = optimal_path(grid, i, j);
      const auto& nu = cache.get(site.optimal_path);
      site.reachable = nu.has_value();
      if (site.reachable) {
        site.nu = *nu;
        for (int d = (j == 0 ? 0 : -1); d <= 1; ++d) {
          auto [log_z, exit] = cache.step(i, j, d, site.nu);
          site.log_link[static_cast<std::size_t>(d + 1)] = log_z;
          std::vector<int> next = site.optimal_path;
          next.push_back(j + d);
          cache.put(std::move(next), std::move(exit));
        }
      }
      site.open = decide_open(geom, site);
      grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = site.open;
    }
  }
  return lattice;
}

Corridor path_corridor(const CoarseGeometry& geom, const std::vector<int>& path) {
  Corridor c;
  c.start_window = geom.window(0);
  for (std::size_t l = 0; l + 1 < path.size(); ++l) {
    c.segments.push_back({geom.n, geom.box(path[l]), geom.window(path[l + 1])});
  }
  return c;
}

GoodPathCertificate certificate(const Environment& env, const CoarseLattice& lattice, const std::vector<int>& path) {
  const CoarseGeometry& g = lattice.geometry();
  if (path.size() < 2 || path.front() != 0) throw std::invalid_argument("certificate: path must start at (0,0) and span a block");
  for (std::size_t l = 0; l < path.size(); ++l) {
    const int i = static_cast<int>(l);
    if (!lattice.contains(i, path[l])) throw std::invalid_argument("certificate: path leaves the lattice");
    if (l > 0 && std::abs(path[l] - path[l - 1]) > 1) throw std::invalid_argument("certificate: path is not linked");
    if (!lattice.at(i, path[l]).open) {
      throw std::invalid_argument("certificate: site (" + std::to_string(i) + ", " + std::to_string(path[l]) +
                                  ") is closed");
    }
  }
  GoodPathCertificate c;
  c.path = path;
  c.blocks = static_cast<std::int64_t>(path.size()) - 1;
  c.n = g.n;
  c.lambda = g.lambda;
  c.log_u_on = g.log_u_on;
  c.log_u_off = g.log_u_off;
  c.reference = g.lambda + (1.0 - 3.0 * g.eps) * g.free_energy;

  NuCache chain(env, g);
  StartMeasure nu = StartMeasure::delta(0);
  c.link_sum = 0.0;
  c.samepath_holds = true;
  for (std::int64_t l = 0; l < c.blocks; ++l) {
    const int i = static_cast<int>(l);
    const int j = path[static_cast<std::size_t>(l)];
    const int next = path[static_cast<std::size_t>(l) + 1];
    const auto& site = lattice.at(i, j);
    if (!std::equal(site.optimal_path.begin(), site.optimal_path.end(), path.begin())) c.samepath_holds = false;
    auto [log_z, exit] = chain.step(i, j, next - j, nu);
    c.link_sum += log_z;
    if (!exit) break;
    nu = std::move(*exit);
    if (j == 0 && next == 0) ++c.r_l;
  }
  c.alpha_hat = static_cast<double>(c.r_l) / static_cast<double>(c.blocks);
  c.log_corridor_z = corridor_log_partition(env, g.params, path_corridor(g, path), StartMeasure::delta(0));
  c.telescoping_error = std::abs(c.log_corridor_z - c.link_sum);
  c.telescoping_holds = c.telescoping_error <= 1e-8;
  const auto rl = static_cast<double>(c.r_l);
  const auto rest = static_cast<double>(c.blocks - c.r_l);
  c.log_threshold_product = rl * g.log_u_on + rest * g.log_u_off;
  c.threshold_holds = c.log_corridor_z >= c.log_threshold_product;
  const double ln = static_cast<double>(c.blocks) * static_cast<double>(g.n);
  c.bound_value = c.log_threshold_product / ln;
  c.free_energy_lower = c.log_corridor_z / ln;
  c.theta0 = -(c.alpha_hat * std::log(g.theta_on) + (1.0 - c.alpha_hat) * std::log(g.theta_off));
  return c;
}

SecondMomentReport second_moment_ratio(const CoarseGeometry& geom, int j, const StartMeasure& nu, int offset) {
  if (offset < -1 || offset > 1 || (j == 0 && offset < 0)) throw std::invalid_argument("second_moment_ratio: bad link");
  SecondMomentReport r;
  r.ratio = pair_constrained_second_moment(geom.spec, geom.params, geom.link(j, offset), nu).variance_ratio();
  r.threshold = geom.eps / (j == 0 ? 8.0 : 12.0);
  r.pass = r.ratio <= r.threshold;

  const auto& links = geom.constants.links;
  r.k6_hat = offset == 0 ? links.forward : (offset > 0 ? links.up : links.down);
  const std::int64_t m = (geom.n + geom.k0 - 1) / geom.k0;
  const double gamma2 = 2.0 * geom.params.beta * geom.params.u;
  r.k7_hat = std::exp(gamma2 + annealed_log_mgf(gamma2, PathConstraint::unconstrained(m), StartMeasure::delta(0)));
  const double phi = overlap_coupling(geom.spec, geom.params.beta);
  const double log_pair = pair_overlap_log_mgf(2.0 * phi, m, 0, 0) + 2.0 * phi;
  r.pair_mgf = std::exp(log_pair);
  const double k0 = geom.k0;
  r.bound = std::pow(r.k6_hat, -2.0) * std::pow(r.k7_hat, k0) * std::sqrt(std::expm1(k0 * log_pair));
  return r;
}

SecondMomentReport second_moment_ratio(const CoarseGeometry& geom, const CoarseSite& site, int offset) {
  return second_moment_ratio(geom, site.j, site.nu, offset);
}

CoarseSample coarse_sample(const Environment& env, const CoarseGeometry& geom, bool second_moment) {
  CoarseSample s{classify_lattice(env, geom), std::nullopt, std::nullopt, 0, 0, 0.0, std::nullopt};
  s.path = good_path(s.lattice);
  if (s.path) s.cert = certificate(env, s.lattice, *s.path);
  if (!second_moment) return s;
  s.first_link = second_moment_ratio(geom, s.lattice.at(0, 0), 0);
  if (!s.path) return s;
  const auto& path = *s.path;
  for (std::size_t l = 0; l + 1 < path.size(); ++l) {
    const auto& site = s.lattice.at(static_cast<int>(l), path[l]);
    const auto r = second_moment_ratio(geom, site, path[l + 1] - path[l]);
    ++s.second_moment_links;
    if (r.pass) ++s.second_moment_passes;
    s.second_moment_max_ratio = std::max(s.second_moment_max_ratio, r.ratio);
  }
  return s;
}

GapCertificate gap_certificate(const Environment& env, double beta, double eps, double k5_hat,
                               const GeometryOptions& opts) {
  GapCertificate out;
  out.geometry = build_gap_geometry(beta, eps, env.spec(), k5_hat, opts);
  out.theta = out.geometry.theta_off;
  out.gap_bound = -std::log(out.theta) / static_cast<double>(out.geometry.n);
  out.free_energy_bound = out.geometry.lambda - out.gap_bound;
  const CoarseLattice lattice = classify_lattice(env, out.geometry);
  if (auto path = good_path(lattice)) out.cert = certificate(env, lattice, *path);
  return out;
}

}  // namespace dpre
