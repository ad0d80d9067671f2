#include "dpre/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpre {

namespace {

void require_even(std::int64_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("N must be even and >= 2, got " + std::to_string(n));
}

void require_samples(const McOptions& mc) {
  if (mc.samples < 2) throw std::invalid_argument("samples must be >= 2");
}

std::vector<std::uint64_t> replica_seeds(const McOptions& mc) {
  std::vector<std::uint64_t> s(mc.samples);
  for (std::size_t k = 0; k < mc.samples; ++k) s[k] = child_seed(mc.seed, k);
  return s;
}

}  // namespace

double annealed_free_energy(const DisorderSpec& spec, double beta, double u, std::int64_t n) {
  require_even(n);
  const double log_mgf = annealed_log_mgf(beta * u, PathConstraint::unconstrained(n), StartMeasure::delta(0));
  return cumulant(spec, beta) + log_mgf / static_cast<double>(n);
}

FreeEnergyGrid quenched_free_energy_grid(const DisorderSpec& spec, const std::vector<PolymerParams>& params,
                                         std::int64_t n, const McOptions& mc) {
  require_even(n);
  require_samples(mc);
  if (params.empty()) throw std::invalid_argument("parameter grid is empty");
  FreeEnergyGrid g;
  g.params = params;
  g.n = n;
  g.seeds = replica_seeds(mc);
  const auto constraint = PathConstraint::unconstrained(n);
  const auto start = StartMeasure::delta(0);
  const auto nn = static_cast<double>(n);
  const auto per_replica = parallel_map<std::vector<double>>(mc.samples, mc.threads, [&](std::size_t k) {
    auto v = quenched_log_partitions(Environment(spec, g.seeds[k]), params, constraint, start);
    for (double& x : v) x /= nn;
    return v;
  });
  g.values.assign(params.size(), std::vector<double>(mc.samples));
  for (std::size_t k = 0; k < mc.samples; ++k)
    for (std::size_t p = 0; p < params.size(); ++p) g.values[p][k] = per_replica[k][p];
  for (std::size_t p = 0; p < params.size(); ++p) {
    g.estimates.push_back(summarize(g.values[p], g.seeds));
    g.annealed.push_back(annealed_free_energy(spec, params[p].beta, params[p].u, n));
  }
  return g;
}

McEstimate quenched_free_energy(const DisorderSpec& spec, double beta, double u, std::int64_t n,
                                const McOptions& mc) {
  return quenched_free_energy_grid(spec, {{beta, u}}, n, mc).estimates.front();
}

std::vector<JensenRow> jensen_check(const DisorderSpec& spec, const std::vector<double>& betas,
                                    const std::vector<double>& us, std::int64_t n, const McOptions& mc) {
  std::vector<PolymerParams> params;
  for (double b : betas)
    for (double u : us) params.push_back({b, u});
  const auto g = quenched_free_energy_grid(spec, params, n, mc);
  std::vector<JensenRow> rows;
  for (std::size_t p = 0; p < params.size(); ++p) {
    JensenRow r;
    r.beta = params[p].beta;
    r.u = params[p].u;
    r.quenched = g.estimates[p];
    r.annealed = g.annealed[p];
    r.holds = r.quenched.mean <= r.annealed + 3.0 * r.quenched.std_error;
    rows.push_back(r);
  }
  return rows;
}

ConstrainedReport constrained_gap_check(const DisorderSpec& spec, double beta, double u,
                                        const std::vector<std::int64_t>& ns, const McOptions& mc,
                                        const std::vector<Height>& ends) {
  require_samples(mc);
  if (ns.empty()) throw std::invalid_argument("N list is empty");
  const PolymerParams params{beta, u};
  const auto seeds = replica_seeds(mc);
  const auto start = StartMeasure::delta(0);
  ConstrainedReport rep;
  rep.ends_hold = true;
  rep.pathwise_holds = true;
  for (std::int64_t n : ns) {
    require_even(n);
    for (Height x : ends) {
      if (x % 2 != 0) throw std::invalid_argument("end heights must be even");
    }
    struct Replica {
      double log_z = 0.0;
      double half_2n = 0.0;
      std::vector<double> log_end;
      bool pathwise = true;
    };
    PathConstraint pinned2 = PathConstraint::unconstrained(2 * n);
    pinned2.end_point = 0;
    PathConstraint pinned = PathConstraint::unconstrained(n);
    pinned.end_point = 0;
    const auto reps = parallel_map<Replica>(mc.samples, mc.threads, [&](std::size_t k) {
      const Environment env(spec, seeds[k]);
      Replica r;
      const LogColumn col = quenched_endpoint_column(env, params, PathConstraint::unconstrained(n), start);
      r.log_z = col.log_total();
      for (Height x : ends) r.log_end.push_back(col.log_at(x));
      const double log_2n = quenched_log_partition(env, params, pinned2, start);
      r.half_2n = 0.5 * log_2n;
      const double second = quenched_log_partition(env.shifted(n, 0), params, pinned, start);
      r.pathwise = log_2n >= col.log_at(0) + second - 1e-9 * std::abs(log_2n);
      return r;
    });
    ConstrainedRow row;
    row.n = n;
    row.ends = ends;
    std::vector<double> lz, h2, diff;
    for (const auto& r : reps) {
      lz.push_back(r.log_z);
      h2.push_back(r.half_2n);
      diff.push_back((r.log_z - r.half_2n) / static_cast<double>(n));
      if (!r.pathwise) ++row.pathwise_violations;
    }
    row.log_z = summarize(lz, seeds);
    row.half_pinned_2n = summarize(h2, seeds);
    const auto d = summarize(diff);
    row.gap_per_site = d.mean;
    row.gap_se = d.std_error;
    for (std::size_t e = 0; e < ends.size(); ++e) {
      std::vector<double> v;
      for (const auto& r : reps) v.push_back(r.log_end[e] - r.half_2n);
      const auto est = summarize(v, seeds);
      row.end_minus_half.push_back(est);
      row.end_holds.push_back(est.mean <= 3.0 * est.std_error);
      rep.ends_hold = rep.ends_hold && row.end_holds.back();
    }
    rep.pathwise_holds = rep.pathwise_holds && row.pathwise_violations == 0;
    rep.rows.push_back(std::move(row));
  }
  rep.positive = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.gap_per_site > 0.0; });
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    rep.decreasing = rep.decreasing && rep.rows[k].gap_per_site < rep.rows[k - 1].gap_per_site;
  }
  return rep;
}

ConcentrationReport concentration_scan(const DisorderSpec& spec, double beta, double u,
                                       const std::vector<std::int64_t>& ns, const McOptions& mc,
                                       std::optional<double> tail_t) {
  require_samples(mc);
  if (ns.empty()) throw std::invalid_argument("N list is empty");
  const auto seeds = replica_seeds(mc);
  const PolymerParams params{beta, u};
  ConcentrationReport rep;
  std::vector<std::vector<double>> values;
  for (std::int64_t n : ns) {
    require_even(n);
    const auto nn = static_cast<double>(n);
    values.push_back(parallel_map<double>(mc.samples, mc.threads, [&](std::size_t k) {
      return quenched_log_partition(Environment(spec, seeds[k]), params, PathConstraint::unconstrained(n),
                                    StartMeasure::delta(0)) /
             nn;
    }));
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ConcentrationRow row;
    row.n = ns[i];
    row.free_energy = summarize(values[i], seeds);
    row.variance = row.free_energy.variance;
    rep.rows.push_back(row);
  }
  const auto smallest = std::min_element(ns.begin(), ns.end()) - ns.begin();
  const auto largest = std::max_element(ns.begin(), ns.end()) - ns.begin();
  rep.tail_t = tail_t.value_or(2.0 * std::sqrt(rep.rows[static_cast<std::size_t>(smallest)].variance));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::size_t c = 0;
    for (double v : values[i]) c += std::abs(v - rep.rows[i].free_energy.mean) >= rep.tail_t ? 1 : 0;
    rep.rows[i].tail_fraction = static_cast<double>(c) / static_cast<double>(mc.samples);
  }
  const double v0 = rep.rows[static_cast<std::size_t>(smallest)].variance;
  const double v1 = rep.rows[static_cast<std::size_t>(largest)].variance;
  rep.variance_ratio = v0 > 0.0 ? v1 / v0 : 0.0;
  const bool wide = ns[static_cast<std::size_t>(largest)] >= 16 * ns[static_cast<std::size_t>(smallest)];
  rep.pass = wide && (v0 == 0.0 ? v1 == 0.0 : rep.variance_ratio <= 0.5);
  return rep;
}

GapReport gap_scan(const DisorderSpec& spec, const std::vector<double>& betas, std::int64_t n, const McOptions& mc) {
  std::vector<PolymerParams> params;
  for (double b : betas) params.push_back({b, 0.0});
  const auto g = quenched_free_energy_grid(spec, params, n, mc);
  GapReport rep;
  rep.n = n;
  std::vector<double> lx, ly;
  for (std::size_t p = 0; p < params.size(); ++p) {
    GapRow r;
    r.beta = betas[p];
    r.quenched = g.estimates[p];
    r.annealed = cumulant(spec, r.beta);
    r.gap = r.annealed - r.quenched.mean;
    r.gap_se = r.quenched.std_error;
    r.positive = r.gap > 3.0 * r.gap_se;
    if (r.positive && r.beta > 0.0) {
      lx.push_back(std::log(r.beta));
      ly.push_back(std::log(r.gap));
    }
    rep.rows.push_back(r);
  }
  rep.all_positive = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.positive; });
  if (lx.size() >= 2) rep.slope = fit_line(lx, ly);
  rep.monotone = true;
  std::vector<GapRow> sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.beta < b.beta; });
  for (std::size_t k = 1; k < sorted.size(); ++k) rep.monotone = rep.monotone && sorted[k].gap >= sorted[k - 1].gap;
  return rep;
}

CriticalReport critical_scan(const DisorderSpec& spec, double beta, const std::vector<double>& u_grid,
                             std::int64_t n, const McOptions& mc, const CertificateOptions& cert) {
  if (u_grid.empty()) throw std::invalid_argument("u grid is empty");
  if (!std::is_sorted(u_grid.begin(), u_grid.end()) ||
      std::adjacent_find(u_grid.begin(), u_grid.end()) != u_grid.end()) {
    throw std::invalid_argument("u grid must be strictly increasing");
  }
  const auto zero = std::find(u_grid.begin(), u_grid.end(), 0.0);
  if (zero == u_grid.end()) throw std::invalid_argument("u grid must contain 0");
  const auto z = static_cast<std::size_t>(zero - u_grid.begin());
  std::vector<PolymerParams> params;
  for (double u : u_grid) params.push_back({beta, u});
  const auto g = quenched_free_energy_grid(spec, params, n, mc);
  CriticalReport rep;
  rep.beta = beta;
  rep.n = n;
  for (std::size_t k = 0; k < mc.samples; ++k) {
    for (std::size_t p = 1; p < params.size(); ++p) {
      if (g.values[p][k] < g.values[p - 1][k] - 1e-12) {
        ++rep.monotonicity_violations;
        break;
      }
    }
  }
  const double lambda = cumulant(spec, beta);
  for (std::size_t p = 0; p < params.size(); ++p) {
    CriticalRow r;
    r.u = u_grid[p];
    r.quenched = g.estimates[p];
    r.annealed = g.annealed[p];
    std::vector<double> d(mc.samples);
    for (std::size_t k = 0; k < mc.samples; ++k) d[k] = g.values[p][k] - g.values[z][k];
    r.difference = summarize(d, g.seeds);
    r.positive = r.difference.mean > 3.0 * r.difference.std_error;
    if (r.positive && !rep.u_c_hat) rep.u_c_hat = r.u;
    if (cert.seeds > 0 && r.u > 0.0 && beta > 0.0) {
      GeometryOptions opts;
      opts.k0 = cert.k0;
      opts.horizon_i = cert.horizon;
      opts.mem_cap_bytes = cert.mem_cap_bytes;
      try {
        const auto geom = build_geometry(beta, r.u, cert.eps, spec, opts);
        const auto ok = parallel_map<int>(cert.seeds, mc.threads, [&](std::size_t s) {
          const Environment env(spec, child_seed(mc.seed, s));
          const auto lattice = classify_lattice(env, geom);
          const auto path = good_path(lattice);
          if (!path) return 0;
          return certificate(env, lattice, *path).free_energy_lower > lambda ? 1 : 0;
        });
        std::size_t hits = 0;
        for (int v : ok) hits += static_cast<std::size_t>(v);
        r.certificate_rate = static_cast<double>(hits) / static_cast<double>(cert.seeds);
        if (*r.certificate_rate > 0.5 && !rep.u_certificate) rep.u_certificate = r.u;
      } catch (const std::invalid_argument&) {
        // Geometry too large for the memory cap at this u; the column stays empty.
      }
    }
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace dpre
