#include "dpre/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <variant>

#include "dpre/coarse_grain.hpp"
#include "dpre/disorder.hpp"
#include "dpre/estimators.hpp"
#include "dpre/lipschitz.hpp"
#include "dpre/pinning.hpp"
#include "dpre/stats.hpp"
#include "dpre/validation.hpp"

#ifndef DPRE_VERSION
#define DPRE_VERSION "0.0.0"
#endif

namespace dpre {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v, bool shortest) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = shortest ? std::to_chars(buf, buf + sizeof buf, v)
                            : std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Missing values are written as empty fields.
using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("Table: row width does not match the header");
    rows_.push_back(std::move(row));
  }
  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_row(os, header_);
    for (const auto& row : rows_) {
      std::vector<std::string> text;
      for (const auto& c : row) text.push_back(render(c));
      write_row(os, text);
    }
  }

 private:
  static std::string render(const Cell& c) {
    struct Visitor {
      std::string operator()(std::monostate) const { return ""; }
      std::string operator()(double v) const { return format_double(v, false); }
      std::string operator()(std::int64_t v) const { return std::to_string(v); }
      std::string operator()(std::uint64_t v) const { return std::to_string(v); }
      std::string operator()(bool v) const { return v ? "1" : "0"; }
      std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, c);
  }
  static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }
Cell i64(std::int64_t v) { return Cell{v}; }
Cell sz(std::size_t v) { return Cell{static_cast<std::uint64_t>(v)}; }

json fit_json(const std::optional<LinearFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},       {"intercept", f->intercept}, {"r2", f->r2},
          {"slope_se", f->slope_se}, {"slope_lo", f->slope_lo},   {"slope_hi", f->slope_hi},
          {"points", f->points}};
}

struct Outcome {
  std::vector<std::pair<std::string, Table>> tables;
  json constants = json::object();
  json summary = json::object();
  std::size_t replicas = 0;  // child seeds 0..replicas−1 of the master seed
  int status = kExitOk;
};

McOptions mc_options(const RunConfig& c) { return {c.samples, c.seed, c.threads}; }

std::vector<PolymerParams> param_grid(const RunConfig& c) {
  std::vector<PolymerParams> out;
  for (double b : c.beta)
    for (double u : c.u) out.push_back({b, u});
  return out;
}

GeometryOptions geometry_options(const RunConfig& c) {
  GeometryOptions g;
  if (c.k0 > 0) g.k0 = c.k0;
  g.horizon_i = c.horizon;
  g.mem_cap_bytes = c.mem_cap;
  return g;
}

json geometry_json(const CoarseGeometry& g) {
  return {{"beta", g.params.beta},
          {"u", g.params.u},
          {"eps", g.eps},
          {"N", g.n},
          {"k0", g.k0},
          {"k9_hat", g.k9_hat},
          {"lambda", g.lambda},
          {"free_energy", g.free_energy},
          {"correlation_length", g.correlation_length},
          {"epsilon0_hat", g.constants.epsilon0_hat},
          {"A_forward", g.constants.links.forward},
          {"A_up", g.constants.links.up},
          {"A_down", g.constants.links.down},
          {"xi_tail", g.constants.xi_tail},
          {"theta_on", g.theta_on},
          {"theta_off", g.theta_off},
          {"log_u_on", g.log_u_on},
          {"log_u_off", g.log_u_off}};
}

// ---- subcommands -------------------------------------------------------------

Outcome run_validate(const RunConfig& c, std::ostream& log) {
  Outcome o;
  const auto rep = run_oracle_suite(c.seed, c.instances);
  Table t({"engine", "instances", "max_abs_error", "infinity_mismatches", "tolerance", "pass"});
  for (const auto& r : rep.rows) {
    t.add({r.engine, i64(r.instances), r.max_abs_error, i64(r.infinity_mismatches), rep.tolerance, r.pass});
    log << (r.pass ? "PASS " : "FAIL ") << r.engine << " max_abs_error=" << format_double(r.max_abs_error, true)
        << '\n';
  }
  o.tables.emplace_back("validate.csv", std::move(t));
  o.summary = {{"pass", rep.pass}, {"tolerance", rep.tolerance}, {"instances", c.instances}};
  o.status = rep.pass ? kExitOk : kExitCheckFailed;
  return o;
}

Outcome run_pinning(const RunConfig& c, const DisorderSpec& spec, std::ostream& log) {
  Outcome o;
  Table t({"gamma", "N", "lower", "upper", "width", "oracle", "contains_oracle", "f_over_gamma2",
           "correlation_length"});
  for (double g : c.gamma) {
    for (std::int64_t n : c.n) {
      const auto b = free_energy_bracket(g, n);
      const double oracle = g > 0.0 ? free_energy_oracle(g) : 0.0;
      const std::optional<double> ratio = g != 0.0 ? std::optional<double>(oracle / (g * g)) : std::nullopt;
      const std::optional<double> m = g > 0.0 ? std::optional<double>(correlation_length(g)) : std::nullopt;
      t.add({g, i64(n), b.lower, b.upper, b.width(), oracle, b.contains(oracle), opt(ratio), opt(m)});
      log << "gamma=" << format_double(g, true) << " N=" << n << " F in [" << format_double(b.lower, true) << ", "
          << format_double(b.upper, true) << "], oracle " << format_double(oracle, true) << '\n';
    }
  }
  o.tables.emplace_back("pinning.csv", std::move(t));

  if (c.checks) {
    Table checks({"check", "gamma", "N", "eps", "x", "value", "bound", "pass"});
    Table upb({"gamma", "j", "length", "per_block"});
    json constants = json::array();
    bool all_pass = true;
    for (double g : c.gamma) {
      if (!(g > 0.0)) continue;
      for (std::int64_t n : c.check_n) {
        const auto h = hayati_check(g, n);
        for (const auto& r : h.rows)
          checks.add({std::string("hayati"), g, i64(n), Cell{}, i64(r.x), r.ratio, r.walk_probability, r.pass});
        all_pass = all_pass && h.pass;
        for (double e : c.eps) {
          const auto k = kusto_check(g, e, n);
          for (const auto& r : k.rows)
            checks.add({std::string("kusto"), g, i64(n), e, i64(r.x), r.log_lhs, r.log_rhs, r.pass});
          all_pass = all_pass && k.pass;
          const auto pc = pinning_constants(g, e, n);
          constants.push_back({{"gamma", g},
                               {"N", n},
                               {"eps", e},
                               {"epsilon0_hat", pc.epsilon0_hat},
                               {"A_forward", pc.links.forward},
                               {"A_up", pc.links.up},
                               {"A_down", pc.links.down},
                               {"xi_tail", pc.xi_tail},
                               {"theta_on", pc.theta_on},
                               {"theta_off", pc.theta_off}});
        }
      }
      if (g <= 1.0) {
        const auto j_max = std::min<std::int64_t>(10, static_cast<std::int64_t>(1e5 / correlation_length(g)));
        if (j_max >= 1) {
          const auto r = upb_check(g, j_max);
          for (std::size_t j = 0; j < r.lengths.size(); ++j)
            upb.add({g, i64(static_cast<std::int64_t>(j + 1)), i64(r.lengths[j]), r.per_block[j]});
        }
      }
    }
    o.tables.emplace_back("pinning_checks.csv", std::move(checks));
    o.tables.emplace_back("upb.csv", std::move(upb));
    o.constants["pinning"] = constants;
    o.summary["checks_pass"] = all_pass;
    log << "random-walk inequality checks: " << (all_pass ? "all pass" : "FAILURES") << '\n';
  }

  if (c.crl_r_max > 0) {
    Table crl({"beta", "a", "R", "value"});
    json k5 = json::array();
    for (double b : c.beta) {
      const auto s = crl_k5_scan(spec, b, c.crl_a, c.crl_r_max);
      for (std::size_t r = 0; r < s.values.size(); ++r) crl.add({b, c.crl_a, i64(static_cast<std::int64_t>(r)), s.values[r]});
      k5.push_back({{"beta", b},
                    {"a", c.crl_a},
                    {"r_max", c.crl_r_max},
                    {"largest_passing_r", s.largest_passing_r},
                    {"monotone", s.monotone},
                    {"k5_hat", s.k5_hat}});
      log << "beta=" << format_double(b, true) << " K5_hat=" << format_double(s.k5_hat, true) << '\n';
    }
    o.tables.emplace_back("crl.csv", std::move(crl));
    o.constants["k5_hat"] = k5;
  }
  return o;
}

Outcome run_free_energy(const RunConfig& c, const DisorderSpec& spec, std::ostream& log) {
  Outcome o;
  o.replicas = c.samples;
  const auto params = param_grid(c);
  Table t({"beta", "u", "N", "samples", "mean", "stderr", "annealed_exact", "variance", "jensen_holds"});
  std::vector<FreeEnergyGrid> grids;
  bool jensen = true;
  for (std::int64_t n : c.n) {
    grids.push_back(quenched_free_energy_grid(spec, params, n, mc_options(c)));
    const auto& g = grids.back();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto& e = g.estimates[k];
      const bool holds = e.mean <= g.annealed[k] + 3.0 * e.std_error;
      jensen = jensen && holds;
      t.add({params[k].beta, params[k].u, i64(n), sz(e.count), e.mean, e.std_error, g.annealed[k], e.variance, holds});
    }
    log << "N=" << n << ": " << params.size() << " parameter points\n";
  }
  o.tables.emplace_back("free-energy.csv", std::move(t));
  o.summary["jensen_holds"] = jensen;
  if (c.n.size() >= 2) {
    const auto lo = static_cast<std::size_t>(std::min_element(c.n.begin(), c.n.end()) - c.n.begin());
    const auto hi = static_cast<std::size_t>(std::max_element(c.n.begin(), c.n.end()) - c.n.begin());
    json conc = json::array();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double v0 = grids[lo].estimates[k].variance;
      const double v1 = grids[hi].estimates[k].variance;
      const bool defined = v0 > 0.0;
      const double ratio = defined ? v1 / v0 : 0.0;
      conc.push_back({{"beta", params[k].beta},
                      {"u", params[k].u},
                      {"n_small", c.n[lo]},
                      {"n_large", c.n[hi]},
                      {"variance_ratio", defined ? json(ratio) : json(nullptr)},
                      {"pass", defined && ratio <= 0.5 && c.n[hi] >= 16 * c.n[lo]}});
    }
    o.summary["concentration"] = conc;
  }
  return o;
}

Outcome run_coarse_grain(const RunConfig& c, const DisorderSpec& spec, std::ostream& log) {
  Outcome o;
  o.replicas = c.samples;
  Table t({"sample", "seed", "beta", "u", "eps", "k0", "N", "horizon", "open_sites", "sites", "good_path", "blocks",
           "r_l", "log_corridor_z", "link_sum", "telescoping_error", "log_threshold_product", "free_energy_lower",
           "lambda", "reference", "beats_lambda", "telescoping_holds", "threshold_holds", "samepath_holds",
           "second_moment_links", "second_moment_passes", "second_moment_max_ratio"});
  Table lattice({"sample", "beta", "u", "eps", "i", "j", "open", "log_forward", "log_up", "log_down", "on_path"});
  json constants = json::array();
  json summary = json::array();
  for (double b : c.beta) {
    for (double u : c.u) {
      for (double e : c.eps) {
        const auto geom = build_geometry(b, u, e, spec, geometry_options(c));
        log << "beta=" << format_double(b, true) << " u=" << format_double(u, true) << " eps=" << format_double(e, true)
            << ": N=" << geom.n << " k0=" << geom.k0 << '\n';
        auto samples = parallel_map<std::optional<CoarseSample>>(c.samples, c.threads, [&](std::size_t k) {
          return std::optional<CoarseSample>(coarse_sample(Environment(spec, child_seed(c.seed, k)), geom));
        });
        std::size_t found = 0, beats = 0, sm_links = 0, sm_passes = 0;
        json gc = geometry_json(geom);
        for (std::size_t k = 0; k < samples.size(); ++k) {
          const auto& s = *samples[k];
          if (k == 0 && s.first_link) {
            gc["k6_hat"] = s.first_link->k6_hat;
            gc["k7_hat"] = s.first_link->k7_hat;
            gc["pair_mgf"] = s.first_link->pair_mgf;
            gc["second_moment_bound"] = s.first_link->bound;
          }
          sm_links += s.second_moment_links;
          sm_passes += s.second_moment_passes;
          std::vector<Cell> row{sz(k), Cell{child_seed(c.seed, k)}, b, u, e, i64(geom.k0), i64(geom.n),
                                i64(geom.horizon_i), sz(s.lattice.open_count()), sz(s.lattice.site_count()),
                                s.path.has_value()};
          if (s.cert) {
            const auto& ct = *s.cert;
            ++found;
            if (s.beats_lambda()) ++beats;
            row.insert(row.end(), {i64(ct.blocks), i64(ct.r_l), ct.log_corridor_z, ct.link_sum, ct.telescoping_error,
                                   ct.log_threshold_product, ct.free_energy_lower, ct.lambda, ct.reference,
                                   s.beats_lambda(), ct.telescoping_holds, ct.threshold_holds, ct.samepath_holds});
          } else {
            row.resize(row.size() + 13);
          }
          row.insert(row.end(), {sz(s.second_moment_links), sz(s.second_moment_passes), s.second_moment_max_ratio});
          t.add(std::move(row));
          if (c.lattice) {
            for (int i = 0; i <= s.lattice.horizon_i(); ++i) {
              for (int j = 0; j <= s.lattice.column_height(i); ++j) {
                const auto& site = s.lattice.at(i, j);
                const bool on = s.path && (*s.path)[static_cast<std::size_t>(i)] == j;
                lattice.add({sz(k), b, u, e, i64(i), i64(j), site.open, site.link_value(0), site.link_value(1),
                             j > 0 ? Cell{site.link_value(-1)} : Cell{}, on});
              }
            }
          }
        }
        constants.push_back(gc);
        const auto rate = wilson_interval(found, samples.size());
        summary.push_back({{"beta", b},
                           {"u", u},
                           {"eps", e},
                           {"samples", samples.size()},
                           {"good_paths", found},
                           {"good_path_rate", rate.estimate},
                           {"good_path_rate_lo", rate.lo},
                           {"good_path_rate_hi", rate.hi},
                           {"beats_lambda", beats},
                           {"second_moment_links", sm_links},
                           {"second_moment_passes", sm_passes}});
        log << "  good paths " << found << "/" << samples.size() << ", certificate above Lambda " << beats << '\n';
      }
    }
  }
  o.tables.emplace_back("coarse-grain.csv", std::move(t));
  if (c.lattice) o.tables.emplace_back("lattice.csv", std::move(lattice));
  o.constants["coarse_grain"] = constants;
  o.summary["runs"] = summary;
  return o;
}

Outcome run_lipschitz(const RunConfig& c, std::ostream& log) {
  Outcome o;
  o.replicas = c.samples;
  const auto r = tail_statistics(c.p, c.columns, c.samples, c.seed, c.heights, c.threads);
  Table t({"quantity", "n", "count", "tail"});
  for (std::size_t n = 0; n < r.height.counts.size(); ++n)
    t.add({std::string("height"), i64(static_cast<std::int64_t>(n)), sz(r.height.counts[n]), r.height.tail[n]});
  for (std::size_t n = 1; n < r.component.counts.size(); ++n)
    t.add({std::string("component"), i64(static_cast<std::int64_t>(n)), sz(r.component.counts[n]),
           r.component.tail[n]});
  o.tables.emplace_back("lipschitz.csv", std::move(t));
  o.summary = {{"p", r.p},
               {"columns", r.columns},
               {"heights", r.heights},
               {"samples", r.samples},
               {"failures", r.failures},
               {"existence_rate", static_cast<double>(r.samples - r.failures) / static_cast<double>(r.samples)},
               {"observations", r.observations},
               {"axis_density", r.axis_density},
               {"height_fit", fit_json(r.height.fit)},
               {"height_tail_decreasing", r.height.decreasing},
               {"component_fit", fit_json(r.component.fit)},
               {"alpha_hat", r.alpha_hat},
               {"gamma_hat", r.gamma_hat},
               {"lambda_hat", r.lambda_hat}};
  log << "existence " << (r.samples - r.failures) << "/" << r.samples << ", axis density "
      << format_double(r.axis_density, true) << '\n';
  return o;
}

Outcome run_gap_scan(const RunConfig& c, const DisorderSpec& spec, std::ostream& log) {
  Outcome o;
  o.replicas = c.samples;
  Table t({"beta", "u", "N", "samples", "mean", "stderr", "annealed_exact", "gap", "gap_stderr", "positive"});
  json summary = json::array();
  for (std::int64_t n : c.n) {
    const auto r = gap_scan(spec, c.beta, n, mc_options(c));
    for (const auto& row : r.rows)
      t.add({row.beta, 0.0, i64(n), sz(row.quenched.count), row.quenched.mean, row.quenched.std_error, row.annealed,
             row.gap, row.gap_se, row.positive});
    summary.push_back({{"N", n},
                       {"all_positive", r.all_positive},
                       {"monotone", r.monotone},
                       {"slope_fit", fit_json(r.slope)},
                       {"slope_window", {3.0, 5.0}}});
    log << "N=" << n << ": slope "
        << (r.slope ? format_double(r.slope->slope, true) : std::string("n/a")) << '\n';
  }
  o.tables.emplace_back("gap-scan.csv", std::move(t));
  o.summary["scans"] = summary;
  return o;
}

Outcome run_critical_scan(const RunConfig& c, const DisorderSpec& spec, std::ostream& log) {
  Outcome o;
  o.replicas = std::max(c.samples, c.cert_seeds);
  Table t({"beta", "u", "N", "samples", "mean", "stderr", "annealed_exact", "difference", "difference_stderr",
           "positive", "certificate_rate"});
  CertificateOptions cert;
  cert.seeds = c.cert_seeds;
  cert.eps = c.eps.front();
  if (c.k0 > 0) cert.k0 = c.k0;
  cert.horizon = c.horizon;
  cert.mem_cap_bytes = c.mem_cap;
  json summary = json::array();
  for (double b : c.beta) {
    for (std::int64_t n : c.n) {
      const auto r = critical_scan(spec, b, c.u, n, mc_options(c), cert);
      for (const auto& row : r.rows)
        t.add({b, row.u, i64(n), sz(row.quenched.count), row.quenched.mean, row.quenched.std_error, row.annealed,
               row.difference.mean, row.difference.std_error, row.positive, opt(row.certificate_rate)});
      auto per_beta = [&](const std::optional<double>& v) { return v ? json(*v / b) : json(nullptr); };
      summary.push_back({{"beta", b},
                         {"N", n},
                         {"u_c_hat", r.u_c_hat ? json(*r.u_c_hat) : json(nullptr)},
                         {"u_c_hat_over_beta", per_beta(r.u_c_hat)},
                         {"u_certificate", r.u_certificate ? json(*r.u_certificate) : json(nullptr)},
                         {"u_certificate_over_beta", per_beta(r.u_certificate)},
                         {"monotonicity_violations", r.monotonicity_violations}});
      log << "beta=" << format_double(b, true) << " N=" << n << ": u_c_hat "
          << (r.u_c_hat ? format_double(*r.u_c_hat, true) : std::string("none")) << '\n';
    }
  }
  o.tables.emplace_back("critical-scan.csv", std::move(t));
  o.summary["scans"] = summary;
  return o;
}

json config_json(const RunConfig& c) {
  return {{"subcommand", c.subcommand}, {"disorder", c.disorder},   {"seed", c.seed},
          {"samples", c.samples},       {"threads", c.threads},     {"mem_cap", c.mem_cap},
          {"beta", c.beta},             {"u", c.u},                 {"eps", c.eps},
          {"gamma", c.gamma},           {"n", c.n},                 {"instances", c.instances},
          {"checks", c.checks},         {"check_n", c.check_n},     {"crl_r_max", c.crl_r_max},
          {"crl_a", c.crl_a},           {"k0", c.k0},               {"horizon", c.horizon},
          {"lattice", c.lattice},       {"cert_seeds", c.cert_seeds}, {"p", c.p},
          {"columns", c.columns},       {"heights", c.heights}};
}

bool uses_lengths(const std::string& s) {
  return s == "pinning" || s == "free-energy" || s == "gap-scan" || s == "critical-scan";
}

}  // namespace

std::vector<std::int64_t> default_lengths(const std::string& subcommand) {
  if (subcommand == "pinning") return {kBracketLength};
  if (subcommand == "free-energy") return {256};
  if (subcommand == "gap-scan" || subcommand == "critical-scan") return {1024};
  return {};
}

void resolve(RunConfig& c) {
  if (c.n.empty()) c.n = default_lengths(c.subcommand);
}

std::optional<std::string> check_config(const RunConfig& c) {
  const auto& s = c.subcommand;
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), s) == std::end(kSubcommands))
    return "subcommand: unknown '" + s + "'";
  try {
    (void)DisorderSpec::parse(c.disorder);
  } catch (const std::exception&) {
    return "disorder: unknown family '" + c.disorder + "' (gaussian, rademacher, uniform)";
  }
  if (c.threads < 1) return "threads: must be >= 1";
  if (c.mem_cap < 1) return "mem-cap: must be positive";
  auto even = [](const char* field, const std::vector<std::int64_t>& ns) -> std::optional<std::string> {
    if (ns.empty()) return std::string(field) + ": grid is empty";
    for (auto n : ns)
      if (n < 2 || n % 2 != 0) return std::string(field) + ": N = " + std::to_string(n) + " must be even and >= 2";
    return std::nullopt;
  };
  auto nonempty = [](const char* field, const std::vector<double>& v) -> std::optional<std::string> {
    if (v.empty()) return std::string(field) + ": grid is empty";
    for (double x : v)
      if (!std::isfinite(x)) return std::string(field) + ": values must be finite";
    return std::nullopt;
  };
  if (uses_lengths(s)) {
    if (auto e = even("n", c.n)) return e;
  }
  if (s == "validate") {
    if (c.instances < 1) return "instances: must be >= 1";
    return std::nullopt;
  }
  if (s == "pinning") {
    if (auto e = nonempty("gamma", c.gamma)) return e;
    if (c.checks) {
      if (auto e = even("check-n", c.check_n)) return e;
      if (auto e = nonempty("eps", c.eps)) return e;
    }
    if (c.crl_r_max < 0 || c.crl_r_max > 100000) return "crl-r-max: must lie in [0, 100000]";
    if (c.crl_r_max > 0) {
      if (auto e = nonempty("beta", c.beta)) return e;
    }
  }
  for (double e : c.eps)
    if (!(e > 0.0 && e < 1.0)) return "eps: values must lie in (0, 1)";
  if (s == "free-energy" || s == "gap-scan" || s == "critical-scan") {
    if (c.samples < 2) return "samples: must be >= 2";
    if (auto e = nonempty("beta", c.beta)) return e;
  }
  if (s == "free-energy" || s == "critical-scan" || s == "coarse-grain") {
    if (auto e = nonempty("u", c.u)) return e;
  }
  if (s == "critical-scan") {
    if (!std::is_sorted(c.u.begin(), c.u.end()) || std::adjacent_find(c.u.begin(), c.u.end()) != c.u.end())
      return "u: grid must be strictly increasing";
    if (std::find(c.u.begin(), c.u.end(), 0.0) == c.u.end()) return "u: grid must contain 0";
    if (auto e = nonempty("eps", c.eps)) return e;
  }
  if (s == "coarse-grain" || s == "critical-scan") {
    if (c.k0 < 0) return "k0: must be >= 0 (0 selects the default)";
    if (c.horizon < 1) return "horizon: must be >= 1";
  }
  if (s == "coarse-grain") {
    if (c.samples < 1) return "samples: must be >= 1";
    if (auto e = nonempty("beta", c.beta)) return e;
    if (auto e = nonempty("eps", c.eps)) return e;
    for (double b : c.beta)
      for (double u : c.u)
        if (!(b * u > 0.0)) return "beta, u: coarse-grain needs beta*u > 0";
  }
  if (s == "lipschitz") {
    if (!(c.p > 0.0 && c.p <= 1.0)) return "p: must lie in (0, 1]";
    if (c.columns < 4) return "columns: must be >= 4";
    if (c.heights < 1) return "heights: must be >= 1";
    if (c.samples < 1) return "samples: must be >= 1";
  }
  return std::nullopt;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream os;
  auto d = [](double v) { return format_double(v, true); };
  auto dv = [&](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + d(v[k]);
    return s + "]";
  };
  auto iv = [](const std::vector<std::int64_t>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + std::to_string(v[k]);
    return s + "]";
  };
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "# dpre " << DPRE_VERSION << "; rerun with: dpre " << c.subcommand << " --config <this file>\n"
     << "disorder = \"" << c.disorder << "\"\n"
     << "seed = " << c.seed << '\n'
     << "samples = " << c.samples << '\n'
     << "out = \"" << c.out << "\"\n"
     << "threads = " << c.threads << '\n'
     << "mem-cap = " << c.mem_cap << '\n'
     << "beta = " << dv(c.beta) << '\n'
     << "u = " << dv(c.u) << '\n'
     << "eps = " << dv(c.eps) << '\n'
     << "gamma = " << dv(c.gamma) << '\n'
     << (c.n.empty() ? "" : "n = " + iv(c.n) + "\n")
     << "instances = " << c.instances << '\n'
     << "checks = " << b(c.checks) << '\n'
     << "check-n = " << iv(c.check_n) << '\n'
     << "crl-r-max = " << c.crl_r_max << '\n'
     << "crl-a = " << d(c.crl_a) << '\n'
     << "k0 = " << c.k0 << '\n'
     << "horizon = " << c.horizon << '\n'
     << "lattice = " << b(c.lattice) << '\n'
     << "cert-seeds = " << c.cert_seeds << '\n'
     << "p = " << d(c.p) << '\n'
     << "columns = " << c.columns << '\n'
     << "heights = " << c.heights << '\n';
  return os.str();
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  if (auto problem = check_config(config)) {
    err << "invalid config: " << *problem << '\n';
    return kExitInvalidConfig;
  }
  const auto spec = DisorderSpec::parse(config.disorder);
  Outcome o;
  try {
    const auto& s = config.subcommand;
    if (s == "validate") o = run_validate(config, log);
    else if (s == "pinning") o = run_pinning(config, spec, log);
    else if (s == "free-energy") o = run_free_energy(config, spec, log);
    else if (s == "coarse-grain") o = run_coarse_grain(config, spec, log);
    else if (s == "lipschitz") o = run_lipschitz(config, log);
    else if (s == "gap-scan") o = run_gap_scan(config, spec, log);
    else o = run_critical_scan(config, spec, log);
  } catch (const MemoryCapExceeded& e) {
    err << "memory cap exceeded: " << e.what() << " (raise --mem-cap or lower k0)\n";
    return kExitMemoryCap;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  namespace fs = std::filesystem;
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "cannot create output directory " << dir << ": " << ec.message() << '\n';
    return kExitIo;
  }
  auto write_file = [&](const std::string& name, auto&& emit) {
    std::ofstream f(dir / name, std::ios::binary);
    emit(f);
    f.close();
    if (!f) {
      err << "cannot write " << (dir / name) << '\n';
      return false;
    }
    return true;
  };

  json outputs = json::array();
  for (const auto& [name, table] : o.tables) {
    if (!write_file(name, [&](std::ostream& os) { table.write(os); })) return kExitIo;
    outputs.push_back(name);
  }
  if (!write_file("config.ini", [&](std::ostream& os) { os << to_config_text(config); })) return kExitIo;

  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < o.replicas; ++k) seeds.push_back(child_seed(config.seed, k));
  json manifest = {{"program", "dpre"},
                   {"version", DPRE_VERSION},
                   {"subcommand", config.subcommand},
                   {"config", config_json(config)},
                   {"seeds",
                    {{"master", config.seed},
                     {"replicas", o.replicas},
                     {"derivation", "child_seed(master, k) = mix64(mix64(master) ^ mix64(~k)), k = 0..replicas-1"},
                     {"digest", digest_seeds(seeds)}}},
                   {"constants", o.constants},
                   {"summary", o.summary},
                   {"outputs", outputs},
                   {"config_file", "config.ini"}};
  if (!write_file("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; })) return kExitIo;
  log << "wrote " << (dir / "manifest.json").string() << '\n';
  return o.status;
}

int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Directed polymer with a disordered defect line: exact transfer matrices, Monte Carlo estimators, "
               "coarse-grained certificates and Lipschitz percolation.",
               "dpre"};
  app.set_version_flag("--version", DPRE_VERSION);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--disorder", c.disorder, "gaussian | rademacher | uniform")->capture_default_str();
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--samples", c.samples, "Monte Carlo replicas (environments)")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--mem-cap", c.mem_cap, "memory cap for block buffers, bytes (suffixes KB, MB, GB)")
      ->transform(CLI::AsSizeValue(false))
      ->capture_default_str();
  app.add_option("--beta", c.beta, "inverse temperature grid")->delimiter(',')->capture_default_str();
  app.add_option("--u", c.u, "defect strength grid")->delimiter(',')->capture_default_str();
  app.add_option("--eps", c.eps, "coarse-graining epsilon grid")->delimiter(',')->capture_default_str();
  app.add_option("--gamma", c.gamma, "homogeneous pinning strength grid")->delimiter(',')->capture_default_str();
  app.add_option("--n", c.n, "polymer lengths (even); default depends on the subcommand")->delimiter(',');
  app.add_option("--instances", c.instances, "validate: random instances per engine")->capture_default_str();
  app.add_flag("--checks", c.checks, "pinning: exact random-walk inequality tables");
  app.add_option("--check-n", c.check_n, "pinning: lengths for --checks")->delimiter(',')->capture_default_str();
  app.add_option("--crl-r-max", c.crl_r_max, "pinning: overlap-moment scan up to R (0 = off)")->capture_default_str();
  app.add_option("--crl-a", c.crl_a, "pinning: overlap-moment level a")->capture_default_str();
  app.add_option("--k0", c.k0, "blocks per correlation length (0 = default)")->capture_default_str();
  app.add_option("--horizon", c.horizon, "coarse lattice columns")->capture_default_str();
  app.add_flag("--lattice", c.lattice, "coarse-grain: also write lattice.csv");
  app.add_option("--cert-seeds", c.cert_seeds, "critical-scan: environments for the certificate column")
      ->capture_default_str();
  app.add_option("--p", c.p, "lipschitz: site-open probability")->capture_default_str();
  app.add_option("--columns", c.columns, "lipschitz: strip width")->capture_default_str();
  app.add_option("--heights", c.heights, "lipschitz: height cap")->capture_default_str();

  app.add_subcommand("validate", "transfer-matrix engines against brute-force enumeration");
  app.add_subcommand("pinning", "free-energy brackets, renewal oracle, random-walk checks, overlap moments");
  app.add_subcommand("free-energy", "quenched Monte Carlo with exact annealed reference and concentration");
  app.add_subcommand("coarse-grain", "site classification, good paths and certificates");
  app.add_subcommand("lipschitz", "lowest open Lipschitz function statistics");
  app.add_subcommand("gap-scan", "annealed minus quenched free energy at u = 0 over beta");
  app.add_subcommand("critical-scan", "free-energy difference over a u grid and the empirical threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  resolve(c);
  return run(c, log, err);
}

}  // namespace dpre
