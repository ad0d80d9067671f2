#pragma once

// Monte Carlo over disorder. Replica k uses the environment seeded with
// child_seed(master, k); quantities at several parameter values share those
// environments (common random numbers), and results are reduced in replica
// order so they do not depend on the thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "dpre/coarse_grain.hpp"
#include "dpre/disorder.hpp"
#include "dpre/partition.hpp"
#include "dpre/stats.hpp"

namespace dpre {

struct McOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Λ(β) + (1/N) log E_0 e^{βu L_N}: the exact finite-N annealed free energy.
double annealed_free_energy(const DisorderSpec& spec, double beta, double u, std::int64_t n);

/// (1/N) log Z_N over replicas; unconstrained paths from 0.
McEstimate quenched_free_energy(const DisorderSpec& spec, double beta, double u, std::int64_t n,
                                const McOptions& mc);

/// One estimate per parameter set, all on the same environments. The
/// per-replica values are returned as well, indexed [param][replica].
struct FreeEnergyGrid {
  std::vector<PolymerParams> params;
  std::int64_t n = 0;
  std::vector<McEstimate> estimates;
  std::vector<double> annealed;  // annealed_free_energy per param
  std::vector<std::vector<double>> values;
  std::vector<std::uint64_t> seeds;
};

FreeEnergyGrid quenched_free_energy_grid(const DisorderSpec& spec, const std::vector<PolymerParams>& params,
                                         std::int64_t n, const McOptions& mc);

struct JensenRow {
  double beta = 0.0;
  double u = 0.0;
  McEstimate quenched;
  double annealed = 0.0;
  bool holds = false;  // quenched.mean ≤ annealed + 3 SE
};

std::vector<JensenRow> jensen_check(const DisorderSpec& spec, const std::vector<double>& betas,
                                    const std::vector<double>& us, std::int64_t n, const McOptions& mc);

struct ConstrainedRow {
  std::int64_t n = 0;
  McEstimate log_z;           // log Z_N
  McEstimate half_pinned_2n;  // ½ log Z_{2N}(0,0)
  double gap_per_site = 0.0;  // (mean log Z_N − ½ mean log Z_{2N}(0,0)) / N
  double gap_se = 0.0;        // per site, from paired differences
  std::vector<Height> ends;   // x values
  std::vector<McEstimate> end_minus_half;  // log Z_N(0,x) − ½ log Z_{2N}(0,0), paired
  std::vector<bool> end_holds;             // mean ≤ 3 SE
  std::size_t pathwise_violations = 0;     // log Z_{2N}(0,0) < log Z_N(0,0) + log Z_N(0,0; θ_N V)
};

struct ConstrainedReport {
  std::vector<ConstrainedRow> rows;
  bool positive = false;    // every gap > 0
  bool decreasing = false;  // gap_per_site decreasing in N
  bool ends_hold = false;
  bool pathwise_holds = false;
};

ConstrainedReport constrained_gap_check(const DisorderSpec& spec, double beta, double u,
                                        const std::vector<std::int64_t>& ns, const McOptions& mc,
                                        const std::vector<Height>& ends = {0, 2, 8});

struct ConcentrationRow {
  std::int64_t n = 0;
  McEstimate free_energy;
  double variance = 0.0;
  double tail_fraction = 0.0;  // fraction with |value − mean| ≥ t
};

struct ConcentrationReport {
  double tail_t = 0.0;
  std::vector<ConcentrationRow> rows;
  double variance_ratio = 0.0;  // Var(largest N) / Var(smallest N)
  bool pass = false;            // ratio ≤ ½ and N ratio ≥ 16
};

/// tail_t defaults to two standard deviations at the smallest N.
ConcentrationReport concentration_scan(const DisorderSpec& spec, double beta, double u,
                                       const std::vector<std::int64_t>& ns, const McOptions& mc,
                                       std::optional<double> tail_t = std::nullopt);

struct GapRow {
  double beta = 0.0;
  McEstimate quenched;
  double annealed = 0.0;  // Λ(β)
  double gap = 0.0;       // Δ̂ = Λ(β) − quenched mean
  double gap_se = 0.0;
  bool positive = false;  // Δ̂ > 3 SE
};

struct GapReport {
  std::int64_t n = 0;
  std::vector<GapRow> rows;
  std::optional<LinearFit> slope;  // log Δ̂ on log β, positive rows only
  bool all_positive = false;
  bool monotone = false;
};

GapReport gap_scan(const DisorderSpec& spec, const std::vector<double>& betas, std::int64_t n, const McOptions& mc);

struct CriticalRow {
  double u = 0.0;
  McEstimate quenched;
  double annealed = 0.0;
  McEstimate difference;  // (1/N)(log Z(u) − log Z(0)), paired
  bool positive = false;  // difference > 3 SE
  std::optional<double> certificate_rate;  // fraction of seeds with a certificate beating Λ(β)
};

struct CertificateOptions {
  std::size_t seeds = 0;  // 0 disables the coarse-grain column
  double eps = 0.3;
  std::optional<int> k0;
  int horizon = 30;
  std::size_t mem_cap_bytes = std::size_t{1} << 30;
};

struct CriticalReport {
  double beta = 0.0;
  std::int64_t n = 0;
  std::vector<CriticalRow> rows;
  std::optional<double> u_c_hat;          // least u with a positive difference
  std::optional<double> u_certificate;    // least u with certificate rate > ½
  std::size_t monotonicity_violations = 0;  // per replica, log Z decreasing in u
};

CriticalReport critical_scan(const DisorderSpec& spec, double beta, const std::vector<double>& u_grid,
                             std::int64_t n, const McOptions& mc, const CertificateOptions& cert = {});

}  // namespace dpre
