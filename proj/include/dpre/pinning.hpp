#pragma once

// Homogeneous pinning: the free energy F(γ) of e^{γ L_N}, deterministic
// brackets, the correlation length M = 1/F, and exact finite-N checks of
// the random-walk inequalities used by the coarse-graining.

#include <cstdint>
#include <vector>

#include "dpre/disorder.hpp"
#include "dpre/walk.hpp"

namespace dpre {

/// F(γ) ∈ [lower, upper] from super- and subadditivity at size N.
struct FreeEnergyBracket {
  double gamma = 0.0;
  std::int64_t n = 0;
  double lower = 0.0;  // (1/N) log E_0[e^{γ L_N} 1{S_N = 0}]
  double upper = 0.0;  // (γ + log E_0 e^{γ L_N}) / N, or 0 for γ ≤ 0

  double width() const { return upper - lower; }
  bool contains(double f) const { return lower <= f && f <= upper; }
};

/// Requires N ≥ 2 even.
FreeEnergyBracket free_energy_bracket(double gamma, std::int64_t n);

/// Renewal solution F = −½ log(1 − (1 − e^{−γ})²) of e^{−γ} = E_0 e^{−F τ_0}.
/// Throws for γ ≤ 0.
double free_energy_oracle(double gamma);

/// Size of the bracket used to vet the oracle.
inline constexpr std::int64_t kBracketLength = 4096;

/// The oracle when it lies inside free_energy_bracket(γ, n), otherwise the
/// bracket's lower end. 0 for γ ≤ 0.
double certified_free_energy(double gamma, std::int64_t n = kBracketLength);

/// M = 1/F(γ); throws for γ ≤ 0.
double correlation_length(double gamma);

/// P(ξ ≥ t) for a standard normal ξ.
double normal_tail(double t);
/// P(ξ ≥ 1/(4√ε)).
double xi_tail(double eps);

// ---- finite-N constants -----------------------------------------------------

/// Exact SSRW probabilities of the three link sets, minimised over the
/// start window.
struct LinkProbabilities {
  std::int64_t n = 0;
  double forward = 0.0;
  double up = 0.0;
  double down = 0.0;

  double min() const;
};

LinkProbabilities link_probabilities(std::int64_t n);

struct HayatiRow {
  Height x = 0;
  double ratio = 0.0;             // E_x[e^{γL_N} 1_Ω] / E_x[e^{γL_N}]
  double walk_probability = 0.0;  // P_x(Ω)
  bool pass = false;              // ratio ≥ walk_probability
};

struct HayatiReport {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::vector<HayatiRow> rows;
  double epsilon0_hat = 0.0;  // min ratio over the window
  double min_walk_probability = 0.0;
  bool pass = false;
};

/// Ω is the forward link set: box 2√N, end within √N/4 of 0.
HayatiReport hayati_check(double gamma, std::int64_t n);

struct KustoRow {
  Height x = 0;
  double log_lhs = 0.0;  // log E_x e^{γ L_N}
  double log_rhs = 0.0;  // log(½ xi_tail(ε)) + (1−ε) N F_lower
  double log_rhs_certified = 0.0;  // same with the certified F
  bool pass = false;
};

struct KustoReport {
  std::int64_t n = 0;
  double gamma = 0.0;
  double eps = 0.0;
  double f_lower = 0.0;
  double f_certified = 0.0;
  std::vector<KustoRow> rows;
  bool pass = false;
  bool pass_certified = false;
};

/// The right side uses the lower end of free_energy_bracket(γ, kBracketLength).
KustoReport kusto_check(double gamma, double eps, std::int64_t n);

/// Empirical stand-ins for the threshold constants at block length N.
struct PinningConstants {
  std::int64_t n = 0;
  double gamma = 0.0;
  double eps = 0.0;
  double epsilon0_hat = 0.0;
  LinkProbabilities links;
  double xi_tail = 0.0;
  double theta_on = 0.0;   // (ε̂0/4)·xi_tail(ε)
  double theta_off = 0.0;  // ¼ min(Â_f, Â_up, Â_down, 4Θ_on)
};

PinningConstants pinning_constants(double gamma, double eps, std::int64_t n);

struct UpbReport {
  double gamma = 0.0;
  double correlation_length = 0.0;
  std::vector<std::int64_t> lengths;  // round(j·M), j = 1..j_max
  std::vector<double> per_block;      // (log E_0 e^{γL_{jM}} − log j) / j
  double max_per_block = 0.0;
};

/// Requires γ ∈ (0, 1] and j_max·M ≤ 10⁵.
UpbReport upb_check(double gamma, std::int64_t j_max);

// ---- overlap moment (CRL) -----------------------------------------------------

struct CrlReport {
  double beta = 0.0;
  double a = 0.0;
  std::int64_t r = 0;
  double phi = 0.0;
  double value = 0.0;  // E^{⊗2}(e^{2Φ(B_R+1)} − 1)
  bool pass = false;   // value ≤ a
  double p_r = 0.0;    // (2πR)^{−1/2}
  bool geometric_diverges = false;  // (1 − p_R)e^{2Φ} ≥ 1
  double geometric_bound = 0.0;     // p_R e^{2Φ}/(1 − (1−p_R)e^{2Φ}) − 1, when finite
  std::vector<double> tail;         // P(B_R + 1 > k), k = 1..tail.size()
  bool domination_holds = false;    // tail[k−1] ≤ (1 − p_R)^k for all k
};

/// Exact overlap moment at R plus the geometric-domination surrogate for
/// k = 1..k_max. Requires R ≤ 10⁵.
CrlReport crl_check(const DisorderSpec& spec, double beta, double a, std::int64_t r, int k_max = 50);

/// P(B_R ≥ k) = P(k-th visit of the difference walk to 0 by time R), k = 1..k_max.
std::vector<double> overlap_tail(std::int64_t r, int k_max);

struct CrlScan {
  double beta = 0.0;
  double a = 0.0;
  std::int64_t r_max = 0;
  std::vector<double> values;  // index R = 0..r_max
  bool monotone = false;
  std::int64_t largest_passing_r = 0;  // 0 when none passes
  double k5_hat = 0.0;                 // largest_passing_r · β⁴
};

/// Exact overlap moment for every R ≤ r_max in one sweep.
CrlScan crl_k5_scan(const DisorderSpec& spec, double beta, double a, std::int64_t r_max);

}  // namespace dpre
