#pragma once

// Coarse-grained lattice {(I, J): I ≥ 0, 0 ≤ J ≤ I} of blocks of length N,
// inductive open/closed classification from quenched link partition
// functions, optimal and good paths, and the free-energy certificate built
// from an open corridor.
//
// Frame: site (I, J) has its window at time I·N around height J·round(√N).
// Link partition functions use the environment shifted in time only, so the
// defect stays on the line x = 0 and consecutive links telescope exactly into
// the corridor partition function.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpre/disorder.hpp"
#include "dpre/partition.hpp"
#include "dpre/pinning.hpp"
#include "dpre/walk.hpp"

namespace dpre {

struct GeometryOptions {
  std::optional<int> k0;        // default: ⌊K̂9/ε² + 1⌋
  int horizon_i = 30;           // columns 0..horizon_i
  std::optional<int> horizon_j; // default: horizon_i
  std::size_t mem_cap_bytes = std::size_t{1} << 30;
};

/// Thrown when a block length would need more memory than the cap allows.
class MemoryCapExceeded : public std::runtime_error {
 public:
  MemoryCapExceeded(std::int64_t n, std::size_t need, std::size_t cap)
      : std::runtime_error("block length N = " + std::to_string(n) + " needs " + std::to_string(need) +
                           " bytes, above the memory cap of " + std::to_string(cap)),
        n(n), need(need), cap(cap) {}
  std::int64_t n;
  std::size_t need;
  std::size_t cap;
};

/// Bytes used by the largest dense buffer at block length N (the two-walk
/// grid of the second-moment sweep).
std::size_t block_memory_bytes(std::int64_t n);

struct CoarseGeometry {
  DisorderSpec spec;
  PolymerParams params;
  double eps = 0.0;
  double lambda = 0.0;              // Λ(β)
  double free_energy = 0.0;         // certified F(βu)
  double correlation_length = 0.0;  // M = 1/F(βu); 0 for the single-threshold variant
  int k0 = 1;
  double k9_hat = 0.0;
  std::int64_t n = 0;
  BlockScales scales;
  int horizon_i = 0;
  int horizon_j = 0;
  PinningConstants constants;
  double theta_on = 0.0;
  double theta_off = 0.0;
  double log_u_on = 0.0;
  double log_u_off = 0.0;
  bool single_threshold = false;  // every link compared with log_u_off

  bool in_lattice(int i, int j) const { return i >= 0 && i <= horizon_i && j >= 0 && j <= std::min(i, horizon_j); }
  Interval window(int j) const;
  Interval box(int j) const;
  /// Link set from (I, J) to (I+1, J+offset), absolute heights.
  PathConstraint link(int j, int offset) const;
};

/// K̂9 = ε·(−log Θ̂_off) and k0 = ⌊K̂9/ε² + 1⌋.
int default_k0(double theta_off, double eps, double* k9_hat = nullptr);

/// N = k0·M rounded to the nearest even integer (at least 4); thresholds
/// U_on = Θ̂_on e^{(Λ(β)+(1−ε)F(βu))N}, U_off = Θ̂_off e^{Λ(β)N}.
/// Throws for βu ≤ 0 or when N exceeds the memory cap.
CoarseGeometry build_geometry(double beta, double u, double eps, const DisorderSpec& spec,
                              const GeometryOptions& opts = {});

/// Single-threshold variant at u = 0: N = K̂5·β⁻⁴ (even, ≥ 4), one threshold
/// U = Θ̂ e^{Λ(β)N} with Θ̂ = ¼ min(Â_f, Â_up, Â_down).
CoarseGeometry build_gap_geometry(double beta, double eps, const DisorderSpec& spec, double k5_hat,
                                  const GeometryOptions& opts = {});

struct CoarseSite {
  int i = 0;
  int j = 0;
  std::vector<int> optimal_path;   // J_0..J_I of the optimal path to this site
  bool reachable = false;          // the optimal corridor admits some path
  StartMeasure nu;                 // endpoint measure on the window
  std::array<double, 3> log_link{kNegInf, kNegInf, kNegInf};  // index offset+1; down unused at J = 0
  bool open = false;

  double link_value(int offset) const { return log_link[static_cast<std::size_t>(offset + 1)]; }
};

class CoarseLattice {
 public:
  explicit CoarseLattice(CoarseGeometry geom);

  const CoarseGeometry& geometry() const { return geom_; }
  int horizon_i() const { return geom_.horizon_i; }
  int horizon_j() const { return geom_.horizon_j; }
  int column_height(int i) const { return std::min(i, geom_.horizon_j); }
  bool contains(int i, int j) const { return geom_.in_lattice(i, j); }
  const CoarseSite& at(int i, int j) const;
  CoarseSite& at(int i, int j);
  bool is_open(int i, int j) const { return contains(i, j) && at(i, j).open; }
  std::size_t open_count() const;
  std::size_t site_count() const;

 private:
  CoarseGeometry geom_;
  std::vector<std::vector<CoarseSite>> columns_;
};

/// Open flags for columns 0..horizon_i, decided column by column.
CoarseLattice classify_lattice(const Environment& env, const CoarseGeometry& geom);

/// Flags only; used to test path logic on hand-made lattices.
using OpenGrid = std::vector<std::vector<bool>>;  // grid[i][j], j ≤ min(i, horizon_j)
OpenGrid open_grid(const CoarseLattice& lattice);

/// Maximal number of open sites, then lowest in lexicographic order of
/// (J_0, J_1, ...); the pointwise-lowest maximal path whenever one exists.
std::vector<int> optimal_path(const OpenGrid& grid, int target_i, int target_j);
std::vector<int> optimal_path(const CoarseLattice& lattice, int target_i, int target_j);

/// Lowest all-open path from (0,0) to column horizon; empty optional if none.
std::optional<std::vector<int>> good_path(const OpenGrid& grid);
std::optional<std::vector<int>> good_path(const CoarseLattice& lattice);

struct GoodPathCertificate {
  std::int64_t blocks = 0;
  std::int64_t n = 0;
  std::vector<int> path;
  std::int64_t r_l = 0;  // #{I ≤ L: J_{I−1} = J_I = 0}
  double alpha_hat = 0.0;
  double log_corridor_z = 0.0;
  double link_sum = 0.0;  // Σ link log-partitions, each started from the previous exit measure
  double telescoping_error = 0.0;
  double log_threshold_product = 0.0;  // R_L log U_on + (L−R_L) log U_off
  double bound_value = 0.0;            // log_threshold_product / (L·N)
  double free_energy_lower = 0.0;      // log_corridor_z / (L·N)
  double lambda = 0.0;
  double reference = 0.0;  // Λ(β) + (1−3ε)F(βu)
  double theta0 = 0.0;     // −(α̂ log Θ̂_on + (1−α̂) log Θ̂_off)
  double log_u_on = 0.0;
  double log_u_off = 0.0;
  bool telescoping_holds = false;  // error ≤ 1e-8
  bool threshold_holds = false;    // log_corridor_z ≥ log_threshold_product
  bool samepath_holds = false;     // every recorded optimal path is a prefix of `path`
};

/// Throws std::invalid_argument if a path site is closed or the path leaves
/// the lattice.
GoodPathCertificate certificate(const Environment& env, const CoarseLattice& lattice, const std::vector<int>& path);

/// The corridor of the path from (0,0): one segment per block.
Corridor path_corridor(const CoarseGeometry& geom, const std::vector<int>& path);

struct SecondMomentReport {
  double ratio = 0.0;      // Var_Q Z / (E_Q Z)²
  double threshold = 0.0;  // ε/8 on the axis, ε/12 off it
  bool pass = false;
  double k6_hat = 0.0;     // min-window P(Ω^g)
  double k7_hat = 0.0;     // E_0 e^{2βu(L_m+1)}, m = ⌈N/k0⌉
  double pair_mgf = 0.0;   // E^{⊗2} e^{2Φ(B_m+1)}
  double bound = 0.0;      // K̂6⁻² K̂7^{k0} (pair_mgf^{k0} − 1)^{1/2}
};

/// Exact conditional variance ratio of the link partition function of a
/// site given its endpoint measure.
SecondMomentReport second_moment_ratio(const CoarseGeometry& geom, const CoarseSite& site, int offset);
SecondMomentReport second_moment_ratio(const CoarseGeometry& geom, int j, const StartMeasure& nu, int offset);

/// One environment through the whole pipeline: classification, lowest good
/// path, its certificate, and the second-moment ratio of every link on it.
struct CoarseSample {
  CoarseLattice lattice;
  std::optional<std::vector<int>> path;
  std::optional<GoodPathCertificate> cert;
  std::size_t second_moment_links = 0;
  std::size_t second_moment_passes = 0;
  double second_moment_max_ratio = 0.0;
  std::optional<SecondMomentReport> first_link;  // (0,0) forward, for K̂6 and K̂7

  bool beats_lambda() const { return cert && cert->free_energy_lower > cert->lambda; }
};

CoarseSample coarse_sample(const Environment& env, const CoarseGeometry& geom, bool second_moment = true);

struct GapCertificate {
  CoarseGeometry geometry;
  std::optional<GoodPathCertificate> cert;
  double theta = 0.0;
  double gap_bound = 0.0;          // log(1/Θ̂)/N
  double free_energy_bound = 0.0;  // Λ(β) − gap_bound
};

GapCertificate gap_certificate(const Environment& env, double beta, double eps, double k5_hat,
                               const GeometryOptions& opts = {});

}  // namespace dpre
