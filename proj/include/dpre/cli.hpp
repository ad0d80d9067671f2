#pragma once

// Command-line front end. Every run is a function of RunConfig alone: the
// resolved configuration is written next to the outputs as config.ini and
// passing it back through --config reproduces the CSV files byte for byte.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dpre {

inline constexpr const char* kSubcommands[] = {"validate",      "pinning",   "free-energy", "coarse-grain",
                                               "lipschitz",     "gap-scan",  "critical-scan"};

struct RunConfig {
  std::string subcommand;
  std::string disorder = "gaussian";
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::string out = "dpre-out";
  unsigned threads = 1;
  std::size_t mem_cap = std::size_t{1} << 30;  // bytes

  std::vector<double> beta{0.5};
  std::vector<double> u{1.0};
  std::vector<double> eps{0.3};
  std::vector<double> gamma{0.5};
  std::vector<std::int64_t> n;  // empty: the subcommand default, resolved before the run

  // validate
  int instances = 50;
  // pinning
  bool checks = false;  // Hayati/kusto/UPB tables at check_n
  std::vector<std::int64_t> check_n{64, 256};
  std::int64_t crl_r_max = 0;  // 0: no overlap-moment scan
  double crl_a = 0.5;
  // coarse-grain and critical-scan
  int k0 = 0;  // 0: default from K̂9
  int horizon = 30;
  bool lattice = false;  // coarse-grain: also write lattice.csv
  std::size_t cert_seeds = 0;  // critical-scan certificate column
  // lipschitz
  double p = 0.98;
  int columns = 2000;
  int heights = 64;
};

/// Default N list of a subcommand.
std::vector<std::int64_t> default_lengths(const std::string& subcommand);

/// Fills the subcommand defaults in place.
void resolve(RunConfig& config);

/// Human-readable reason naming the offending field, or nullopt when valid.
std::optional<std::string> check_config(const RunConfig& config);

/// key = value text accepted by --config.
std::string to_config_text(const RunConfig& config);

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidConfig = 2,
  kExitMemoryCap = 3,
  kExitIo = 4,
};

/// Runs a validated config; writes <out>/manifest.json, <out>/config.ini and
/// the subcommand tables. Progress goes to `log`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv (CLI11, plus an optional key = value file via --config where
/// flags win), validates and runs.
int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace dpre
