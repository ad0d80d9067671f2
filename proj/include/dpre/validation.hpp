#pragma once

// Transfer-matrix engines against brute-force enumeration on random
// instances: small single-walk lengths (N ≤ 12) and pair lengths (N ≤ 8).

#include <cstdint>
#include <string>
#include <vector>

namespace dpre {

struct OracleRow {
  std::string engine;
  int instances = 0;
  double max_abs_error = 0.0;  // over finite values
  int infinity_mismatches = 0;  // one side −inf, the other finite
  bool pass = false;
};

struct OracleSuiteReport {
  double tolerance = 1e-9;
  std::vector<OracleRow> rows;
  bool pass = false;
};

OracleSuiteReport run_oracle_suite(std::uint64_t seed, int instances = 50, double tolerance = 1e-9);

}  // namespace dpre
