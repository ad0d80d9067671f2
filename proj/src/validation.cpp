#include "dpre/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dpre/oracle.hpp"
#include "dpre/partition.hpp"

namespace dpre {

namespace {

struct Instance {
  Environment env;
  PolymerParams params;
  PathConstraint constraint;
  StartMeasure start;
};

// Random disorder family, (β, u), constraint shape and start measure.
Instance random_instance(std::mt19937_64& rng, std::int64_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DisorderFamily families[] = {DisorderFamily::gaussian, DisorderFamily::rademacher, DisorderFamily::uniform};
  Instance c;
  c.env = Environment(DisorderSpec{families[rng() % 3]}, rng());
  c.params = {1.5 * unit(rng), 3.0 * unit(rng) - 1.0};
  c.constraint = PathConstraint::unconstrained(n);
  switch (rng() % 4) {
    case 1:
      c.constraint.box = Interval::centered(0, 3);
      break;
    case 2:
      c.constraint.start_window = Interval::centered(0, 2);
      c.constraint.box = Interval{-2, 5};
      c.constraint.end_window = Interval{-1, 3};
      break;
    case 3:
      c.constraint.end_point = static_cast<Height>(n % 2 == 0 ? 2 : 1);
      break;
    default:
      break;
  }
  if (rng() % 2 == 0) {
    c.start = StartMeasure::delta(0);
  } else {
    c.start = StartMeasure::from_weights(-1, {unit(rng) + 0.01, unit(rng) + 0.01, unit(rng) + 0.01});
    if (c.constraint.start_window.bounded()) c.constraint.start_window = Interval::centered(0, 2);
  }
  return c;
}

class Tally {
 public:
  explicit Tally(std::string engine) { row_.engine = std::move(engine); }
  void add(double dp, double bf) {
    if (std::isinf(dp) || std::isinf(bf)) {
      if (dp != bf) ++row_.infinity_mismatches;
    } else {
      row_.max_abs_error = std::max(row_.max_abs_error, std::abs(dp - bf));
    }
  }
  void next() { ++row_.instances; }
  OracleRow finish(double tol, int required) {
    row_.pass = row_.instances >= required && row_.infinity_mismatches == 0 && row_.max_abs_error <= tol;
    return row_;
  }

 private:
  OracleRow row_;
};

}  // namespace

OracleSuiteReport run_oracle_suite(std::uint64_t seed, int instances, double tolerance) {
  OracleSuiteReport rep;
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);

  Tally quenched("quenched_log_partition");
  Tally annealed("annealed_log_mgf");
  Tally column("quenched_endpoint_column");
  Tally pair("pair_overlap_log_mgf");
  Tally second("pair_constrained_second_moment");

  for (int t = 0; t < instances; ++t) {
    const std::int64_t n = 1 + t % 12;
    const Instance c = random_instance(rng, n);
    quenched.next();
    quenched.add(quenched_log_partition(c.env, c.params, c.constraint, c.start),
                 oracle::quenched_log_partition(c.env, c.params, c.constraint, c.start));

    const double gamma = c.params.beta * c.params.u;
    annealed.next();
    annealed.add(annealed_log_mgf(gamma, c.constraint, c.start), oracle::annealed_log_mgf(gamma, c.constraint, c.start));

    const LogColumn dp = quenched_endpoint_column(c.env, c.params, c.constraint, c.start);
    const LogColumn bf = oracle::quenched_endpoint_column(c.env, c.params, c.constraint, c.start);
    column.next();
    for (Height x = -n - 2; x <= n + 2; ++x) column.add(dp.log_at(x), bf.log_at(x));

    const std::int64_t m = 1 + t % 8;
    const Height x1 = static_cast<Height>(rng() % 5) - 2;
    const Height x2 = static_cast<Height>(rng() % 5) - 2;
    pair.next();
    pair.add(pair_overlap_log_mgf(gamma, m, x1, x2), oracle::pair_overlap_log_mgf(gamma, m, x1, x2));

    const Instance p = random_instance(rng, m);
    const auto sm = pair_constrained_second_moment(p.env.spec(), p.params, p.constraint, p.start);
    const auto sb = oracle::pair_constrained_second_moment(p.env.spec(), p.params, p.constraint, p.start);
    second.next();
    second.add(sm.log_mean, sb.log_mean);
    second.add(sm.log_second, sb.log_second);
  }
  for (Tally* t : {&quenched, &annealed, &column, &pair, &second}) rep.rows.push_back(t->finish(tolerance, instances));
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const OracleRow& r) { return r.pass; });
  return rep;
}

}  // namespace dpre
