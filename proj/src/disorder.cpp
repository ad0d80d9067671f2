#include "dpre/disorder.hpp"

#include <stdexcept>

namespace dpre {

namespace {

// log cosh t without overflow.
double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log(sinh t / t), with the t → 0 limit.
double log_sinhc(double t) {
  const double a = std::abs(t);
  if (a < 1e-2) {
    const double a2 = a * a;
    return a2 * (1.0 / 6.0 + a2 * (-1.0 / 180.0 + a2 * (1.0 / 2835.0 - a2 / 37800.0)));
  }
  if (a < 20.0) return std::log(std::sinh(a) / a);
  return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0) - std::log(a);
}

}  // namespace

std::string DisorderSpec::name() const {
  switch (family) {
    case DisorderFamily::gaussian:
      return "gaussian";
    case DisorderFamily::rademacher:
      return "rademacher";
    case DisorderFamily::uniform:
      return "uniform";
  }
  return "gaussian";
}

DisorderSpec DisorderSpec::parse(std::string_view name) {
  if (name == "gaussian") return {DisorderFamily::gaussian};
  if (name == "rademacher") return {DisorderFamily::rademacher};
  if (name == "uniform") return {DisorderFamily::uniform};
  throw std::invalid_argument("unknown disorder family '" + std::string(name) +
                              "' (expected gaussian, rademacher or uniform)");
}

double cumulant(const DisorderSpec& spec, double beta) {
  switch (spec.family) {
    case DisorderFamily::gaussian:
      return 0.5 * beta * beta;
    case DisorderFamily::rademacher:
      return log_cosh(beta);
    case DisorderFamily::uniform:
      return log_sinhc(std::sqrt(3.0) * beta);
  }
  return 0.0;
}

double overlap_coupling(const DisorderSpec& spec, double beta) {
  return cumulant(spec, 2.0 * beta) - 2.0 * cumulant(spec, beta);
}

}  // namespace dpre
