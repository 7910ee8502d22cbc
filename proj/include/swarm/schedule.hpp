#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "swarm/warnings.hpp"

namespace swarm {

enum class ScheduleKind { constant, linear, quadratic, custom_polynomial };

// Cooling schedule beta(t) = beta0 + rate * t^exponent with an exact
// closed-form derivative. Nondecreasing on [0, inf) by construction
// (beta0 >= 0, rate >= 0, exponent >= 1).
struct CoolingSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  double beta0 = 1.0;
  double rate = 0.0;
  int exponent = 1;

  static CoolingSchedule constant(double beta0) {
    return checked({ScheduleKind::constant, beta0, 0.0, 1});
  }
  static CoolingSchedule linear(double beta0, double rate) {
    return checked({ScheduleKind::linear, beta0, rate, 1});
  }
  static CoolingSchedule quadratic(double beta0, double rate) {
    return checked({ScheduleKind::quadratic, beta0, rate, 2});
  }
  static CoolingSchedule polynomial(double beta0, double rate, int exponent) {
    return checked({ScheduleKind::custom_polynomial, beta0, rate, exponent});
  }

 private:
  static CoolingSchedule checked(CoolingSchedule s) {
    if (!(s.beta0 >= 0.0)) throw std::invalid_argument("CoolingSchedule: beta0 must be >= 0");
    if (!(s.rate >= 0.0)) throw std::invalid_argument("CoolingSchedule: rate must be >= 0");
    if (s.exponent < 1) throw std::invalid_argument("CoolingSchedule: exponent must be >= 1");
    return s;
  }
};

// The theory assumes beta: [0,inf) -> [1,inf) while the experiments start
// at beta0 = 0.25; flagged once per experiment instead of rejected.
inline void warn_if_subunit_beta0(const CoolingSchedule& s) {
  if (s.beta0 < 1.0)
    warn("cooling schedule starts at beta0 = " + std::to_string(s.beta0) +
         " < 1; the theory assumes beta >= 1 but the experiments rely on this regime");
}

inline double beta(const CoolingSchedule& s, double t) {
  if (!(t >= 0.0)) throw std::domain_error("beta: t must be >= 0");
  if (s.kind == ScheduleKind::constant) return s.beta0;
  return s.beta0 + s.rate * std::pow(t, s.exponent);
}

inline double beta_prime(const CoolingSchedule& s, double t) {
  if (!(t >= 0.0)) throw std::domain_error("beta_prime: t must be >= 0");
  if (s.kind == ScheduleKind::constant) return 0.0;
  return s.rate * s.exponent * std::pow(t, s.exponent - 1);
}

}  // namespace swarm
