#pragma once

#include <cmath>
#include <stdexcept>

#include "swarm/scalar_math.hpp"

namespace swarm {

// Parameters of the swarm invariant density
//   rho(u) = ( W_0( m e^m e^{-kappa (m-1) beta (u - C)} ) / m )^{1/(m-1)}.
// kappa = 1 is the exponent driven by the dynamics; kappa = 2 is the
// variant whose m -> 1 limit is the Gibbs density e^{-beta (u - C)}.
struct DensityParams {
  double m = 2.0;
  double beta = 1.0;
  double C = 0.0;
  int kappa = 1;
};

inline void validate(const DensityParams& p) {
  if (!(p.m > 1.0)) throw std::invalid_argument("DensityParams: m must be > 1");
  if (!(p.beta > 0.0)) throw std::invalid_argument("DensityParams: beta must be > 0");
  if (p.kappa != 1 && p.kappa != 2)
    throw std::invalid_argument("DensityParams: kappa must be 1 or 2");
}

// ln g(u) with g = m e^m e^{-kappa (m-1) beta (u - C)}; evaluated purely
// in log space so large beta * |u - C| never overflows.
inline double log_g(const DensityParams& p, double u) {
  return std::log1p(p.m - 1.0) + p.m - p.kappa * (p.m - 1.0) * p.beta * (u - p.C);
}

// ln rho(u). Uses ln W_0(e^z) = z - W_0(e^z), so no logarithm of a
// denormal is ever taken.
inline double log_rho(const DensityParams& p, double u) {
  const double z = log_g(p, u);
  const double w = lambert_w0_exp(z);
  return ((z - w) - std::log1p(p.m - 1.0)) / (p.m - 1.0);
}

inline double rho(const DensityParams& p, double u) { return std::exp(log_rho(p, u)); }

// a(u) = 1 / (1 + W_0(g(u))), the reweighting factor in the C'(t) formula;
// strictly inside (0,1) and increasing in u.
inline double weight_a(const DensityParams& p, double u) {
  return 1.0 / (1.0 + lambert_w0_exp(log_g(p, u)));
}

// Density-dependent diffusion modulation alpha(r) = 1 + r^{m-1}.
inline double alpha_mod(double r, double m) {
  if (!(r >= 0.0)) throw std::domain_error("alpha_mod: r must be >= 0");
  if (r == 0.0) return 1.0;
  return 1.0 + std::pow(r, m - 1.0);
}

// e^{-beta u}, underflow-guarded.
inline double gibbs_unnormalized(double beta, double u) {
  const double e = -beta * u;
  return e < -700.0 ? 0.0 : std::exp(e);
}

}  // namespace swarm
