#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>

#include "swarm/density.hpp"
#include "swarm/potentials.hpp"
#include "swarm/schedule.hpp"

namespace swarm {

enum class CMethod { empirical, quadrature };

// Fitted normalization constant together with the defect left at the
// solution; |residual| <= solver tolerance. The empirical estimator keeps
// C >= 0 (its defect at C = 0 is never positive for nonnegative U); the
// quadrature oracle may return C < 0 at small beta on boxes of volume > 1.
struct CState {
  double C = 0.0;
  double t = 0.0;
  CMethod method = CMethod::empirical;
  double residual = 0.0;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor trapezoid grid over a 1D interval or 2D box; quadrature is a
// test oracle, dimensions above 2 are unsupported.
struct QuadGrid {
  Eigen::MatrixXd points;   // q x d
  Eigen::VectorXd weights;  // q
};

QuadGrid tensor_grid_1d(double lo, double hi, int n);
QuadGrid tensor_grid_2d(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny);
// Covers pot.domain_box with points_per_dim nodes per axis.
QuadGrid tensor_grid(const Potential& pot, int points_per_dim);

// Root of C -> mean_i rho(U(X_i); C) - 1 on [0, max_i U(X_i) + 1], the
// upper endpoint doubling on sign failure. base.C is ignored. A finite
// warm_start (the previous C) is tried first as the center of a narrow
// bracket; the root is unique either way since the defect is strictly
// increasing in C.
CState estimate_C_empirical(const Eigen::VectorXd& pot_values, DensityParams base, double tol,
                            int max_expansions = 60, double t = 0.0,
                            double warm_start = std::numeric_limits<double>::quiet_NaN());
CState estimate_C_empirical(const Eigen::MatrixXd& particles, const Potential& pot,
                            DensityParams base, double tol, int max_expansions = 60,
                            double t = 0.0);

// Root of C -> integral of rho(U(x); C) over the grid - 1 (trapezoid).
CState fit_C_quadrature(const Potential& pot, DensityParams base, const QuadGrid& grid,
                        double tol, double t = 0.0);

// Empirical coarse derivative
//   C'(t) ~= (beta'(t)/beta(t)) * sum_i (U_i - C) a_i / sum_i a_i,
// with a evaluated at beta(t) and the C carried in p.
double coarse_C_derivative(const Eigen::VectorXd& pot_values, const DensityParams& p,
                           const CoolingSchedule& s, double t);
double coarse_C_derivative(const Eigen::MatrixXd& particles, const Potential& pot,
                           const DensityParams& p, const CoolingSchedule& s, double t);

// Quadrature analogue of the coarse derivative: the rho^a-weighted
// expectation evaluated by trapezoid rule (p.C must be fitted at t).
double cprime_quadrature(const Potential& pot, const DensityParams& p, const CoolingSchedule& s,
                         double t, const QuadGrid& grid);

// Euler prediction C + h * cprime, clamped at 0 with a warning when the
// coarse step undershoots.
double predict_C(double C, double cprime, double h);

}  // namespace swarm
