#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swarm {

// Benchmark objective with analytic gradient and minimizer metadata.
// eval is nonnegative on domain_box; gradients are exact (custom
// potentials are supplied as code, never parsed expressions).
struct Potential {
  std::string name;
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::vector<std::pair<Eigen::VectorXd, double>> global_minima;
  Eigen::VectorXd box_lo, box_hi;
};

// Piecewise double well with global minimum at x = 4 and a local minimum
// at x = -3, continuous at the knots {-6, -2, 2, 6}.
double double_well_1d(double x);
// One-sided gradient convention at the knots: the branch whose inequality
// is closed at that knot wins.
double double_well_1d_grad(double x);

// Shifted six-hump camel; the two global minima at +-(0.0898, -0.7126)
// take the value 0 up to the published rounding of the shift.
double six_hump_camel(double x1, double x2);
Eigen::Vector2d six_hump_camel_grad(double x1, double x2);

Potential make_double_well();
Potential make_six_hump_camel();

// Registered names: "double_well", "six_hump_camel".
const Potential& potential_by_name(std::string_view name);

// U evaluated on each row of an n x d position matrix.
Eigen::VectorXd eval_rows(const Potential& pot, const Eigen::MatrixXd& positions);

}  // namespace swarm
