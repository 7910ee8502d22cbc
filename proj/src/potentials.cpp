#include "swarm/potentials.hpp"

#include <stdexcept>

namespace swarm {

double double_well_1d(double x) {
  if (x <= -6.0) return -12.0 * x - 52.0;
  if (x < -2.0) return 2.0 * (x + 3.0) * (x + 3.0) + 2.0;
  if (x <= 2.0) return 8.0 - x * x;
  if (x <= 6.0) return (x - 4.0) * (x - 4.0);
  return 4.0 * x - 20.0;
}

double double_well_1d_grad(double x) {
  if (x <= -6.0) return -12.0;
  if (x < -2.0) return 4.0 * (x + 3.0);
  if (x <= 2.0) return -2.0 * x;
  if (x <= 6.0) return 2.0 * (x - 4.0);
  return 4.0;
}

double six_hump_camel(double x1, double x2) {
  const double x1s = x1 * x1;
  const double x2s = x2 * x2;
  return (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (4.0 * x2s - 4.0) * x2s + 1.0316;
}

Eigen::Vector2d six_hump_camel_grad(double x1, double x2) {
  const double x1s = x1 * x1;
  const double x2s = x2 * x2;
  return {8.0 * x1 - 8.4 * x1s * x1 + 2.0 * x1s * x1s * x1 + x2,
          x1 + 16.0 * x2s * x2 - 8.0 * x2};
}

Potential make_double_well() {
  Potential p;
  p.name = "double_well";
  p.dim = 1;
  p.eval = [](const Eigen::VectorXd& x) { return double_well_1d(x[0]); };
  p.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(1);
    g[0] = double_well_1d_grad(x[0]);
    return g;
  };
  Eigen::VectorXd xstar(1);
  xstar[0] = 4.0;
  p.global_minima = {{xstar, 0.0}};
  p.box_lo = Eigen::VectorXd::Constant(1, -8.0);
  p.box_hi = Eigen::VectorXd::Constant(1, 8.0);
  return p;
}

Potential make_six_hump_camel() {
  Potential p;
  p.name = "six_hump_camel";
  p.dim = 2;
  p.eval = [](const Eigen::VectorXd& x) { return six_hump_camel(x[0], x[1]); };
  p.grad = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return six_hump_camel_grad(x[0], x[1]);
  };
  p.global_minima = {{Eigen::Vector2d(0.0898, -0.7126), 0.0},
                     {Eigen::Vector2d(-0.0898, 0.7126), 0.0}};
  p.box_lo = Eigen::Vector2d(-3.0, -2.0);
  p.box_hi = Eigen::Vector2d(3.0, 2.0);
  return p;
}

const Potential& potential_by_name(std::string_view name) {
  static const Potential double_well = make_double_well();
  static const Potential camel = make_six_hump_camel();
  if (name == "double_well") return double_well;
  if (name == "six_hump_camel") return camel;
  throw std::invalid_argument("unknown potential: " + std::string(name));
}

Eigen::VectorXd eval_rows(const Potential& pot, const Eigen::MatrixXd& positions) {
  Eigen::VectorXd u(positions.rows());
  for (Eigen::Index i = 0; i < positions.rows(); ++i) u[i] = pot.eval(positions.row(i));
  return u;
}

}  // namespace swarm
