#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "swarm/density.hpp"
#include "swarm/potentials.hpp"

namespace swarm {

// Empirical measure sum_i weights[i] * delta_{points.row(i)}.
struct WeightedSample {
  Eigen::MatrixXd points;   // n x d
  Eigen::VectorXd weights;  // n, nonnegative, sums to 1
};

// Coupling for min <C,G> s.t. G 1 = 1, G^T 1 = n w, G >= 0 with the
// squared-Euclidean cost C_ij = |X_i - X_j|^2.
struct TransportPlan {
  Eigen::MatrixXd G;
  double cost = 0.0;
};

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Self-normalized importance weights between two parameterizations of the
// swarm density, computed in log space with a max shift. Both parameter
// sets must share m and kappa.
Eigen::VectorXd importance_weights(const Eigen::VectorXd& pot_values, const DensityParams& now,
                                   const DensityParams& next);
Eigen::VectorXd importance_weights(const Eigen::MatrixXd& particles, const Potential& pot,
                                   const DensityParams& now, const DensityParams& next);

// Gibbs-curve variant used by controlled simulated annealing:
// w_i ~ e^{-(beta_next - beta_now) U_i}, independent of any normalization
// constant.
Eigen::VectorXd gibbs_importance_weights(const Eigen::VectorXd& pot_values, double beta_now,
                                         double beta_next);

// Exact solution of the discrete transport LP by a network-simplex method
// on the complete bipartite graph; deterministic for fixed inputs.
TransportPlan solve_discrete_ot(const Eigen::MatrixXd& points,
                                const Eigen::VectorXd& target_weights, double tol = 1e-9);

// V_i = (sum_j G_ij X_j - X_i) / h.
Eigen::MatrixXd barycentric_velocity(const TransportPlan& plan, const Eigen::MatrixXd& points,
                                     double h);

// 1 / sum_i w_i^2, in [1, n] for normalized weights.
double effective_sample_size(const Eigen::VectorXd& weights);

}  // namespace swarm
