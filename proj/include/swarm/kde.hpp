#pragma once

#include <Eigen/Dense>

namespace swarm {

// Silverman's rule per dimension: h_j = sigma_j * (4 / ((d+2) n))^{1/(d+4)}.
// Falls back to 1 when the sample is a single point or has zero spread.
Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& points);

// Gaussian product-kernel density of the sample evaluated at its own
// points (self-kernel included).
Eigen::VectorXd kde_self_density(const Eigen::MatrixXd& points);

}  // namespace swarm
