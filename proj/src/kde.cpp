#include "swarm/kde.hpp"

#include <cmath>
#include <numbers>

namespace swarm {

Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Eigen::VectorXd h(d);
  if (n < 2) {
    h.setOnes();
    return h;
  }
  const double factor =
      std::pow(4.0 / ((d + 2.0) * static_cast<double>(n)), 1.0 / (d + 4.0));
  const Eigen::RowVectorXd mean = points.colwise().mean();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = (points.col(j).array() - mean[j]).square().sum() / (n - 1.0);
    const double sigma = std::sqrt(var);
    h[j] = sigma > 0.0 ? sigma * factor : 1.0;
  }
  return h;
}

Eigen::VectorXd kde_self_density(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const Eigen::VectorXd h = silverman_bandwidth(points);
  const double norm =
      1.0 / (static_cast<double>(n) * std::pow(2.0 * std::numbers::pi, 0.5 * d) * h.prod());

  // (s_i - s_k)^2 = s_i^2 + s_k^2 - 2 s_i s_k, accumulated per coordinate
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::VectorXd scaled = points.col(j) / h[j];
    const Eigen::VectorXd s2 = scaled.array().square();
    sq.noalias() -= 2.0 * scaled * scaled.transpose();
    sq.colwise() += s2;
    sq.rowwise() += s2.transpose();
  }
  return norm * (-0.5 * sq.array()).exp().matrix().rowwise().sum();
}

}  // namespace swarm
