#include "swarm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "swarm/density.hpp"
#include "swarm/normalization.hpp"
#include "swarm/potentials.hpp"
#include "swarm/rng.hpp"
#include "swarm/scalar_math.hpp"
#include "swarm/transport.hpp"

namespace swarm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_lambert(std::vector<CheckResult>& out) {
  double worst = 0.0;
  for (int k = -8; k <= 8; ++k) {
    const double x = std::pow(10.0, k);
    const double w = lambert_w0(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, x));
  }
  out.push_back({"lambert/residual-10^k", worst <= 1e-12, "max residual " + fmt(worst)});

  double worst_id = 0.0;
  for (double m : {0.25, 0.5, 1.0, 2.0, 5.0})
    worst_id = std::max(worst_id, std::abs(lambert_w0(m * std::exp(m)) - m) / m);
  out.push_back({"lambert/identity", worst_id <= 1e-12, "max relative error " + fmt(worst_id)});

  double worst_exp = 0.0;
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 280; ++i) {
    const double z = -700.0 + 5.0 * i;
    const double w = lambert_w0_exp(z);
    if (w <= prev) monotone = false;
    prev = w;
    const double ez = std::exp(z);
    if (std::isfinite(ez) && ez > 0.0)
      worst_exp = std::max(worst_exp, std::abs(w - lambert_w0(ez)) / std::max(w, 1e-300));
  }
  out.push_back({"lambert/exp-agreement", worst_exp <= 1e-10,
                 "max relative gap " + fmt(worst_exp)});
  out.push_back({"lambert/exp-monotone", monotone, monotone ? "increasing" : "violated"});
}

void check_weak_convergence(std::vector<CheckResult>& out) {
  const Potential pot = make_double_well();
  const QuadGrid grid = tensor_grid_1d(-8.0, 8.0, 40001);
  const Eigen::VectorXd u = eval_rows(pot, grid.points);

  std::vector<double> outside, local;
  for (double b : {10.0, 100.0, 1000.0}) {
    DensityParams p{2.0, b, 0.0, 1};
    p.C = fit_C_quadrature(pot, p, grid, 1e-10).C;
    double mass_out = 0.0, mass_local = 0.0;
    for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
      const double x = grid.points(i, 0);
      const double r = grid.weights[i] * rho(p, u[i]);
      const bool near_global = x >= 3.0 && x <= 5.0;
      const bool near_local = x >= -4.0 && x <= -2.0;
      if (!near_global && !near_local) mass_out += r;
      if (near_local) mass_local += r;
    }
    outside.push_back(mass_out);
    local.push_back(mass_local);
  }
  const bool dec_out = outside[0] > outside[1] && outside[1] > outside[2];
  const bool dec_local = local[0] > local[1] && local[1] > local[2];
  out.push_back({"weak-convergence/mass-outside",
                 dec_out && outside[2] < 0.01,
                 "beta {10,100,1000} -> {" + fmt(outside[0]) + ", " + fmt(outside[1]) + ", " +
                     fmt(outside[2]) + "}"});
  out.push_back({"weak-convergence/local-min-mass",
                 dec_local && local[2] < 0.01,
                 "beta {10,100,1000} -> {" + fmt(local[0]) + ", " + fmt(local[1]) + ", " +
                     fmt(local[2]) + "}"});
}

void check_gibbs_limit(std::vector<CheckResult>& out) {
  std::vector<double> sups;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const DensityParams p{1.0 + eps, 1.0, 0.0, 2};
    double sup = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double u = 10.0 * i / 99.0;
      sup = std::max(sup, std::abs(rho(p, u) - std::exp(-u)));
    }
    sups.push_back(sup);
  }
  const bool ok = sups[0] > sups[1] && sups[1] > sups[2] && sups[2] < 5e-3;
  out.push_back({"gibbs-limit/sup-norm", ok,
                 "eps {1e-2,1e-3,1e-4} -> {" + fmt(sups[0]) + ", " + fmt(sups[1]) + ", " +
                     fmt(sups[2]) + "}"});
}

void check_cprime(std::vector<CheckResult>& out) {
  const Potential pot = make_double_well();
  const CoolingSchedule s = CoolingSchedule::quadratic(0.25, 25.0);
  const QuadGrid grid = tensor_grid_1d(-8.0, 8.0, 20001);
  const double delta = 1e-3;
  bool all_ok = true;
  std::string detail;
  for (double t : {0.2, 0.5, 0.8}) {
    DensityParams p{2.0, beta(s, t), 0.0, 1};
    p.C = fit_C_quadrature(pot, p, grid, 1e-11, t).C;
    const double analytic = cprime_quadrature(pot, p, s, t, grid);
    DensityParams pm{2.0, beta(s, t - delta), 0.0, 1};
    DensityParams pp{2.0, beta(s, t + delta), 0.0, 1};
    const double cm = fit_C_quadrature(pot, pm, grid, 1e-11, t - delta).C;
    const double cp = fit_C_quadrature(pot, pp, grid, 1e-11, t + delta).C;
    const double fd = (cp - cm) / (2.0 * delta);
    const double rel = std::abs(analytic - fd) / std::abs(fd);
    all_ok = all_ok && rel <= 0.01;
    detail += "t=" + fmt(t) + ": rel " + fmt(rel) + "  ";
  }
  out.push_back({"cprime/finite-difference", all_ok, detail});
}

// 1D oracle: the monotone coupling on sorted points is optimal for the
// squared-distance cost.
double monotone_cost_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  double cost = 0.0;
  Eigen::Index i = 0, j = 0;
  double supply = 1.0, demand = static_cast<double>(n) * w[order[0]];
  while (i < n && j < n) {
    const double f = std::min(supply, demand);
    const double dx = x[order[i]] - x[order[j]];
    cost += f * dx * dx;
    supply -= f;
    demand -= f;
    if (supply <= 1e-15) {
      ++i;
      supply = 1.0;
    }
    if (demand <= 1e-15) {
      ++j;
      demand = (j < n) ? static_cast<double>(n) * w[order[j]] : 0.0;
    }
  }
  return cost;
}

void check_transport(std::vector<CheckResult>& out) {
  RngStream rng = make_stream(20240901, 7);
  double worst_gap = 0.0, worst_marginal = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(60));
    Eigen::MatrixXd x(n, 1);
    for (int i = 0; i < n; ++i) x(i, 0) = 4.0 * rng.uniform() - 2.0;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform();
    w /= w.sum();
    const TransportPlan plan = solve_discrete_ot(x, w);
    worst_gap = std::max(worst_gap, std::abs(plan.cost - monotone_cost_1d(x.col(0), w)));
    const double row = (plan.G.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col =
        (plan.G.colwise().sum().transpose() - static_cast<double>(n) * w).cwiseAbs().maxCoeff();
    worst_marginal = std::max({worst_marginal, row, col});
  }
  out.push_back({"transport/1d-monotone-cost", worst_gap <= 1e-9,
                 "max cost gap " + fmt(worst_gap)});
  out.push_back({"transport/marginals", worst_marginal <= 1e-9,
                 "max violation " + fmt(worst_marginal)});

  // uniform target weights fix the identity plan and zero velocities
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 1, 0, 0, 1, 2, 2;
  const Eigen::VectorXd uni = Eigen::VectorXd::Constant(4, 0.25);
  const TransportPlan plan = solve_discrete_ot(pts, uni);
  const double dev = (plan.G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff();
  out.push_back({"transport/fixed-point", dev <= 1e-12 && plan.cost <= 1e-12,
                 "identity deviation " + fmt(dev)});
}

}  // namespace

std::vector<CheckResult> run_validation_suite(const std::string& name) {
  std::vector<CheckResult> out;
  bool known = false;
  if (name == "lambert" || name == "all") {
    check_lambert(out);
    known = true;
  }
  if (name == "weak-convergence" || name == "all") {
    check_weak_convergence(out);
    known = true;
  }
  if (name == "gibbs-limit" || name == "all") {
    check_gibbs_limit(out);
    known = true;
  }
  if (name == "cprime" || name == "all") {
    check_cprime(out);
    known = true;
  }
  if (name == "transport" || name == "all") {
    check_transport(out);
    known = true;
  }
  if (!known) throw std::invalid_argument("unknown validation suite: " + name);
  return out;
}

}  // namespace swarm
