#include "swarm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "swarm/warnings.hpp"

namespace swarm {

namespace {

struct BasicArc {
  int src;      // source index in [0, n)
  int snk;      // sink index in [0, n)
  double flow;  // >= 0
};

// Network simplex on the complete bipartite transportation graph:
// n sources with unit supply, n sinks with demand[j] (sums to n).
// The basis is a spanning tree held as 2n-1 arcs; the initial basis comes
// from the northwest-corner rule. Entering arcs are chosen by a block
// search with a persistent cursor (deterministic); if the pivot count
// stalls on a degenerate instance the solve restarts under Bland's rule,
// which cannot cycle.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::MatrixXd& cost, Eigen::VectorXd demand)
      : n_(static_cast<int>(cost.rows())),
        nodes_(2 * n_),
        cost_(cost),
        demand_(std::move(demand)) {
    const double cmax = cost_.size() ? cost_.maxCoeff() : 0.0;
    eps_ = std::max(1e-12, 1e-14 * cmax * n_);
    parent_.resize(nodes_);
    parent_arc_.resize(nodes_);
    depth_.resize(nodes_);
    pot_.resize(nodes_);
    head_.resize(nodes_);
    next_.resize(2 * (nodes_ - 1));
    slot_arc_.resize(2 * (nodes_ - 1));
  }

  void run() {
    northwest_start();
    if (n_ == 1) return;
    const long soft_cap = 1000L + 50L * n_;
    const long hard_cap = 50'000'000L;
    bool bland = false;
    cursor_ = 0;
    for (long iters = 0;; ++iters) {
      rebuild_tree();
      const long e = bland ? entering_bland() : entering_block();
      if (e < 0) break;
      apply_pivot(e, bland);
      if (!bland && iters >= soft_cap) {
        northwest_start();
        bland = true;
      }
      if (iters > hard_cap)
        throw TransportError("solve_discrete_ot: simplex failed to terminate");
    }
  }

  const std::vector<BasicArc>& arcs() const { return arcs_; }

 private:
  void northwest_start() {
    arcs_.clear();
    arcs_.reserve(nodes_ - 1);
    Eigen::VectorXd d_rem = demand_;
    int i = 0, j = 0;
    double s_rem = 1.0;
    while (true) {
      const bool last = (i == n_ - 1 && j == n_ - 1);
      const double f = last ? s_rem : std::min(s_rem, d_rem[j]);
      arcs_.push_back({i, j, f});
      s_rem -= f;
      d_rem[j] -= f;
      if (last) break;
      if (j == n_ - 1) {
        ++i;
        s_rem = 1.0;
      } else if (i == n_ - 1) {
        ++j;
      } else if (s_rem <= d_rem[j]) {
        ++i;
        s_rem = 1.0;
      } else {
        ++j;
      }
    }
  }

  // Adjacency + DFS from node 0: parents, depths and dual potentials.
  // Basic arcs have zero reduced cost, so pot[other] = c(arc) - pot[v].
  void rebuild_tree() {
    std::fill(head_.begin(), head_.end(), -1);
    int slot = 0;
    for (int a = 0; a < static_cast<int>(arcs_.size()); ++a) {
      const int u = arcs_[a].src;
      const int v = n_ + arcs_[a].snk;
      next_[slot] = head_[u];
      slot_arc_[slot] = a;
      head_[u] = slot++;
      next_[slot] = head_[v];
      slot_arc_[slot] = a;
      head_[v] = slot++;
    }
    std::fill(parent_.begin(), parent_.end(), -2);
    parent_[0] = -1;
    parent_arc_[0] = -1;
    depth_[0] = 0;
    pot_[0] = 0.0;
    stack_.clear();
    stack_.push_back(0);
    int visited = 1;
    while (!stack_.empty()) {
      const int v = stack_.back();
      stack_.pop_back();
      for (int s = head_[v]; s != -1; s = next_[s]) {
        const int a = slot_arc_[s];
        const int su = arcs_[a].src;
        const int sv = n_ + arcs_[a].snk;
        const int other = (v == su) ? sv : su;
        if (parent_[other] != -2) continue;
        parent_[other] = v;
        parent_arc_[other] = a;
        depth_[other] = depth_[v] + 1;
        pot_[other] = cost_(su, arcs_[a].snk) - pot_[v];
        stack_.push_back(other);
        ++visited;
      }
    }
    if (visited != nodes_) throw TransportError("solve_discrete_ot: basis lost connectivity");
  }

  double reduced(long flat) const {
    const int i = static_cast<int>(flat / n_);
    const int j = static_cast<int>(flat % n_);
    return cost_(i, j) - pot_[i] - pot_[n_ + j];
  }

  // Most negative reduced cost within the first block (starting at the
  // persistent cursor) that contains any candidate.
  long entering_block() {
    const long total = static_cast<long>(n_) * n_;
    const long block = std::max<long>(64, n_);
    long a = cursor_;
    for (long scanned = 0; scanned < total;) {
      double best_r = -eps_;
      long best = -1;
      const long stop = std::min(block, total - scanned);
      for (long k = 0; k < stop; ++k) {
        const double r = reduced(a);
        if (r < best_r) {
          best_r = r;
          best = a;
        }
        if (++a == total) a = 0;
        ++scanned;
      }
      if (best >= 0) {
        cursor_ = a;
        return best;
      }
    }
    return -1;
  }

  long entering_bland() {
    const long total = static_cast<long>(n_) * n_;
    for (long a = 0; a < total; ++a)
      if (reduced(a) < -eps_) return a;
    return -1;
  }

  // Pushes theta along the entering arc's cycle; the leaving arc is the
  // first minimal backward arc in traversal order (lowest flattened index
  // among exact ties under Bland's rule).
  void apply_pivot(long entering, bool bland) {
    const int ei = static_cast<int>(entering / n_);
    const int ej = static_cast<int>(entering % n_);
    src_path_.clear();  // nodes from source endpoint up to (not incl.) lca
    snk_path_.clear();  // nodes from sink endpoint up to (not incl.) lca
    int x = ei, y = n_ + ej;
    while (depth_[x] > depth_[y]) {
      src_path_.push_back(x);
      x = parent_[x];
    }
    while (depth_[y] > depth_[x]) {
      snk_path_.push_back(y);
      y = parent_[y];
    }
    while (x != y) {
      src_path_.push_back(x);
      x = parent_[x];
      snk_path_.push_back(y);
      y = parent_[y];
    }

    // Traversal order around the cycle: entering arc, then the sink-side
    // path upward, then the source-side path downward.
    cycle_.clear();
    for (int node : snk_path_) {
      const int a = parent_arc_[node];
      const int sign = (node == n_ + arcs_[a].snk) ? -1 : +1;
      cycle_.push_back({a, sign});
    }
    for (auto it = src_path_.rbegin(); it != src_path_.rend(); ++it) {
      const int a = parent_arc_[*it];
      const int sign = (*it == n_ + arcs_[a].snk) ? +1 : -1;
      cycle_.push_back({a, sign});
    }

    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    long leave_id = -1;
    for (const auto& [a, sign] : cycle_) {
      if (sign > 0) continue;
      const double f = arcs_[a].flow;
      const long id = static_cast<long>(arcs_[a].src) * n_ + arcs_[a].snk;
      const bool better = f < theta || (bland && f == theta && id < leave_id);
      if (better) {
        theta = f;
        leave = a;
        leave_id = id;
      }
    }
    if (leave < 0) throw TransportError("solve_discrete_ot: cycle without blocking arc");

    for (const auto& [a, sign] : cycle_) {
      arcs_[a].flow += sign * theta;
      if (arcs_[a].flow < 0.0) arcs_[a].flow = 0.0;  // fp dust from the subtraction
    }
    arcs_[leave] = {ei, ej, theta};
  }

  int n_;
  int nodes_;
  const Eigen::MatrixXd& cost_;
  Eigen::VectorXd demand_;
  double eps_ = 1e-12;
  long cursor_ = 0;

  std::vector<BasicArc> arcs_;
  std::vector<int> parent_, parent_arc_, depth_, head_, next_, slot_arc_, stack_;
  std::vector<int> src_path_, snk_path_;
  std::vector<std::pair<int, int>> cycle_;
  std::vector<double> pot_;
};

Eigen::VectorXd normalized_from_log(const Eigen::VectorXd& log_w) {
  const double shift = log_w.maxCoeff();
  Eigen::VectorXd w = (log_w.array() - shift).exp();
  const double total = w.sum();
  if (!(total > 0.0))
    throw TransportError("importance weights degenerated to zero despite max shift");
  return w / total;
}

}  // namespace

Eigen::VectorXd importance_weights(const Eigen::VectorXd& pot_values, const DensityParams& now,
                                   const DensityParams& next) {
  validate(now);
  validate(next);
  if (now.m != next.m || now.kappa != next.kappa)
    throw std::invalid_argument("importance_weights: parameter sets must share m and kappa");
  if (pot_values.size() == 0)
    throw std::invalid_argument("importance_weights: empty particle set");
  Eigen::VectorXd log_w(pot_values.size());
  for (Eigen::Index i = 0; i < pot_values.size(); ++i)
    log_w[i] = log_rho(next, pot_values[i]) - log_rho(now, pot_values[i]);
  return normalized_from_log(log_w);
}

Eigen::VectorXd importance_weights(const Eigen::MatrixXd& particles, const Potential& pot,
                                   const DensityParams& now, const DensityParams& next) {
  return importance_weights(eval_rows(pot, particles), now, next);
}

Eigen::VectorXd gibbs_importance_weights(const Eigen::VectorXd& pot_values, double beta_now,
                                         double beta_next) {
  if (pot_values.size() == 0)
    throw std::invalid_argument("gibbs_importance_weights: empty particle set");
  return normalized_from_log(-(beta_next - beta_now) * pot_values);
}

TransportPlan solve_discrete_ot(const Eigen::MatrixXd& points,
                                const Eigen::VectorXd& target_weights, double tol) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw TransportError("solve_discrete_ot: empty point set");
  if (target_weights.size() != n)
    throw TransportError("solve_discrete_ot: weight/point count mismatch");
  Eigen::VectorXd w = target_weights;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w[i] < 0.0) {
      if (w[i] < -1e-12) throw TransportError("solve_discrete_ot: negative target weight");
      w[i] = 0.0;
    }
  }
  const double total = w.sum();
  if (std::abs(total - 1.0) > 1e-6)
    throw TransportError("solve_discrete_ot: target weights sum to " + std::to_string(total) +
                         ", expected 1");

  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    cost.row(i) = (points.rowwise() - points.row(i)).rowwise().squaredNorm();

  const Eigen::VectorXd demand = w * (static_cast<double>(n) / total);
  TransportSimplex simplex(cost, demand);
  simplex.run();

  TransportPlan plan;
  plan.G = Eigen::MatrixXd::Zero(n, n);
  plan.cost = 0.0;
  for (const auto& arc : simplex.arcs()) {
    plan.G(arc.src, arc.snk) += arc.flow;
    plan.cost += arc.flow * cost(arc.src, arc.snk);
  }

  const double row_err = (plan.G.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (plan.G.colwise().sum().transpose() - demand).cwiseAbs().maxCoeff();
  if (row_err > tol || col_err > tol)
    throw TransportError("solve_discrete_ot: marginal violation (row " + std::to_string(row_err) +
                         ", col " + std::to_string(col_err) + ") exceeds tolerance");
  return plan;
}

Eigen::MatrixXd barycentric_velocity(const TransportPlan& plan, const Eigen::MatrixXd& points,
                                     double h) {
  if (!(h > 0.0)) throw std::domain_error("barycentric_velocity: h must be > 0");
  if (plan.G.rows() != points.rows())
    throw std::invalid_argument("barycentric_velocity: plan/point size mismatch");
  return (plan.G * points - points) / h;
}

double effective_sample_size(const Eigen::VectorXd& weights) {
  const double s = weights.squaredNorm();
  if (!(s > 0.0)) throw std::invalid_argument("effective_sample_size: zero weight vector");
  return 1.0 / s;
}

}  // namespace swarm
