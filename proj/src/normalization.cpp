#include "swarm/normalization.hpp"

#include <cmath>
#include <string>

#include "swarm/scalar_math.hpp"
#include "swarm/warnings.hpp"

namespace swarm {

QuadGrid tensor_grid_1d(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("tensor_grid_1d: need at least 2 nodes");
  QuadGrid g;
  g.points.resize(n, 1);
  g.weights.resize(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    g.points(i, 0) = lo + step * i;
    g.weights[i] = (i == 0 || i == n - 1) ? 0.5 * step : step;
  }
  return g;
}

QuadGrid tensor_grid_2d(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("tensor_grid_2d: need at least 2 nodes");
  QuadGrid g;
  g.points.resize(static_cast<Eigen::Index>(nx) * ny, 2);
  g.weights.resize(static_cast<Eigen::Index>(nx) * ny);
  const double sx = (hi[0] - lo[0]) / (nx - 1);
  const double sy = (hi[1] - lo[1]) / (ny - 1);
  Eigen::Index q = 0;
  for (int i = 0; i < nx; ++i) {
    const double wx = (i == 0 || i == nx - 1) ? 0.5 * sx : sx;
    for (int j = 0; j < ny; ++j) {
      const double wy = (j == 0 || j == ny - 1) ? 0.5 * sy : sy;
      g.points(q, 0) = lo[0] + sx * i;
      g.points(q, 1) = lo[1] + sy * j;
      g.weights[q] = wx * wy;
      ++q;
    }
  }
  return g;
}

QuadGrid tensor_grid(const Potential& pot, int points_per_dim) {
  if (pot.dim == 1) return tensor_grid_1d(pot.box_lo[0], pot.box_hi[0], points_per_dim);
  if (pot.dim == 2)
    return tensor_grid_2d(pot.box_lo, pot.box_hi, points_per_dim, points_per_dim);
  throw std::invalid_argument("tensor_grid: only 1D and 2D grids are supported");
}

namespace {

// Shared bracketed solve for a normalization defect that is increasing in C.
// The empirical criterion always has its root in [0, max U]: every rho(u; 0)
// with u >= 0 is at most 1, so the defect at C = 0 is nonpositive. The
// integral criterion can need C < 0 when the domain volume exceeds 1 (e.g.
// U == 0 on a box of volume V solves rho = 1/V < 1), so the quadrature
// oracle may expand the bracket downward as well.
CState solve_c(const std::function<double(double)>& defect, double max_u, double tol,
               int max_expansions, CMethod method, double t, const char* what,
               bool allow_negative) {
  if (!(tol > 0.0)) throw std::invalid_argument(std::string(what) + ": tol must be > 0");
  const double f0 = defect(0.0);
  if (f0 > 0.0 && !allow_negative) {
    throw EstimationError(std::string(what) + ": defect at C=0 already positive (" +
                          std::to_string(f0) + "); every sampled U should be >= 0");
  }
  double root;
  try {
    if (f0 > 0.0) {
      double lo = -1.0;
      double flo = defect(lo);
      int used = 0;
      while (flo > 0.0) {
        if (++used > max_expansions)
          throw BracketError("no sign change below C = " + std::to_string(lo));
        lo *= 2.0;
        flo = defect(lo);
      }
      root = find_root(BracketedFn{defect, lo, 0.0, tol});
    } else {
      root = find_root_expanding(defect, 0.0, max_u + 1.0, tol, max_expansions);
      if (root < 0.0) root = 0.0;
    }
  } catch (const BracketError& e) {
    throw EstimationError(std::string(what) + ": " + e.what() + " (max U = " +
                          std::to_string(max_u) + ")");
  }
  return CState{root, t, method, defect(root)};
}

}  // namespace

CState estimate_C_empirical(const Eigen::VectorXd& pot_values, DensityParams base, double tol,
                            int max_expansions, double t, double warm_start) {
  validate(base);
  if (pot_values.size() == 0)
    throw std::invalid_argument("estimate_C_empirical: empty particle set");
  if (!(tol > 0.0)) throw std::invalid_argument("estimate_C_empirical: tol must be > 0");
  const double max_u = pot_values.maxCoeff();
  auto defect = [&](double c) {
    DensityParams p = base;
    p.C = c;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pot_values.size(); ++i) acc += rho(p, pot_values[i]);
    return acc / static_cast<double>(pot_values.size()) - 1.0;
  };
  // the root moves slowly between fine steps: try a narrow bracket
  // centered at the previous C before the full solve
  if (std::isfinite(warm_start)) {
    const double lo = std::max(0.0, warm_start - 0.5);
    const double hi = warm_start + 0.5;
    const double flo = defect(lo);
    const double fhi = defect(hi);
    if (flo <= 0.0 && fhi >= 0.0) {
      double root = detail::brent_core(defect, lo, hi, flo, fhi, tol);
      if (root < 0.0) root = 0.0;
      return CState{root, t, CMethod::empirical, defect(root)};
    }
  }
  return solve_c(defect, max_u, tol, max_expansions, CMethod::empirical, t,
                 "estimate_C_empirical", false);
}

CState estimate_C_empirical(const Eigen::MatrixXd& particles, const Potential& pot,
                            DensityParams base, double tol, int max_expansions, double t) {
  return estimate_C_empirical(eval_rows(pot, particles), base, tol, max_expansions, t);
}

CState fit_C_quadrature(const Potential& pot, DensityParams base, const QuadGrid& grid,
                        double tol, double t) {
  validate(base);
  const Eigen::VectorXd u = eval_rows(pot, grid.points);
  const double max_u = u.maxCoeff();
  auto defect = [&](double c) {
    DensityParams p = base;
    p.C = c;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += grid.weights[i] * rho(p, u[i]);
    return acc - 1.0;
  };
  return solve_c(defect, max_u, tol, 60, CMethod::quadrature, t, "fit_C_quadrature", true);
}

double coarse_C_derivative(const Eigen::VectorXd& pot_values, const DensityParams& p,
                           const CoolingSchedule& s, double t) {
  validate(p);
  if (pot_values.size() == 0)
    throw std::invalid_argument("coarse_C_derivative: empty particle set");
  const double bp = beta_prime(s, t);
  if (bp == 0.0) return 0.0;
  DensityParams pt = p;
  pt.beta = beta(s, t);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < pot_values.size(); ++i) {
    const double a = weight_a(pt, pot_values[i]);
    num += (pot_values[i] - pt.C) * a;
    den += a;
  }
  return bp / pt.beta * num / den;
}

double coarse_C_derivative(const Eigen::MatrixXd& particles, const Potential& pot,
                           const DensityParams& p, const CoolingSchedule& s, double t) {
  return coarse_C_derivative(eval_rows(pot, particles), p, s, t);
}

double cprime_quadrature(const Potential& pot, const DensityParams& p, const CoolingSchedule& s,
                         double t, const QuadGrid& grid) {
  validate(p);
  const double bp = beta_prime(s, t);
  if (bp == 0.0) return 0.0;
  DensityParams pt = p;
  pt.beta = beta(s, t);
  const Eigen::VectorXd u = eval_rows(pot, grid.points);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = rho(pt, u[i]);
    const double a = weight_a(pt, u[i]);
    num += grid.weights[i] * (u[i] - pt.C) * a * r;
    den += grid.weights[i] * a * r;
  }
  return bp / pt.beta * num / den;
}

double predict_C(double C, double cprime, double h) {
  if (!(h >= 0.0)) throw std::domain_error("predict_C: h must be >= 0");
  const double next = C + h * cprime;
  if (next < 0.0) {
    warn("predict_C: negative prediction " + std::to_string(next) + " clamped to 0");
    return 0.0;
  }
  return next;
}

}  // namespace swarm
