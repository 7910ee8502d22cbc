#include "swarm/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "swarm/kde.hpp"
#include "swarm/normalization.hpp"
#include "swarm/transport.hpp"
#include "swarm/warnings.hpp"

namespace swarm {

namespace role {
constexpr std::uint64_t run = 0xA11CE;
constexpr std::uint64_t particles = 0xBEEF;
constexpr std::uint64_t init = 0x1217;
constexpr std::uint64_t subset = 0x5B5E7;
}  // namespace role

Method method_from_name(const std::string& name) {
  if (name == "csg") return Method::csg;
  if (name == "csa") return Method::csa;
  if (name == "uncontrolled_swarm") return Method::uncontrolled_swarm;
  if (name == "langevin") return Method::langevin;
  throw ConfigError("unknown method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::csg: return "csg";
    case Method::csa: return "csa";
    case Method::uncontrolled_swarm: return "uncontrolled_swarm";
    case Method::langevin: return "langevin";
  }
  return "?";
}

IntegratorSpec spec_from_config(const RunConfig& cfg) {
  IntegratorSpec spec;
  spec.dt = cfg.dt;
  spec.k = cfg.k;
  spec.T = cfg.T;
  spec.noise_factor = cfg.noise_factor;
  spec.method = cfg.method_enum();
  spec.c_tol = cfg.c_tol;
  spec.c_bracket_expansions = cfg.c_bracket_expansions;
  spec.ot_tolerance = cfg.ot_tolerance;
  return spec;
}

Ensemble make_ensemble(Eigen::MatrixXd positions, const Potential& pot, std::uint64_t seed,
                       std::uint64_t run_index) {
  Ensemble e;
  e.positions = std::move(positions);
  e.velocities = Eigen::MatrixXd::Zero(e.positions.rows(), e.positions.cols());
  e.pot_values = eval_rows(pot, e.positions);
  e.seed = seed;
  const std::uint64_t run_key = derive_key(derive_key(seed, role::run), run_index);
  e.streams.reserve(static_cast<std::size_t>(e.positions.rows()));
  for (Eigen::Index i = 0; i < e.positions.rows(); ++i)
    e.streams.push_back(make_stream(derive_key(run_key, role::particles), i));
  return e;
}

Eigen::MatrixXd draw_noise(Ensemble& e) {
  Eigen::MatrixXd noise(e.n(), e.dim());
  for (Eigen::Index i = 0; i < e.n(); ++i)
    for (Eigen::Index j = 0; j < e.dim(); ++j) noise(i, j) = e.streams[i].normal();
  return noise;
}

namespace {

void check_finite(const Ensemble& e, const char* what) {
  if (!e.positions.allFinite())
    throw IntegrationError(std::string(what) + ": non-finite position at step " +
                           std::to_string(e.step_index) + " (t = " + std::to_string(e.t) + ")");
}

void advance_time(Ensemble& e, double dt) {
  ++e.step_index;
  e.t = dt * static_cast<double>(e.step_index);
}

void refit_c(Ensemble& e, double m, int kappa, const CoolingSchedule& s,
             const IntegratorSpec& spec) {
  const CState st = estimate_C_empirical(e.pot_values, {m, beta(s, e.t), 0.0, kappa}, spec.c_tol,
                                         spec.c_bracket_expansions, e.t, e.C);
  e.C = st.C;
  e.c_residual = st.residual;
}

}  // namespace

void csg_fine_step(Ensemble& e, const Potential& pot, double m, int kappa,
                   const CoolingSchedule& s, const IntegratorSpec& spec,
                   const Eigen::MatrixXd& noise) {
  const double beta_now = beta(s, e.t);
  const DensityParams p{m, beta_now, e.C, kappa};
  const double sqrt_dt = std::sqrt(spec.dt);
  for (Eigen::Index i = 0; i < e.n(); ++i) {
    const double r = rho(p, e.pot_values[i]);
    const double amp = std::sqrt(spec.noise_factor * alpha_mod(r, m) / beta_now) * sqrt_dt;
    e.positions.row(i) +=
        spec.dt * (e.velocities.row(i) - pot.grad(e.positions.row(i)).transpose()) +
        amp * noise.row(i);
  }
  check_finite(e, "csg_fine_step");
  advance_time(e, spec.dt);
  e.pot_values = eval_rows(pot, e.positions);
  refit_c(e, m, kappa, s, spec);
}

void csa_fine_step(Ensemble& e, const Potential& pot, const CoolingSchedule& s,
                   const IntegratorSpec& spec, const Eigen::MatrixXd& noise) {
  const double amp = std::sqrt(2.0 / beta(s, e.t)) * std::sqrt(spec.dt);
  for (Eigen::Index i = 0; i < e.n(); ++i) {
    e.positions.row(i) +=
        spec.dt * (e.velocities.row(i) - pot.grad(e.positions.row(i)).transpose()) +
        amp * noise.row(i);
  }
  check_finite(e, "csa_fine_step");
  advance_time(e, spec.dt);
  e.pot_values = eval_rows(pot, e.positions);
}

void uncontrolled_swarm_fine_step(Ensemble& e, const Potential& pot, double m,
                                  const CoolingSchedule& s, const IntegratorSpec& spec,
                                  const Eigen::MatrixXd& noise) {
  const double beta_now = beta(s, e.t);
  const Eigen::VectorXd dens = kde_self_density(e.positions);
  const double sqrt_dt = std::sqrt(spec.dt);
  for (Eigen::Index i = 0; i < e.n(); ++i) {
    const double amp =
        std::sqrt(spec.noise_factor * alpha_mod(dens[i], m) / beta_now) * sqrt_dt;
    e.positions.row(i) +=
        spec.dt * (-pot.grad(e.positions.row(i)).transpose()) + amp * noise.row(i);
  }
  check_finite(e, "uncontrolled_swarm_fine_step");
  advance_time(e, spec.dt);
  e.pot_values = eval_rows(pot, e.positions);
}

RefreshDiagnostics refresh_velocity(Ensemble& e, const Potential& pot, double m, int kappa,
                                    const CoolingSchedule& s, const IntegratorSpec& spec) {
  (void)pot;  // U at the current positions is cached in e.pot_values
  const double h = spec.k * spec.dt;
  const double t = e.t;
  RefreshDiagnostics diag;
  Eigen::VectorXd w;
  if (spec.method == Method::csg) {
    const DensityParams now{m, beta(s, t), e.C, kappa};
    diag.c_prime = coarse_C_derivative(e.pot_values, now, s, t);
    diag.c_predicted = predict_C(e.C, diag.c_prime, h);
    const DensityParams next{m, beta(s, t + h), diag.c_predicted, kappa};
    w = importance_weights(e.pot_values, now, next);
  } else if (spec.method == Method::csa) {
    w = gibbs_importance_weights(e.pot_values, beta(s, t), beta(s, t + h));
  } else {
    throw std::invalid_argument("refresh_velocity: method has no control field");
  }
  diag.ess = effective_sample_size(w);
  if (diag.ess < 2.0 && e.n() > 1)
    warn("refresh_velocity: degenerate importance weights (ESS = " + std::to_string(diag.ess) +
         ") at t = " + std::to_string(t));
  const TransportPlan plan = solve_discrete_ot(e.positions, w, spec.ot_tolerance);
  diag.plan_cost = plan.cost;
  e.velocities = barycentric_velocity(plan, e.positions, h);
  return diag;
}

namespace {

Eigen::MatrixXd uniform_box_sample(const Potential& pot, long n, RngStream& stream) {
  Eigen::MatrixXd x(n, pot.dim);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < pot.dim; ++j)
      x(i, j) = pot.box_lo[j] + stream.uniform() * (pot.box_hi[j] - pot.box_lo[j]);
  return x;
}

Snapshot take_snapshot(const Ensemble& e, const Eigen::VectorXd& min_u,
                       const RefreshDiagnostics* diag) {
  Snapshot snap;
  snap.t = e.t;
  snap.positions = e.positions;
  snap.C = e.C;
  snap.c_residual = e.c_residual;
  if (diag) {
    snap.plan_cost = diag->plan_cost;
    snap.ess = diag->ess;
  }
  snap.min_u_so_far = min_u;
  return snap;
}

}  // namespace

Ensemble init_uniform(const Potential& pot, long n, std::uint64_t seed) {
  RngStream stream = make_stream(derive_key(seed, role::init), 3);
  return make_ensemble(uniform_box_sample(pot, n, stream), pot, seed, 0);
}

Ensemble init_uncontrolled_swarm(const Potential& pot, double m, double beta0, long n,
                                 long burn_in_steps, double dt, std::uint64_t seed) {
  if (!(beta0 > 0.0)) throw std::invalid_argument("init_uncontrolled_swarm: beta0 must be > 0");
  RngStream init_stream = make_stream(derive_key(seed, role::init), 0);
  Ensemble e = make_ensemble(uniform_box_sample(pot, n, init_stream), pot, seed, 0);
  const CoolingSchedule s = CoolingSchedule::constant(beta0);
  IntegratorSpec spec;
  spec.dt = dt;
  spec.method = Method::uncontrolled_swarm;
  for (long step = 0; step < burn_in_steps; ++step) {
    const Eigen::MatrixXd noise = draw_noise(e);
    uncontrolled_swarm_fine_step(e, pot, m, s, spec, noise);
  }
  const CState st = estimate_C_empirical(e.pot_values, {m, beta0, 0.0, 1}, 1e-8);
  e.C = st.C;
  e.c_residual = st.residual;
  e.t = 0.0;
  e.step_index = 0;
  return e;
}

Ensemble init_langevin(const Potential& pot, double beta0, long n, long burn_in_steps, double dt,
                       std::uint64_t seed) {
  if (!(beta0 > 0.0)) throw std::invalid_argument("init_langevin: beta0 must be > 0");
  RngStream init_stream = make_stream(derive_key(seed, role::init), 1);
  Ensemble e = make_ensemble(uniform_box_sample(pot, n, init_stream), pot, seed, 0);
  const CoolingSchedule s = CoolingSchedule::constant(beta0);
  IntegratorSpec spec;
  spec.dt = dt;
  spec.method = Method::langevin;
  for (long step = 0; step < burn_in_steps; ++step) {
    const Eigen::MatrixXd noise = draw_noise(e);
    csa_fine_step(e, pot, s, spec, noise);
  }
  e.t = 0.0;
  e.step_index = 0;
  return e;
}

Ensemble init_mixture(const std::vector<Eigen::VectorXd>& centers, double cov_scale, long n,
                      std::uint64_t seed, const Potential& pot) {
  if (centers.empty()) throw std::invalid_argument("init_mixture: need at least one center");
  if (!(cov_scale > 0.0)) throw std::invalid_argument("init_mixture: cov_scale must be > 0");
  for (const auto& c : centers)
    if (c.size() != pot.dim) throw std::invalid_argument("init_mixture: center dimension mismatch");
  RngStream stream = make_stream(derive_key(seed, role::init), 2);
  const double sd = std::sqrt(cov_scale);
  Eigen::MatrixXd x(n, pot.dim);
  for (long i = 0; i < n; ++i) {
    const auto& c = centers[stream.uniform_index(centers.size())];
    for (int j = 0; j < pot.dim; ++j) x(i, j) = c[j] + sd * stream.normal();
  }
  return make_ensemble(std::move(x), pot, seed, 0);
}

Trajectory run_single(const RunConfig& cfg, std::uint64_t run_index,
                      const Eigen::MatrixXd* reference, double reference_C) {
  const Potential& pot = potential_by_name(cfg.potential);
  const IntegratorSpec spec = spec_from_config(cfg);
  const CoolingSchedule& s = cfg.schedule;
  const Method method = spec.method;
  const double init_beta0 = cfg.init.beta0 > 0.0 ? cfg.init.beta0 : s.beta0;

  Eigen::MatrixXd positions;
  bool have_c0 = false;
  double c0 = 0.0;
  if (reference) {
    if (cfg.init.subset_size > 0) {
      RngStream pick =
          make_stream(derive_key(derive_key(cfg.seed, role::run), run_index), role::subset);
      const long nref = reference->rows();
      // partial Fisher-Yates draw without replacement
      std::vector<long> idx(nref);
      for (long i = 0; i < nref; ++i) idx[i] = i;
      positions.resize(cfg.init.subset_size, reference->cols());
      for (long i = 0; i < cfg.init.subset_size; ++i) {
        const long j = i + static_cast<long>(pick.uniform_index(nref - i));
        std::swap(idx[i], idx[j]);
        positions.row(i) = reference->row(idx[i]);
      }
    } else {
      positions = *reference;
    }
    have_c0 = method == Method::csg;
    c0 = reference_C;
  } else {
    const std::uint64_t init_seed = derive_key(derive_key(cfg.seed, role::init), run_index);
    if (cfg.init.kind == "uncontrolled_swarm") {
      Ensemble init = init_uncontrolled_swarm(pot, cfg.m, init_beta0, cfg.n_particles,
                                              cfg.init.burn_in_steps, cfg.init.burn_in_dt,
                                              init_seed);
      positions = std::move(init.positions);
      have_c0 = method == Method::csg;
      c0 = init.C;
    } else if (cfg.init.kind == "langevin") {
      Ensemble init = init_langevin(pot, init_beta0, cfg.n_particles, cfg.init.burn_in_steps,
                                    cfg.init.burn_in_dt, init_seed);
      positions = std::move(init.positions);
    } else if (cfg.init.kind == "mixture") {
      Ensemble init =
          init_mixture(cfg.init.centers, cfg.init.cov_scale, cfg.n_particles, init_seed, pot);
      positions = std::move(init.positions);
    } else if (cfg.init.kind == "uniform") {
      Ensemble init = init_uniform(pot, cfg.n_particles, init_seed);
      positions = std::move(init.positions);
    } else {
      throw ConfigError("run_single: unknown init kind '" + cfg.init.kind + "'");
    }
  }

  Ensemble e = make_ensemble(std::move(positions), pot, cfg.seed, run_index);
  if (method == Method::csg) {
    if (have_c0) {
      e.C = c0;
      DensityParams p{cfg.m, beta(s, 0.0), c0, cfg.kappa};
      double acc = 0.0;
      for (Eigen::Index i = 0; i < e.pot_values.size(); ++i) acc += rho(p, e.pot_values[i]);
      e.c_residual = acc / static_cast<double>(e.pot_values.size()) - 1.0;
    } else {
      const CState st = estimate_C_empirical(e.pot_values, {cfg.m, beta(s, 0.0), 0.0, cfg.kappa},
                                             spec.c_tol, spec.c_bracket_expansions);
      e.C = st.C;
      e.c_residual = st.residual;
    }
  }

  const long total_steps = cfg.total_steps();
  const int record_every = cfg.effective_record_every();
  Eigen::VectorXd min_u = e.pot_values;

  Trajectory traj;
  traj.snapshots.reserve(static_cast<std::size_t>(1 + total_steps / record_every));
  traj.snapshots.push_back(take_snapshot(e, min_u, nullptr));

  RefreshDiagnostics diag;
  bool have_diag = false;
  for (long step = 0; step < total_steps; ++step) {
    if ((method == Method::csg || method == Method::csa) && step % spec.k == 0) {
      diag = refresh_velocity(e, pot, cfg.m, cfg.kappa, s, spec);
      have_diag = true;
    }
    const Eigen::MatrixXd noise = draw_noise(e);
    switch (method) {
      case Method::csg:
        csg_fine_step(e, pot, cfg.m, cfg.kappa, s, spec, noise);
        break;
      case Method::csa:
      case Method::langevin:
        csa_fine_step(e, pot, s, spec, noise);
        break;
      case Method::uncontrolled_swarm:
        uncontrolled_swarm_fine_step(e, pot, cfg.m, s, spec, noise);
        break;
    }
    min_u = min_u.cwiseMin(e.pot_values);
    if ((step + 1) % record_every == 0)
      traj.snapshots.push_back(take_snapshot(e, min_u, have_diag ? &diag : nullptr));
  }
  return traj;
}

}  // namespace swarm
