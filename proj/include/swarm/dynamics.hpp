#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swarm/density.hpp"
#include "swarm/potentials.hpp"
#include "swarm/rng.hpp"
#include "swarm/run_config.hpp"
#include "swarm/schedule.hpp"

namespace swarm {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Particle system state. pot_values caches U at the current positions and
// is kept in sync by every step; velocities hold the current control-field
// samples and stay frozen between refreshes.
struct Ensemble {
  Eigen::MatrixXd positions;   // n x d
  Eigen::MatrixXd velocities;  // n x d
  Eigen::VectorXd pot_values;  // n
  double C = 0.0;
  double c_residual = 0.0;
  double t = 0.0;
  long step_index = 0;
  std::uint64_t seed = 0;
  std::vector<RngStream> streams;  // one per particle

  Eigen::Index n() const { return positions.rows(); }
  Eigen::Index dim() const { return positions.cols(); }
};

// Two-time-scale integrator parameters: fine step dt for the SDE, coarse
// interval h = k dt for velocity re-estimation. noise_factor 2 discretizes
// the SDE's sqrt(2/beta alpha); 1 reproduces the scheme line verbatim.
struct IntegratorSpec {
  double dt = 0.002;
  int k = 20;
  double T = 1.0;
  double noise_factor = 2.0;
  Method method = Method::csg;
  double c_tol = 1e-8;
  int c_bracket_expansions = 60;
  double ot_tolerance = 1e-9;
};

IntegratorSpec spec_from_config(const RunConfig& cfg);

// Builds an ensemble around given positions: zero velocities, per-particle
// streams derived from (seed, run_index), cached potential values.
Ensemble make_ensemble(Eigen::MatrixXd positions, const Potential& pot, std::uint64_t seed,
                       std::uint64_t run_index);

// Draws one n x d matrix of standard normals from the per-particle streams.
Eigen::MatrixXd draw_noise(Ensemble& e);

// One Euler-Maruyama step of the controlled swarm dynamics:
//   X += dt (V - grad U) + sqrt(noise_factor * alpha(rho)/beta(t)) sqrt(dt) xi,
// followed by the empirical re-fit of C at t + dt.
void csg_fine_step(Ensemble& e, const Potential& pot, double m, int kappa,
                   const CoolingSchedule& s, const IntegratorSpec& spec,
                   const Eigen::MatrixXd& noise);

// Same step with the constant diffusion sqrt(2/beta(t)); no C state.
// With zero velocities this is plain (annealed) Langevin.
void csa_fine_step(Ensemble& e, const Potential& pot, const CoolingSchedule& s,
                   const IntegratorSpec& spec, const Eigen::MatrixXd& noise);

// Time-homogeneous swarm step with the marginal replaced by a Gaussian KDE
// over the ensemble (used for initialization and as the uncontrolled method).
void uncontrolled_swarm_fine_step(Ensemble& e, const Potential& pot, double m,
                                  const CoolingSchedule& s, const IntegratorSpec& spec,
                                  const Eigen::MatrixXd& noise);

struct RefreshDiagnostics {
  double plan_cost = 0.0;
  double ess = 0.0;
  double c_prime = 0.0;
  double c_predicted = 0.0;
};

// Coarse update of the control field: predict C over h, reweight by the
// density ratio (Gibbs ratio for CSA), solve the transport problem and set
// velocities from the barycentric projection.
RefreshDiagnostics refresh_velocity(Ensemble& e, const Potential& pot, double m, int kappa,
                                    const CoolingSchedule& s, const IntegratorSpec& spec);

// One full run: initialization, coarse/fine loop, snapshots every
// record_every fine steps. Deterministic given (cfg, run_index).
// reference/reference_C supply the shared ensemble for the subset protocol.
Trajectory run_single(const RunConfig& cfg, std::uint64_t run_index,
                      const Eigen::MatrixXd* reference = nullptr, double reference_C = 0.0);

// Initializers. Burn-in samplers start uniform over the potential's box;
// init_uniform is that starting distribution by itself (an easy-to-sample
// compactly supported initial law).
Ensemble init_uniform(const Potential& pot, long n, std::uint64_t seed);
Ensemble init_uncontrolled_swarm(const Potential& pot, double m, double beta0, long n,
                                 long burn_in_steps, double dt, std::uint64_t seed);
Ensemble init_langevin(const Potential& pot, double beta0, long n, long burn_in_steps, double dt,
                       std::uint64_t seed);
Ensemble init_mixture(const std::vector<Eigen::VectorXd>& centers, double cov_scale, long n,
                      std::uint64_t seed, const Potential& pot);

}  // namespace swarm
