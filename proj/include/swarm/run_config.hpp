#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/schedule.hpp"

namespace swarm {

enum class Method { csg, csa, uncontrolled_swarm, langevin };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How each run obtains its initial particles. With subset_size > 0 a
// single reference ensemble of reference_n particles is built once (from
// reference_seed) and every run draws a random subset from it.
struct InitSpec {
  std::string kind = "uncontrolled_swarm";  // uncontrolled_swarm | langevin | mixture | file
  long burn_in_steps = 10000;
  double burn_in_dt = 0.002;
  double beta0 = -1.0;  // < 0: use the schedule's beta0
  std::vector<Eigen::VectorXd> centers;
  double cov_scale = 0.005;
  std::string file;
  long subset_size = 0;
  long reference_n = 0;  // 0: n_particles
  std::uint64_t reference_seed = 0;
};

// Full experiment description; every paper experiment ships as one of
// these in configs/.
struct RunConfig {
  std::string method = "csg";
  std::string potential = "double_well";
  CoolingSchedule schedule = CoolingSchedule::quadratic(0.25, 25.0);
  double m = 2.0;
  int kappa = 1;
  long n_particles = 100;
  long n_runs = 1;
  double dt = 0.002;
  int k = 20;
  double T = 1.0;
  double noise_factor = 2.0;
  std::uint64_t seed = 0;
  InitSpec init;
  std::string out_dir;
  int record_every = 0;  // 0: every k fine steps
  double c_tol = 1e-8;
  int c_bracket_expansions = 60;
  double ot_tolerance = 1e-9;
  int workers = 0;  // 0: hardware concurrency

  Method method_enum() const { return method_from_name(method); }
  int effective_record_every() const { return record_every > 0 ? record_every : k; }
  long total_steps() const { return std::lround(T / dt); }
};

// Throws ConfigError on invalid or inconsistent fields.
void validate_config(const RunConfig& cfg);

struct Snapshot {
  double t = 0.0;
  Eigen::MatrixXd positions;
  double C = 0.0;
  double c_residual = 0.0;
  double plan_cost = std::numeric_limits<double>::quiet_NaN();
  double ess = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd min_u_so_far;  // running minimum of U per particle
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
};

}  // namespace swarm
