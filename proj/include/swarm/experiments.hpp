#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swarm/dynamics.hpp"
#include "swarm/potentials.hpp"
#include "swarm/run_config.hpp"

namespace swarm {

// --- configuration -------------------------------------------------------

// Reads a declarative key = value config (TOML subset: dotted keys, inline
// tables, strings, numbers, booleans, numeric arrays and arrays of arrays).
// Unknown keys are rejected.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Worker count for run-level parallelism: requested (0 = hardware), capped
// by SWARM_ANNEAL_WORKERS and by the number of runs.
int resolve_workers(int requested, long n_runs);

// --- experiment driver ----------------------------------------------------

struct ExperimentResult {
  std::vector<Trajectory> trajectories;  // one per run, in run order
  Eigen::MatrixXd reference;             // shared initial ensemble (may be empty)
  double reference_C = 0.0;
};

// Executes cfg.n_runs independent runs on a bounded worker pool. Results
// are bit-identical for any worker count.
ExperimentResult run_experiment(const RunConfig& cfg);

// Full CLI pipeline: validate, run, write trajectories and aggregates
// under cfg.out_dir.
void cli_run(const RunConfig& cfg);

// --- aggregation ----------------------------------------------------------

struct Heatmap {
  Eigen::VectorXd t_values;  // snapshot time per time bin
  Eigen::VectorXd x_edges;   // x_bins + 1 edges
  Eigen::MatrixXi counts;    // t_bins x x_bins
};

// Particle counts of coordinate `axis` per (time bin, space bin), summed
// over runs. Time bins subsample the common snapshot grid; out-of-range
// coordinates are clamped into the edge bins so each time bin holds
// exactly n_particles * n_runs counts.
Heatmap aggregate_heatmap(const std::vector<Trajectory>& trajectories, int axis, int t_bins,
                          int x_bins, double x_lo, double x_hi);

struct Curve {
  Eigen::VectorXd t;
  Eigen::VectorXd value;
};

// Across-runs median of min over a particle subset of the running-min U.
// subset_size == 0 (or == n) uses all particles; otherwise each run draws
// its own seeded subset.
Curve median_min_u_curve(const std::vector<Trajectory>& trajectories, long subset_size,
                         std::uint64_t seed);

// --- flat-file output -----------------------------------------------------

void write_trajectory_csv(const std::string& path, long run_index, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path, const Potential& pot);
void write_heatmap_csv(const std::string& path, const Heatmap& hm);
void write_curve_csv(const std::string& path, const Curve& curve);
void write_diagnostics_csv(const std::string& path, const std::vector<Trajectory>& trajectories);
void write_positions_csv(const std::string& path, const Eigen::MatrixXd& positions);
Eigen::MatrixXd read_positions_csv(const std::string& path);

}  // namespace swarm
