#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "swarm/dynamics.hpp"
#include "swarm/experiments.hpp"
#include "swarm/normalization.hpp"
#include "swarm/validate.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string method, potential, out;
  double m = -1, dt = -1, T = -1, noise_factor = -1;
  long n_particles = -1, n_runs = -1, k = -1, record_every = -1, subset_size = -1;
  long seed = -1, workers = -1, kappa = -1;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config, "config file (key = value)");
  cmd->add_option("--method", ov.method, "csg | csa | uncontrolled_swarm | langevin");
  cmd->add_option("--potential", ov.potential, "double_well | six_hump_camel");
  cmd->add_option("--m", ov.m, "swarm exponent m > 1");
  cmd->add_option("--kappa", ov.kappa, "density exponent factor (1 or 2)");
  cmd->add_option("--n-particles", ov.n_particles, "particles per run");
  cmd->add_option("--n-runs", ov.n_runs, "independent runs");
  cmd->add_option("--dt", ov.dt, "fine time step");
  cmd->add_option("--k", ov.k, "fine steps per velocity refresh");
  cmd->add_option("--T", ov.T, "final time");
  cmd->add_option("--noise-factor", ov.noise_factor, "diffusion factor (1 or 2)");
  cmd->add_option("--seed", ov.seed, "master seed");
  cmd->add_option("--out", ov.out, "output directory");
  cmd->add_option("--workers", ov.workers, "worker pool size (0 = hardware)");
  cmd->add_option("--record-every", ov.record_every, "snapshot stride in fine steps");
  cmd->add_option("--subset-size", ov.subset_size, "subset drawn from the reference ensemble");
}

swarm::RunConfig build_config(const Overrides& ov) {
  swarm::RunConfig cfg;
  if (!ov.config.empty()) cfg = swarm::parse_config_file(ov.config);
  if (!ov.method.empty()) cfg.method = ov.method;
  if (!ov.potential.empty()) cfg.potential = ov.potential;
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  if (ov.m > 0) cfg.m = ov.m;
  if (ov.kappa >= 0) cfg.kappa = static_cast<int>(ov.kappa);
  if (ov.n_particles >= 0) cfg.n_particles = ov.n_particles;
  if (ov.n_runs >= 0) cfg.n_runs = ov.n_runs;
  if (ov.dt > 0) cfg.dt = ov.dt;
  if (ov.k >= 0) cfg.k = static_cast<int>(ov.k);
  if (ov.T >= 0) cfg.T = ov.T;
  if (ov.noise_factor > 0) cfg.noise_factor = ov.noise_factor;
  if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
  if (ov.workers >= 0) cfg.workers = static_cast<int>(ov.workers);
  if (ov.record_every >= 0) cfg.record_every = static_cast<int>(ov.record_every);
  if (ov.subset_size >= 0) cfg.init.subset_size = ov.subset_size;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled swarm gradient dynamics and controlled simulated annealing"};
  app.require_subcommand(1);

  Overrides run_ov;
  CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment and write CSV artifacts");
  add_override_flags(run_cmd, run_ov);

  std::string init_kind = "uncontrolled_swarm", init_potential = "double_well", init_out;
  double init_m = 2.0, init_beta0 = 0.25, init_dt = 0.002;
  long init_n = 1000, init_steps = 10000, init_seed = 0;
  CLI::App* init_cmd =
      app.add_subcommand("init-sample", "draw an initial ensemble and write it as CSV");
  init_cmd->add_option("--kind", init_kind, "uncontrolled_swarm | langevin");
  init_cmd->add_option("--potential", init_potential, "potential name");
  init_cmd->add_option("--m", init_m, "swarm exponent (uncontrolled_swarm)");
  init_cmd->add_option("--beta0", init_beta0, "inverse temperature");
  init_cmd->add_option("--n", init_n, "sample size");
  init_cmd->add_option("--burn-in-steps", init_steps, "burn-in steps");
  init_cmd->add_option("--dt", init_dt, "burn-in time step");
  init_cmd->add_option("--seed", init_seed, "seed");
  init_cmd->add_option("--out", init_out, "output CSV path")->required();

  std::string suite = "all";
  CLI::App* validate_cmd = app.add_subcommand("validate", "run a named numeric validation suite");
  validate_cmd->add_option("suite", suite,
                           "lambert | weak-convergence | gibbs-limit | cprime | transport | all");

  std::string agg_config, agg_dir, agg_out;
  long agg_axis = 0, agg_tbins = 0, agg_xbins = 64, agg_subset = 0;
  CLI::App* agg_cmd = app.add_subcommand("aggregate", "rebuild aggregates from trajectory CSVs");
  agg_cmd->add_option("--config", agg_config, "config the trajectories were produced with")
      ->required();
  agg_cmd->add_option("--dir", agg_dir, "directory holding trajectory_run*.csv")->required();
  agg_cmd->add_option("--out", agg_out, "output directory (defaults to --dir)");
  agg_cmd->add_option("--axis", agg_axis, "coordinate index for the heatmap");
  agg_cmd->add_option("--t-bins", agg_tbins, "time bins (0 = one per snapshot)");
  agg_cmd->add_option("--x-bins", agg_xbins, "space bins");
  agg_cmd->add_option("--subset-size", agg_subset, "subset size for the median curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) {
      swarm::cli_run(build_config(run_ov));
      return 0;
    }
    if (*init_cmd) {
      const swarm::Potential& pot = swarm::potential_by_name(init_potential);
      swarm::Ensemble e;
      if (init_kind == "uncontrolled_swarm") {
        e = swarm::init_uncontrolled_swarm(pot, init_m, init_beta0, init_n, init_steps, init_dt,
                                           static_cast<std::uint64_t>(init_seed));
        std::printf("fitted C = %.12g (residual %.3g)\n", e.C, e.c_residual);
      } else if (init_kind == "langevin") {
        e = swarm::init_langevin(pot, init_beta0, init_n, init_steps, init_dt,
                                 static_cast<std::uint64_t>(init_seed));
      } else {
        throw swarm::ConfigError("init-sample: unknown kind '" + init_kind + "'");
      }
      swarm::write_positions_csv(init_out, e.positions);
      return 0;
    }
    if (*validate_cmd) {
      const auto results = swarm::run_validation_suite(suite);
      int failures = 0;
      for (const auto& r : results) {
        std::printf("%-40s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                    r.detail.c_str());
        if (!r.passed) ++failures;
      }
      return failures == 0 ? 0 : 1;
    }
    if (*agg_cmd) {
      const swarm::RunConfig cfg = swarm::parse_config_file(agg_config);
      const swarm::Potential& pot = swarm::potential_by_name(cfg.potential);
      std::vector<swarm::Trajectory> trajs;
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(agg_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("trajectory_run", 0) == 0 && entry.path().extension() == ".csv")
          files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) trajs.push_back(swarm::read_trajectory_csv(f.string(), pot));
      if (trajs.empty()) throw std::runtime_error("aggregate: no trajectory files in " + agg_dir);
      const std::string out = agg_out.empty() ? agg_dir : agg_out;
      std::filesystem::create_directories(out);
      const int tbins = agg_tbins > 0 ? static_cast<int>(agg_tbins)
                                      : static_cast<int>(trajs.front().snapshots.size());
      const swarm::Heatmap hm =
          swarm::aggregate_heatmap(trajs, static_cast<int>(agg_axis), tbins,
                                   static_cast<int>(agg_xbins), pot.box_lo[agg_axis],
                                   pot.box_hi[agg_axis]);
      swarm::write_heatmap_csv(out + "/heatmap_x" + std::to_string(agg_axis + 1) + ".csv", hm);
      const swarm::Curve curve = swarm::median_min_u_curve(trajs, agg_subset, cfg.seed);
      swarm::write_curve_csv(out + "/median_min_u.csv", curve);
      return 0;
    }
  } catch (const swarm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
