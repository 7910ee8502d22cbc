#include "swarm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "swarm/normalization.hpp"
#include "swarm/rng.hpp"
#include "swarm/warnings.hpp"

namespace swarm {

namespace {
constexpr std::uint64_t kCurveSubsetRole = 0xC0DE5;
}

void validate_config(const RunConfig& cfg) {
  method_from_name(cfg.method);  // throws on unknown
  try {
    potential_by_name(cfg.potential);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  warn_if_subunit_beta0(cfg.schedule);
  if (!(cfg.m > 1.0)) throw ConfigError("config: m must be > 1");
  if (cfg.kappa != 1 && cfg.kappa != 2) throw ConfigError("config: kappa must be 1 or 2");
  if (cfg.n_particles < 1) throw ConfigError("config: n_particles must be >= 1");
  if (cfg.n_runs < 1) throw ConfigError("config: n_runs must be >= 1");
  if (!(cfg.dt > 0.0)) throw ConfigError("config: dt must be > 0");
  if (cfg.k < 1) throw ConfigError("config: k must be >= 1");
  if (!(cfg.T >= 0.0)) throw ConfigError("config: T must be >= 0");
  if (cfg.noise_factor != 1.0 && cfg.noise_factor != 2.0)
    throw ConfigError("config: noise_factor must be 1 or 2");
  if (!(cfg.c_tol > 0.0)) throw ConfigError("config: c_tol must be > 0");
  if (cfg.c_bracket_expansions < 1) throw ConfigError("config: c_bracket_expansions must be >= 1");
  if (!(cfg.ot_tolerance > 0.0)) throw ConfigError("config: ot_tolerance must be > 0");
  if (cfg.record_every < 0) throw ConfigError("config: record_every must be >= 0");
  if (cfg.workers < 0) throw ConfigError("config: workers must be >= 0");
  const double steps = cfg.T / cfg.dt;
  if (std::abs(steps - std::lround(steps)) > 1e-6 * std::max(1.0, steps))
    throw ConfigError("config: T must be an integral number of dt steps");

  const auto& init = cfg.init;
  if (init.kind != "uncontrolled_swarm" && init.kind != "langevin" && init.kind != "mixture" &&
      init.kind != "uniform" && init.kind != "file")
    throw ConfigError("config: unknown init kind '" + init.kind + "'");
  if (init.kind == "mixture") {
    if (init.centers.empty()) throw ConfigError("config: mixture init needs init.centers");
    const auto& pot = potential_by_name(cfg.potential);
    for (const auto& c : init.centers)
      if (c.size() != pot.dim) throw ConfigError("config: mixture center dimension mismatch");
    if (!(init.cov_scale > 0.0)) throw ConfigError("config: cov_scale must be > 0");
  }
  if (init.kind == "file" && init.file.empty())
    throw ConfigError("config: file init needs init.file");
  if (init.kind != "file" && init.kind != "mixture") {
    if (init.burn_in_steps < 0) throw ConfigError("config: burn_in_steps must be >= 0");
    if (!(init.burn_in_dt > 0.0)) throw ConfigError("config: burn_in_dt must be > 0");
  }
  if (init.subset_size < 0) throw ConfigError("config: subset_size must be >= 0");
  if (init.subset_size > 0) {
    if (init.subset_size != cfg.n_particles)
      throw ConfigError("config: subset_size must equal n_particles");
    const long nref = init.reference_n > 0 ? init.reference_n : cfg.n_particles;
    if (init.subset_size > nref)
      throw ConfigError("config: subset_size exceeds the reference ensemble size");
  }
}

int resolve_workers(int requested, long n_runs) {
  int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("SWARM_ANNEAL_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap > 0) w = std::min(w, cap);
  }
  return static_cast<int>(std::min<long>(w, n_runs));
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  const Potential& pot = potential_by_name(cfg.potential);

  ExperimentResult result;
  const bool subsetting = cfg.init.subset_size > 0;
  const bool from_file = cfg.init.kind == "file";
  if (subsetting || from_file) {
    const long nref = cfg.init.reference_n > 0 ? cfg.init.reference_n : cfg.n_particles;
    const std::uint64_t rseed = cfg.init.reference_seed ? cfg.init.reference_seed
                                                        : derive_key(cfg.seed, 0xFACADE);
    const double beta0 = cfg.init.beta0 > 0.0 ? cfg.init.beta0 : cfg.schedule.beta0;
    if (from_file) {
      result.reference = read_positions_csv(cfg.init.file);
    } else if (cfg.init.kind == "uncontrolled_swarm") {
      Ensemble ref = init_uncontrolled_swarm(pot, cfg.m, beta0, nref, cfg.init.burn_in_steps,
                                             cfg.init.burn_in_dt, rseed);
      result.reference = std::move(ref.positions);
    } else if (cfg.init.kind == "langevin") {
      Ensemble ref =
          init_langevin(pot, beta0, nref, cfg.init.burn_in_steps, cfg.init.burn_in_dt, rseed);
      result.reference = std::move(ref.positions);
    } else if (cfg.init.kind == "mixture") {
      Ensemble ref = init_mixture(cfg.init.centers, cfg.init.cov_scale, nref, rseed, pot);
      result.reference = std::move(ref.positions);
    } else if (cfg.init.kind == "uniform") {
      Ensemble ref = init_uniform(pot, nref, rseed);
      result.reference = std::move(ref.positions);
    }
    if (cfg.method_enum() == Method::csg) {
      const CState st = estimate_C_empirical(result.reference, pot,
                                             {cfg.m, beta(cfg.schedule, 0.0), 0.0, cfg.kappa},
                                             cfg.c_tol, cfg.c_bracket_expansions);
      result.reference_C = st.C;
    }
    if (!subsetting && result.reference.rows() != cfg.n_particles)
      throw ConfigError("config: reference sample size does not match n_particles");
  }

  result.trajectories.resize(static_cast<std::size_t>(cfg.n_runs));
  const int workers = resolve_workers(cfg.workers, cfg.n_runs);
  const Eigen::MatrixXd* ref =
      result.reference.size() > 0 ? &result.reference : nullptr;

  std::atomic<long> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&]() {
    while (true) {
      const long r = next.fetch_add(1);
      if (r >= cfg.n_runs) break;
      try {
        result.trajectories[static_cast<std::size_t>(r)] =
            run_single(cfg, static_cast<std::uint64_t>(r), ref, result.reference_C);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

Heatmap aggregate_heatmap(const std::vector<Trajectory>& trajectories, int axis, int t_bins,
                          int x_bins, double x_lo, double x_hi) {
  if (trajectories.empty()) throw std::invalid_argument("aggregate_heatmap: no trajectories");
  const Eigen::Index snaps = static_cast<Eigen::Index>(trajectories.front().snapshots.size());
  const Eigen::Index dim = trajectories.front().snapshots.front().positions.cols();
  if (axis < 0 || axis >= dim) throw std::invalid_argument("aggregate_heatmap: axis out of range");
  if (x_bins < 1 || t_bins < 1) throw std::invalid_argument("aggregate_heatmap: empty bin grid");
  if (!(x_hi > x_lo)) throw std::invalid_argument("aggregate_heatmap: empty x range");
  for (const auto& traj : trajectories)
    if (static_cast<Eigen::Index>(traj.snapshots.size()) != snaps)
      throw std::invalid_argument("aggregate_heatmap: inconsistent snapshot grids");
  if (t_bins > snaps) t_bins = static_cast<int>(snaps);

  Heatmap hm;
  hm.t_values.resize(t_bins);
  hm.x_edges.resize(x_bins + 1);
  for (int b = 0; b <= x_bins; ++b) hm.x_edges[b] = x_lo + (x_hi - x_lo) * b / x_bins;
  hm.counts = Eigen::MatrixXi::Zero(t_bins, x_bins);

  for (int tb = 0; tb < t_bins; ++tb) {
    const Eigen::Index sidx =
        (t_bins == 1) ? snaps - 1
                      : static_cast<Eigen::Index>(std::llround(
                            static_cast<double>(tb) * (snaps - 1) / (t_bins - 1)));
    hm.t_values[tb] = trajectories.front().snapshots[sidx].t;
    for (const auto& traj : trajectories) {
      const auto& x = traj.snapshots[sidx].positions;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int b = static_cast<int>(std::floor((x(i, axis) - x_lo) / (x_hi - x_lo) * x_bins));
        b = std::clamp(b, 0, x_bins - 1);  // clamp keeps per-bin mass exact
        ++hm.counts(tb, b);
      }
    }
  }
  return hm;
}

Curve median_min_u_curve(const std::vector<Trajectory>& trajectories, long subset_size,
                         std::uint64_t seed) {
  if (trajectories.empty()) throw std::invalid_argument("median_min_u_curve: no trajectories");
  const std::size_t snaps = trajectories.front().snapshots.size();
  const long n = trajectories.front().snapshots.front().min_u_so_far.size();
  if (subset_size > n)
    throw std::invalid_argument("median_min_u_curve: subset_size exceeds particle count");
  for (const auto& traj : trajectories) {
    if (traj.snapshots.size() != snaps)
      throw std::invalid_argument("median_min_u_curve: inconsistent snapshot grids");
    if (traj.snapshots.front().min_u_so_far.size() != n)
      throw std::invalid_argument("median_min_u_curve: inconsistent particle counts");
  }

  Curve curve;
  curve.t.resize(static_cast<Eigen::Index>(snaps));
  curve.value.resize(static_cast<Eigen::Index>(snaps));
  for (std::size_t s = 0; s < snaps; ++s)
    curve.t[static_cast<Eigen::Index>(s)] = trajectories.front().snapshots[s].t;

  // per run: the particle subset (all particles when subset_size == 0 or n)
  std::vector<std::vector<long>> subsets(trajectories.size());
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    if (subset_size <= 0 || subset_size == n) {
      subsets[r].resize(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) subsets[r][static_cast<std::size_t>(i)] = i;
    } else {
      RngStream pick = make_stream(derive_key(seed, kCurveSubsetRole), r);
      std::vector<long> idx(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
      for (long i = 0; i < subset_size; ++i) {
        const long j = i + static_cast<long>(pick.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      }
      subsets[r].assign(idx.begin(), idx.begin() + subset_size);
    }
  }

  std::vector<double> vals(trajectories.size());
  for (std::size_t s = 0; s < snaps; ++s) {
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
      const auto& mu = trajectories[r].snapshots[s].min_u_so_far;
      double best = std::numeric_limits<double>::infinity();
      for (long i : subsets[r]) best = std::min(best, mu[i]);
      vals[r] = best;
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t half = vals.size() / 2;
    curve.value[static_cast<Eigen::Index>(s)] =
        (vals.size() % 2 == 1) ? vals[half] : 0.5 * (vals[half - 1] + vals[half]);
  }
  return curve;
}

void cli_run(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.out_dir.empty()) throw ConfigError("config: output directory ('out') is required");
  std::filesystem::create_directories(cfg.out_dir);

  const ExperimentResult result = run_experiment(cfg);
  const Potential& pot = potential_by_name(cfg.potential);

  char name[64];
  for (std::size_t r = 0; r < result.trajectories.size(); ++r) {
    std::snprintf(name, sizeof(name), "trajectory_run%04zu.csv", r);
    write_trajectory_csv(cfg.out_dir + "/" + name, static_cast<long>(r), result.trajectories[r]);
  }
  write_diagnostics_csv(cfg.out_dir + "/diagnostics.csv", result.trajectories);
  if (result.reference.size() > 0)
    write_positions_csv(cfg.out_dir + "/reference_sample.csv", result.reference);

  const int snaps = static_cast<int>(result.trajectories.front().snapshots.size());
  const Heatmap hm = aggregate_heatmap(result.trajectories, 0, snaps, 64, pot.box_lo[0],
                                       pot.box_hi[0]);
  write_heatmap_csv(cfg.out_dir + "/heatmap_x1.csv", hm);
  const Curve curve = median_min_u_curve(result.trajectories, 0, cfg.seed);
  write_curve_csv(cfg.out_dir + "/median_min_u.csv", curve);
}

}  // namespace swarm
