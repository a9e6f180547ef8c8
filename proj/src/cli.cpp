#include "cineplan/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cineplan/benchmark.hpp"
#include "cineplan/scenario.hpp"
#include "cineplan/simulation.hpp"

namespace cineplan {
namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> horizon_s;
  std::optional<double> lambda1;  // obstacle weight
  std::optional<double> lambda2;  // occlusion weight
  std::optional<double> lambda3;  // viewpoint weight
  std::optional<double> eta;
  std::optional<int> tau_samples;
};

void add_override_flags(CLI::App* cmd, Overrides* ov) {
  cmd->add_option("--seed", ov->seed, "Override the scenario seed");
  cmd->add_option("--n", ov->n, "Override the waypoint count");
  cmd->add_option("--horizon", ov->horizon_s, "Override the planning horizon, seconds");
  cmd->add_option("--lambda1", ov->lambda1, "Override the obstacle weight");
  cmd->add_option("--lambda2", ov->lambda2, "Override the occlusion weight");
  cmd->add_option("--lambda3", ov->lambda3, "Override the viewpoint weight");
  cmd->add_option("--eta", ov->eta, "Override the descent step scale");
  cmd->add_option("--tau-samples", ov->tau_samples, "Override sightline quadrature nodes");
}

void apply(const Overrides& ov, Scenario* sc) {
  if (ov.seed) sc->seed = *ov.seed;
  if (ov.n) sc->n = *ov.n;
  if (ov.horizon_s) sc->horizon_s = *ov.horizon_s;
  if (ov.lambda1) sc->costs.lambda_obs = *ov.lambda1;
  if (ov.lambda2) sc->costs.lambda_occ = *ov.lambda2;
  if (ov.lambda3) sc->costs.lambda_shot = *ov.lambda3;
  if (ov.eta) sc->optimizer.eta = *ov.eta;
  if (ov.tau_samples) sc->costs.tau_samples = *ov.tau_samples;
  validate(*sc);
}

std::string default_out_dir() {
  if (const char* env = std::getenv("CINEPLAN_OUT_DIR"); env && *env) return env;
  return ".";
}

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Single-shot planning: one optimize call against the scripted actor's
// constant-velocity extrapolation from t = 0, no filtering involved.
int cmd_plan(const Scenario& sc, const std::string& out_dir) {
  const TsdfGrid grid = build_tsdf(sc.environment, sc.tsdf);

  ActorState actor0;
  actor0.position = sc.actor.position(0.0);
  actor0.velocity = sc.actor.velocity_at(0.0);
  actor0.heading = sc.actor.initial_heading();
  const ActorForecast forecast = forecast_actor(actor0, sc.horizon_s, sc.n);
  const Trajectory xi_shot =
      ideal_shot_trajectory(forecast.trajectory, forecast.headings, sc.shot);

  const BoundaryCondition bc = sc.drone_start;
  const SmoothnessOperator op = build_smoothness_operator(sc.n, xi_shot.dt(), bc);
  const SmoothnessMetric metric(op, sc.costs.lambda_shot);
  CostContext ctx = sc.costs;
  ctx.grid = &grid;
  ctx.actor = forecast.trajectory;

  const Trajectory init =
      line_trajectory(bc.start_position, xi_shot.point(sc.n - 1), sc.n, sc.horizon_s);
  const OptResult res = optimize(init, ctx, op, xi_shot, metric, sc.optimizer);

  const fs::path dir = ensure_out_dir(out_dir);
  {
    std::ostringstream out;
    out << "k,time_s,x,y,z\n";
    for (int k = 0; k < res.trajectory.n(); ++k) {
      out << k << ',' << fmt(k * res.trajectory.dt()) << ',' << fmt(res.trajectory.point(k).x())
          << ',' << fmt(res.trajectory.point(k).y()) << ','
          << fmt(res.trajectory.point(k).z()) << '\n';
    }
    write_file(dir / "trajectory.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "iteration,total,smooth,obs,occ,shot\n";
    for (std::size_t i = 0; i < res.breakdown_history.size(); ++i) {
      const TotalCost& c = res.breakdown_history[i];
      out << i << ',' << fmt(c.total) << ',' << fmt(c.smooth) << ',' << fmt(c.obs) << ','
          << fmt(c.occ) << ',' << fmt(c.shot) << '\n';
    }
    write_file(dir / "cost_history.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "k,time_s,q_x,q_y,q_z,actor_x,actor_y,actor_z,shot_x,shot_y,shot_z\n";
    for (int k = 0; k < res.trajectory.n(); ++k) {
      out << k << ',' << fmt(k * res.trajectory.dt());
      for (const Vec3& p :
           {res.trajectory.point(k), forecast.trajectory.point(k), xi_shot.point(k)}) {
        out << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z());
      }
      out << '\n';
    }
    write_file(dir / "plot_data.csv", out.str());
  }

  std::cout << "plan: " << res.iterations << " iterations, cost " << fmt(res.final_cost)
            << " (smooth " << fmt(res.breakdown.smooth) << ", obs " << fmt(res.breakdown.obs)
            << ", occ " << fmt(res.breakdown.occ) << ", shot " << fmt(res.breakdown.shot)
            << "), " << termination_name(res.termination) << "\n"
            << "wrote " << (dir / "trajectory.csv").string() << ", "
            << (dir / "cost_history.csv").string() << ", "
            << (dir / "plot_data.csv").string() << "\n";
  if (res.numerical_error) {
    std::cerr << "plan: optimizer hit a numerical error; outputs hold the best iterate\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

int cmd_sim(const Scenario& sc, const std::string& out_dir) {
  const SimLog log = run_simulation(sc);
  const fs::path dir = ensure_out_dir(out_dir);
  write_log_csv(log, (dir / "log.csv").string());
  write_summary_csv(log, (dir / "summary.csv").string());
  write_replay_json(log, (dir / "replay.json").string());

  const double vis = visibility_metric(log);
  const DistanceStats dist = shot_distance_metric(log);
  const double step = max_executed_step(log);
  const double step_bound = 7.5 / sc.replan_hz;
  std::cout << "sim '" << sc.name << "': " << log.records.size() << " replans, visibility "
            << fmt(vis) << "%, shot distance " << fmt(dist.mean) << " +/- "
            << fmt(dist.stddev) << " m, median solve " << fmt(median_solve_ms(log))
            << " ms\n"
            << "wrote " << (dir / "log.csv").string() << ", "
            << (dir / "summary.csv").string() << ", " << (dir / "replay.json").string()
            << "\n";
  if (step > step_bound) {
    std::cerr << "sim: executed step " << fmt(step) << " m exceeds the " << fmt(step_bound)
              << " m continuity bound\n";
  }
  return kExitOk;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out_dir) {
  const BenchmarkResult result = run_benchmark(cfg, &std::cout);
  const fs::path dir = ensure_out_dir(out_dir);
  write_bench_table_csv(result, (dir / "table.csv").string());
  write_bench_per_seed_csv(result, (dir / "per_seed.csv").string());

  int failed = 0;
  for (const BenchCell& c : result.cells) {
    std::cout << condition_name(c.condition) << " @ " << c.n_spheres << " spheres: visibility "
              << fmt(c.visibility_mean) << " +/- " << fmt(c.visibility_std)
              << " %, shot distance " << fmt(c.shot_dist_mean) << " +/- "
              << fmt(c.shot_dist_std) << " m (" << c.seeds_ok << " seeds";
    if (c.seeds_failed > 0) std::cout << ", " << c.seeds_failed << " failed";
    std::cout << ")\n";
    failed += c.seeds_failed;
  }
  std::cout << "median solve " << fmt(result.median_solve_ms) << " ms\n"
            << "wrote " << (dir / "table.csv").string() << ", "
            << (dir / "per_seed.csv").string() << "\n";
  if (failed > 0) {
    const bool any_ok =
        std::any_of(result.cells.begin(), result.cells.end(),
                    [](const BenchCell& c) { return c.seeds_ok > 0; });
    std::cerr << "bench: " << failed << " seed runs failed and were excluded\n";
    return any_ok ? kExitPartialBench : kExitRuntimeError;
  }
  return kExitOk;
}

int cmd_tsdf(const Scenario& sc, std::optional<double> resolution,
             std::optional<double> truncation, const std::string& out_dir) {
  TsdfBuildParams params = sc.tsdf;
  if (resolution) params.resolution = *resolution;
  if (truncation) params.truncation = *truncation;
  const TsdfGrid grid = build_tsdf(sc.environment, params);
  const fs::path dir = ensure_out_dir(out_dir);
  const fs::path path = dir / "grid.tsdf";
  save_tsdf(grid, path.string());
  const double mb =
      static_cast<double>(grid.voxel_count() * sizeof(float)) / (1024.0 * 1024.0);
  std::cout << "tsdf: " << grid.nx() << " x " << grid.ny() << " x " << grid.nz() << " = "
            << grid.voxel_count() << " voxels at " << fmt(params.resolution) << " m ("
            << std::fixed << std::setprecision(1) << mb << " MiB), truncation "
            << fmt(params.truncation) << " m\n"
            << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Camera-drone trajectory planning: single solves, closed-loop simulation, "
               "randomized benchmarks, and distance-field tools"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = default_out_dir();
  std::string bench_config_path;
  Overrides ov;
  std::optional<double> tsdf_resolution, tsdf_truncation;
  std::optional<int> bench_seeds;
  std::optional<std::uint64_t> bench_seed0;
  std::vector<int> bench_counts;

  CLI::App* plan = app.add_subcommand("plan", "One optimization pass, written as CSV");
  CLI::App* sim = app.add_subcommand("sim", "Closed-loop replanning run");
  CLI::App* bench = app.add_subcommand("bench", "Randomized-environment benchmark table");
  CLI::App* tsdf = app.add_subcommand("tsdf", "Build and save the scenario's distance field");

  for (CLI::App* cmd : {plan, sim, tsdf}) {
    cmd->add_option("-s,--scenario", scenario_path, "Scenario config file (YAML)")
        ->required();
  }
  for (CLI::App* cmd : {plan, sim, bench, tsdf}) {
    cmd->add_option("-o,--out", out_dir,
                    "Output directory (default: $CINEPLAN_OUT_DIR or the working directory)");
  }
  add_override_flags(plan, &ov);
  add_override_flags(sim, &ov);
  bench->add_option("-c,--config", bench_config_path, "Benchmark config file (YAML)");
  bench->add_option("--seeds", bench_seeds, "Override the seed count");
  bench->add_option("--seed0", bench_seed0, "Override the first seed");
  bench->add_option("--counts", bench_counts, "Override the sphere counts");
  tsdf->add_option("--resolution", tsdf_resolution, "Voxel size, meters");
  tsdf->add_option("--truncation", tsdf_truncation, "Distance clamp, meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (bench->parsed()) {
      BenchConfig cfg;
      if (!bench_config_path.empty()) cfg = load_bench_config(bench_config_path);
      if (bench_seeds) cfg.seeds = *bench_seeds;
      if (bench_seed0) cfg.seed0 = *bench_seed0;
      if (!bench_counts.empty()) cfg.sphere_counts = bench_counts;
      try {
        return cmd_bench(cfg, out_dir);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
      }
    }

    Scenario sc = load_scenario(scenario_path);
    apply(ov, &sc);
    try {
      if (plan->parsed()) return cmd_plan(sc, out_dir);
      if (sim->parsed()) return cmd_sim(sc, out_dir);
      if (tsdf->parsed()) return cmd_tsdf(sc, tsdf_resolution, tsdf_truncation, out_dir);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitRuntimeError;
    }
    return kExitConfigError;  // unreachable with require_subcommand(1)
  } catch (const std::exception& e) {
    // Everything up to the actual run is configuration.
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace cineplan
