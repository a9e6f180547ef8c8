#ifndef CINEPLAN_BENCHMARK_HPP_
#define CINEPLAN_BENCHMARK_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cineplan/scenario.hpp"
#include "cineplan/simulation.hpp"

namespace cineplan {

// Keep-out geometry for sphere placement: nothing may overlap the drone's
// launch point or the corridor the actor walks, so every generated world is
// flyable and the actor never starts inside a wall. Sphere centers only go up
// to center_z_max: blockage concentrates at sightline heights instead of
// floating uselessly overhead, while the airspace above stays open for the
// planner to climb through.
struct EnvGenParams {
  Vec3 bounds_min = Vec3(-25.0, -25.0, 0.0);
  Vec3 bounds_max = Vec3(25.0, 25.0, 20.0);
  double radius_min = 2.0;
  double radius_max = 4.0;
  double center_z_max = 8.0;
  bool ground = true;
  Vec3 drone_start = Vec3(7.841, -20.0, 2.489);
  double drone_clearance = 3.0;
  Vec3 corridor_a = Vec3(0.0, -20.0, 0.9);
  Vec3 corridor_b = Vec3(0.0, 20.0, 0.9);
  double corridor_clearance = 1.0;
  int max_tries = 1000;
};

// Uniformly placed spheres with uniform radii, rejection-sampled against the
// keep-outs. Deterministic per seed. Throws std::runtime_error when a sphere
// cannot be placed within max_tries draws.
Environment random_environment(std::uint64_t seed, int n_spheres, const EnvGenParams& params);

enum class CostCondition { occ_obs, obs_only };
const char* condition_name(CostCondition c);

struct BenchConfig {
  std::vector<int> sphere_counts = {1, 20, 40};
  int seeds = 30;
  std::uint64_t seed0 = 1;
  double duration_s = 25.0;
  double replan_hz = 5.0;
  double horizon_s = 10.0;
  int n = 51;
  double tsdf_resolution = 0.5;
  double tsdf_truncation = 3.0;
  double lambda_occ = 5.0;  // weight used by the occlusion-aware condition
  EnvGenParams envgen;
};

BenchConfig load_bench_config(const std::string& path);

// The per-seed world: a randomized sphere field around a 40 m side-tracked
// actor walk. Both cost conditions share it (and its grid); only lambda_occ
// differs.
Scenario make_benchmark_scenario(std::uint64_t env_seed, int n_spheres,
                                 const BenchConfig& config);

struct BenchSeedRow {
  CostCondition condition = CostCondition::occ_obs;
  int n_spheres = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // why the seed was excluded, empty when ok
  double visibility_pct = 0.0;
  double shot_dist_mean_m = 0.0;
  int replans = 0;
  int optimizer_errors = 0;
};

struct BenchCell {
  CostCondition condition = CostCondition::occ_obs;
  int n_spheres = 0;
  int seeds_ok = 0;
  int seeds_failed = 0;
  double visibility_mean = 0.0;  // across seeds, percent
  double visibility_std = 0.0;
  double shot_dist_mean = 0.0;   // across seeds, of per-run mean distance
  double shot_dist_std = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchCell> cells;       // condition-major, sphere counts ascending
  std::vector<BenchSeedRow> per_seed;
  double median_solve_ms = 0.0;       // across every replan of every run
};

// Runs seeds x sphere-counts x both cost conditions sequentially (seeds are
// independent; the merge order is fixed, so the result does not depend on
// scheduling). The TSDF is built once per world and reused by both
// conditions. Failed seeds are excluded from the cell stats and counted.
// Progress lines go to *progress when given.
BenchmarkResult run_benchmark(const BenchConfig& config, std::ostream* progress = nullptr);

void write_bench_table_csv(const BenchmarkResult& result, const std::string& path);
void write_bench_per_seed_csv(const BenchmarkResult& result, const std::string& path);

}  // namespace cineplan

#endif  // CINEPLAN_BENCHMARK_HPP_
