#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cineplan/benchmark.hpp"

using namespace cineplan;

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

BenchConfig tiny_config() {
  BenchConfig cfg;
  cfg.seeds = 2;
  cfg.sphere_counts = {1, 8};
  cfg.duration_s = 4.0;
  cfg.n = 21;
  cfg.horizon_s = 6.0;
  cfg.tsdf_resolution = 0.75;
  return cfg;
}

}  // namespace

TEST_CASE("zero spheres yields an empty environment") {
  const Environment env = random_environment(3, 0, {});
  CHECK(env.spheres.empty());
  CHECK(env.bounds_min == EnvGenParams{}.bounds_min);
  CHECK(env.bounds_max == EnvGenParams{}.bounds_max);
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  const EnvGenParams p;
  const Environment a = random_environment(11, 25, p);
  const Environment b = random_environment(11, 25, p);
  const Environment c = random_environment(12, 25, p);
  REQUIRE(a.spheres.size() == 25);
  REQUIRE(b.spheres.size() == 25);
  for (std::size_t i = 0; i < a.spheres.size(); ++i) {
    CHECK(a.spheres[i].center == b.spheres[i].center);
    CHECK(a.spheres[i].radius == b.spheres[i].radius);
  }
  bool differs = false;
  for (std::size_t i = 0; i < c.spheres.size() && !differs; ++i) {
    differs = a.spheres[i].center != c.spheres[i].center;
  }
  CHECK(differs);
}

TEST_CASE("spheres respect the keep-out geometry across many seeds") {
  const EnvGenParams p;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const Environment env = random_environment(seed, 40, p);
    REQUIRE(env.spheres.size() == 40);
    for (const SphereObstacle& s : env.spheres) {
      CHECK(s.radius >= p.radius_min);
      CHECK(s.radius <= p.radius_max);
      CHECK((s.center.array() >= p.bounds_min.array()).all());
      CHECK((s.center.array() <= p.bounds_max.array()).all());
      CHECK(s.center.z() <= p.center_z_max);
      // No sphere touches the actor corridor or the launch point.
      CHECK(point_segment_distance(s.center, p.corridor_a, p.corridor_b) >=
            s.radius + p.corridor_clearance);
      CHECK((s.center - p.drone_start).norm() >= s.radius + p.drone_clearance);
    }
  }
}

TEST_CASE("impossible placements fail loudly instead of spinning") {
  EnvGenParams p;
  p.bounds_min = Vec3(-1, -1, 0);
  p.bounds_max = Vec3(1, 1, 1);  // the corridor keep-out covers the whole box
  p.corridor_a = Vec3(0, -1, 0.5);
  p.corridor_b = Vec3(0, 1, 0.5);
  p.max_tries = 50;
  CHECK_THROWS_AS(random_environment(1, 1, p), std::runtime_error);
}

TEST_CASE("benchmark scenarios share the world between conditions") {
  const BenchConfig cfg = tiny_config();
  const Scenario sc = make_benchmark_scenario(77, 8, cfg);
  CHECK(sc.environment.spheres.size() == 8);
  CHECK(sc.costs.lambda_occ == doctest::Approx(cfg.lambda_occ));
  CHECK(sc.n == cfg.n);
  // The drone launches clear of every sphere, and the actor walks a clear
  // corridor.
  CHECK(analytic_distance(sc.environment, sc.drone_start.start_position) > 0.0);
  for (double t = 0.0; t <= cfg.duration_s; t += 0.5) {
    CHECK(analytic_distance(sc.environment, sc.actor.position(t)) > 0.0);
  }
}

TEST_CASE("a tiny benchmark runs, aggregates, and repeats exactly") {
  const BenchConfig cfg = tiny_config();
  const BenchmarkResult result = run_benchmark(cfg);

  // One cell per condition x sphere count, one row per condition x count x seed.
  REQUIRE(result.cells.size() == 4);
  REQUIRE(result.per_seed.size() == 8);
  for (const BenchCell& cell : result.cells) {
    CHECK(cell.seeds_ok + cell.seeds_failed == cfg.seeds);
    CHECK(cell.visibility_mean >= 0.0);
    CHECK(cell.visibility_mean <= 100.0);
    CHECK(cell.shot_dist_mean >= 0.0);
  }
  // Rows are ordered condition-major, then by sphere count, then seed.
  for (std::size_t i = 1; i < result.per_seed.size(); ++i) {
    const BenchSeedRow& a = result.per_seed[i - 1];
    const BenchSeedRow& b = result.per_seed[i];
    const auto key = [](const BenchSeedRow& r) {
      return std::make_tuple(static_cast<int>(r.condition), r.n_spheres, r.seed);
    };
    CHECK(key(a) < key(b));
  }

  // Cell means match a recomputation from the per-seed rows.
  for (const BenchCell& cell : result.cells) {
    double sum = 0.0;
    int count = 0;
    for (const BenchSeedRow& row : result.per_seed) {
      if (row.condition == cell.condition && row.n_spheres == cell.n_spheres && row.ok) {
        sum += row.visibility_pct;
        ++count;
      }
    }
    REQUIRE(count == cell.seeds_ok);
    if (count > 0) CHECK(cell.visibility_mean == doctest::Approx(sum / count));
  }

  const BenchmarkResult again = run_benchmark(cfg);
  REQUIRE(again.per_seed.size() == result.per_seed.size());
  for (std::size_t i = 0; i < result.per_seed.size(); ++i) {
    CHECK(again.per_seed[i].visibility_pct == result.per_seed[i].visibility_pct);
    CHECK(again.per_seed[i].shot_dist_mean_m == result.per_seed[i].shot_dist_mean_m);
    CHECK(again.per_seed[i].ok == result.per_seed[i].ok);
  }
}
