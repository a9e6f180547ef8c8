#include "cineplan/benchmark.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cineplan {
namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats sample_stats(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace

Environment random_environment(std::uint64_t seed, int n_spheres, const EnvGenParams& p) {
  if (n_spheres < 0) throw std::invalid_argument("n_spheres must be non-negative");
  if (p.radius_min <= 0.0 || p.radius_max < p.radius_min) {
    throw std::invalid_argument("sphere radius range out of order");
  }
  Environment env;
  env.bounds_min = p.bounds_min;
  env.bounds_max = p.bounds_max;
  if (p.ground) env.ground_z = p.bounds_min.z();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(p.radius_min, p.radius_max);
  std::uniform_real_distribution<double> ux(p.bounds_min.x(), p.bounds_max.x());
  std::uniform_real_distribution<double> uy(p.bounds_min.y(), p.bounds_max.y());
  std::uniform_real_distribution<double> uz(
      p.bounds_min.z(), std::min(p.bounds_max.z(), p.center_z_max));

  for (int i = 0; i < n_spheres; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < p.max_tries; ++attempt) {
      SphereObstacle s;
      s.radius = radius(rng);
      s.center = Vec3(ux(rng), uy(rng), uz(rng));
      if ((s.center - p.drone_start).norm() < s.radius + p.drone_clearance) continue;
      if (point_segment_distance(s.center, p.corridor_a, p.corridor_b) <
          s.radius + p.corridor_clearance) {
        continue;
      }
      env.spheres.push_back(s);
      placed = true;
      break;
    }
    if (!placed) {
      throw std::runtime_error("sphere placement failed after " +
                               std::to_string(p.max_tries) + " tries (sphere " +
                               std::to_string(i) + ", seed " + std::to_string(seed) + ")");
    }
  }
  return env;
}

const char* condition_name(CostCondition c) {
  return c == CostCondition::occ_obs ? "occ_obs" : "obs_only";
}

Scenario make_benchmark_scenario(std::uint64_t env_seed, int n_spheres,
                                 const BenchConfig& cfg) {
  Scenario sc;
  sc.name = "bench_" + std::to_string(n_spheres) + "sph";
  sc.seed = env_seed;
  sc.duration_s = cfg.duration_s;
  sc.replan_hz = cfg.replan_hz;
  sc.horizon_s = cfg.horizon_s;
  sc.n = cfg.n;
  sc.environment = random_environment(env_seed, n_spheres, cfg.envgen);
  sc.tsdf.resolution = cfg.tsdf_resolution;
  sc.tsdf.truncation = cfg.tsdf_truncation;

  const Vec3 dir = (cfg.envgen.corridor_b - cfg.envgen.corridor_a).normalized();
  sc.actor.path = ActorScript::Path::line;
  sc.actor.start = cfg.envgen.corridor_a;
  sc.actor.velocity = 1.5 * dir;

  ShotKeyframe kf;
  kf.spec.distance_rho = 8.0;
  kf.spec.phi_rel = -std::numbers::pi / 2.0;
  kf.spec.theta_rel = 0.2;
  sc.shot.keyframes.push_back(kf);

  sc.drone_start.start_position = cfg.envgen.drone_start;
  sc.drone_start.start_velocity = sc.actor.velocity;
  sc.costs.lambda_occ = cfg.lambda_occ;
  return sc;
}

BenchmarkResult run_benchmark(const BenchConfig& cfg, std::ostream* progress) {
  if (cfg.seeds < 1) throw std::invalid_argument("benchmark needs at least one seed");
  if (cfg.sphere_counts.empty()) {
    throw std::invalid_argument("benchmark needs at least one sphere count");
  }

  BenchmarkResult out;
  std::vector<double> all_solve_ms;

  for (int count : cfg.sphere_counts) {
    for (int i = 0; i < cfg.seeds; ++i) {
      const std::uint64_t seed = cfg.seed0 + static_cast<std::uint64_t>(i);
      const std::uint64_t env_seed = seed * 1000003ULL + static_cast<std::uint64_t>(count);

      std::optional<Scenario> base;
      std::unique_ptr<TsdfGrid> grid;
      std::string world_error;
      try {
        base.emplace(make_benchmark_scenario(env_seed, count, cfg));
        grid = std::make_unique<TsdfGrid>(build_tsdf(base->environment, base->tsdf));
      } catch (const std::exception& e) {
        world_error = e.what();
      }

      for (CostCondition cond : {CostCondition::occ_obs, CostCondition::obs_only}) {
        BenchSeedRow row;
        row.condition = cond;
        row.n_spheres = count;
        row.seed = seed;
        if (!world_error.empty()) {
          row.error = world_error;
        } else {
          try {
            Scenario sc = *base;
            if (cond == CostCondition::obs_only) sc.costs.lambda_occ = 0.0;
            const SimLog log = run_simulation(sc, *grid);
            row.ok = true;
            row.visibility_pct = visibility_metric(log);
            row.shot_dist_mean_m = shot_distance_metric(log).mean;
            row.replans = static_cast<int>(log.records.size());
            for (const SimRecord& r : log.records) {
              all_solve_ms.push_back(r.solve_ms);
              row.optimizer_errors += r.optimizer_error ? 1 : 0;
            }
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
        out.per_seed.push_back(row);
      }
      if (progress) {
        const BenchSeedRow& occ = out.per_seed[out.per_seed.size() - 2];
        const BenchSeedRow& obs = out.per_seed.back();
        *progress << "spheres " << count << " seed " << seed << ": occ_obs vis "
                  << (occ.ok ? fmt(occ.visibility_pct) : "failed") << "%, obs_only vis "
                  << (obs.ok ? fmt(obs.visibility_pct) : "failed") << "%\n";
      }
    }
  }

  std::sort(out.per_seed.begin(), out.per_seed.end(),
            [](const BenchSeedRow& a, const BenchSeedRow& b) {
              if (a.condition != b.condition) {
                return static_cast<int>(a.condition) < static_cast<int>(b.condition);
              }
              if (a.n_spheres != b.n_spheres) return a.n_spheres < b.n_spheres;
              return a.seed < b.seed;
            });

  for (CostCondition cond : {CostCondition::occ_obs, CostCondition::obs_only}) {
    for (int count : cfg.sphere_counts) {
      BenchCell cell;
      cell.condition = cond;
      cell.n_spheres = count;
      std::vector<double> vis, dist;
      for (const BenchSeedRow& row : out.per_seed) {
        if (row.condition != cond || row.n_spheres != count) continue;
        if (!row.ok) {
          ++cell.seeds_failed;
          continue;
        }
        ++cell.seeds_ok;
        vis.push_back(row.visibility_pct);
        dist.push_back(row.shot_dist_mean_m);
      }
      const Stats v = sample_stats(vis);
      const Stats d = sample_stats(dist);
      cell.visibility_mean = v.mean;
      cell.visibility_std = v.stddev;
      cell.shot_dist_mean = d.mean;
      cell.shot_dist_std = d.stddev;
      out.cells.push_back(cell);
    }
  }

  if (!all_solve_ms.empty()) {
    std::sort(all_solve_ms.begin(), all_solve_ms.end());
    const std::size_t n = all_solve_ms.size();
    out.median_solve_ms =
        n % 2 == 1 ? all_solve_ms[n / 2]
                   : 0.5 * (all_solve_ms[n / 2 - 1] + all_solve_ms[n / 2]);
  }
  return out;
}

void write_bench_table_csv(const BenchmarkResult& result, const std::string& path) {
  std::ostringstream out;
  out << "condition,spheres,seeds_ok,seeds_failed,visibility_mean_pct,visibility_std_pct,"
         "shot_dist_mean_m,shot_dist_std_m\n";
  for (const BenchCell& c : result.cells) {
    out << condition_name(c.condition) << ',' << c.n_spheres << ',' << c.seeds_ok << ','
        << c.seeds_failed << ',' << fmt(c.visibility_mean) << ',' << fmt(c.visibility_std)
        << ',' << fmt(c.shot_dist_mean) << ',' << fmt(c.shot_dist_std) << '\n';
  }
  write_file(path, out.str());
}

void write_bench_per_seed_csv(const BenchmarkResult& result, const std::string& path) {
  std::ostringstream out;
  out << "condition,spheres,seed,ok,visibility_pct,shot_dist_mean_m,replans,"
         "optimizer_errors,error\n";
  for (const BenchSeedRow& r : result.per_seed) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << condition_name(r.condition) << ',' << r.n_spheres << ',' << r.seed << ','
        << (r.ok ? 1 : 0) << ',' << fmt(r.visibility_pct) << ',' << fmt(r.shot_dist_mean_m)
        << ',' << r.replans << ',' << r.optimizer_errors << ',' << err << '\n';
  }
  write_file(path, out.str());
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  YAML::Node root;
  try {
    root = YAML::Load(buf.str());
  } catch (const YAML::Exception& e) {
    throw std::runtime_error(std::string("bench config: ") + e.what());
  }
  if (!root.IsMap()) throw std::runtime_error("bench config: expected a mapping");

  auto fail = [](const std::string& key, const std::string& what) -> double {
    throw std::runtime_error("bench config: " + key + ": " + what);
  };
  auto num = [&](const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) fail(key, "expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      return fail(key, "expected a number, got '" + n.Scalar() + "'");
    }
  };

  static const char* allowed[] = {"seeds",        "seed0",           "sphere_counts",
                                  "duration_s",   "replan_hz",       "horizon_s",
                                  "waypoints",    "tsdf_resolution", "tsdf_truncation",
                                  "lambda_occ",   "radius_min",      "radius_max"};
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    if (std::find_if(std::begin(allowed), std::end(allowed),
                     [&](const char* a) { return key == a; }) == std::end(allowed)) {
      fail(key, "unknown key");
    }
  }

  BenchConfig cfg;
  if (root["seeds"]) cfg.seeds = static_cast<int>(num(root["seeds"], "seeds"));
  if (root["seed0"]) cfg.seed0 = root["seed0"].as<std::uint64_t>();
  if (root["sphere_counts"]) {
    const YAML::Node counts = root["sphere_counts"];
    if (!counts.IsSequence() || counts.size() == 0) {
      fail("sphere_counts", "expected a non-empty sequence of integers");
    }
    cfg.sphere_counts.clear();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      cfg.sphere_counts.push_back(static_cast<int>(
          num(counts[i], "sphere_counts[" + std::to_string(i) + "]")));
    }
  }
  if (root["duration_s"]) cfg.duration_s = num(root["duration_s"], "duration_s");
  if (root["replan_hz"]) cfg.replan_hz = num(root["replan_hz"], "replan_hz");
  if (root["horizon_s"]) cfg.horizon_s = num(root["horizon_s"], "horizon_s");
  if (root["waypoints"]) cfg.n = static_cast<int>(num(root["waypoints"], "waypoints"));
  if (root["tsdf_resolution"]) {
    cfg.tsdf_resolution = num(root["tsdf_resolution"], "tsdf_resolution");
  }
  if (root["tsdf_truncation"]) {
    cfg.tsdf_truncation = num(root["tsdf_truncation"], "tsdf_truncation");
  }
  if (root["lambda_occ"]) cfg.lambda_occ = num(root["lambda_occ"], "lambda_occ");
  if (root["radius_min"]) cfg.envgen.radius_min = num(root["radius_min"], "radius_min");
  if (root["radius_max"]) cfg.envgen.radius_max = num(root["radius_max"], "radius_max");
  return cfg;
}

}  // namespace cineplan
