#include "cineplan/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cineplan {
namespace {

constexpr double kTimeSlop = 1e-9;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

}  // namespace

GimbalAngles gimbal_angles(const Vec3& camera_pos, const Vec3& target_pos,
                           const Eigen::Vector2d& screen_pos, const CameraModel& camera) {
  const Vec3 to_target = target_pos - camera_pos;
  const double range = to_target.norm();
  if (range < 1e-9) throw std::invalid_argument("gimbal target coincides with the camera");
  const Vec3 t_hat = to_target / range;

  // Desired bearing of the target in the camera frame (forward, right, down):
  // screen offsets map to tangent-plane offsets through the field of view.
  const double alpha = (screen_pos.x() - 0.5) * 2.0 * std::tan(camera.fov_h / 2.0);
  const double beta = (screen_pos.y() - 0.5) * 2.0 * std::tan(camera.fov_v / 2.0);
  const Vec3 c = Vec3(1.0, alpha, beta).normalized();

  // Tilt first: the world-z component of the bearing depends only on tilt,
  //   c.x * sin(tilt) - c.z * cos(tilt) = t_hat.z.
  const double amp = std::hypot(c.x(), c.z());
  const double ratio = t_hat.z() / amp;
  if (std::abs(ratio) > 1.0 + 1e-12) {
    throw std::invalid_argument("screen position unreachable for this geometry");
  }
  const double tilt =
      std::atan2(c.z(), c.x()) + std::asin(std::clamp(ratio, -1.0, 1.0));

  // Pan from the horizontal components, which rotate rigidly with pan.
  const double p = c.x() * std::cos(tilt) + c.z() * std::sin(tilt);
  const double q = c.y();
  const double pan = std::atan2(t_hat.y(), t_hat.x()) + std::atan2(q, p);
  return {pan, tilt};
}

Eigen::Vector2d project_to_screen(const Vec3& camera_pos, const GimbalAngles& angles,
                                  const Vec3& target_pos, const CameraModel& camera) {
  const double cp = std::cos(angles.pan), sp = std::sin(angles.pan);
  const double ct = std::cos(angles.tilt), st = std::sin(angles.tilt);
  const Vec3 forward(ct * cp, ct * sp, st);
  const Vec3 right(sp, -cp, 0.0);
  const Vec3 down(cp * st, sp * st, -ct);

  const Vec3 u = target_pos - camera_pos;
  const double cf = u.dot(forward);
  if (cf < 1e-9) throw std::invalid_argument("target is not in front of the camera");
  return {0.5 + u.dot(right) / (cf * 2.0 * std::tan(camera.fov_h / 2.0)),
          0.5 + u.dot(down) / (cf * 2.0 * std::tan(camera.fov_v / 2.0))};
}

bool segment_visible(const Environment& env, const Vec3& a, const Vec3& b, int samples) {
  if (samples < 1) throw std::invalid_argument("segment_visible needs at least one sample");
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / samples;
    if (analytic_distance(env, a + t * (b - a)) < 0.0) return false;
  }
  return true;
}

SimLog run_simulation(const Scenario& sc, const TsdfGrid& grid) {
  validate(sc);
  const double tick = 1.0 / sc.replan_hz;
  const int ticks = std::max(1, static_cast<int>(std::llround(sc.duration_s * sc.replan_hz)));
  const double meas_dt = 1.0 / sc.measurement_hz;
  const int n = sc.n;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto measure = [&](double t) {
    Vec3 p = sc.actor.position(t);
    if (sc.noise.measurement_pos_std > 0.0) {
      for (int i = 0; i < 3; ++i) p[i] += sc.noise.measurement_pos_std * gauss(rng);
    }
    return p;
  };

  ActorState est = initial_actor_state(measure(0.0), 0.0, sc.actor.initial_heading(), sc.noise);
  int next_meas = 1;

  Vec3 drone_pos = sc.drone_start.start_position;
  Vec3 drone_vel = sc.drone_start.start_velocity;
  Trajectory flying;  // plan currently being executed
  bool have_plan = false;
  double plan_age = 0.0;  // seconds of `flying` already flown

  // The metric depends only on the bc-independent quadratic block, so one
  // factorization serves every replan.
  const SmoothnessOperator op0 =
      build_smoothness_operator(n, sc.horizon_s / (n - 1), BoundaryCondition{});
  const SmoothnessMetric metric(op0, sc.costs.lambda_shot);

  SimLog log;
  log.scenario_name = sc.name;
  log.seed = sc.seed;
  log.replan_hz = sc.replan_hz;
  log.horizon_s = sc.horizon_s;
  log.environment = sc.environment;
  log.records.reserve(ticks);

  for (int i = 0; i < ticks; ++i) {
    const double t = i * tick;

    while (next_meas * meas_dt <= t + kTimeSlop) {
      const double tm = next_meas * meas_dt;
      est = kf_predict(est, tm - est.last_update_s, sc.noise);
      est = kf_update(est, measure(tm), sc.noise);
      ++next_meas;
    }
    if (est.last_update_s < t - kTimeSlop) {
      est = kf_predict(est, t - est.last_update_s, sc.noise);
    }

    const ActorForecast forecast = forecast_actor(est, sc.horizon_s, n);
    const Trajectory xi_shot = ideal_shot_trajectory(forecast.trajectory, forecast.headings, sc.shot);

    const BoundaryCondition bc{drone_pos, drone_vel};
    const SmoothnessOperator op = build_smoothness_operator(n, xi_shot.dt(), bc);
    CostContext ctx = sc.costs;
    ctx.grid = &grid;
    ctx.actor = forecast.trajectory;

    Trajectory init;
    if (have_plan) {
      const double elapsed = std::min(plan_age, 0.9 * flying.horizon_s);
      init = warm_start(flying, elapsed, est.velocity, bc);
    } else {
      init = line_trajectory(drone_pos, xi_shot.point(n - 1), n, sc.horizon_s, t);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const OptResult res = optimize(init, ctx, op, xi_shot, metric, sc.optimizer);
    const auto t1 = std::chrono::steady_clock::now();

    if (!res.numerical_error) {
      flying = res.trajectory;
      have_plan = true;
      plan_age = 0.0;
    } else if (!have_plan) {
      // Nothing valid yet: hover in place until a solve succeeds.
      flying = line_trajectory(drone_pos, drone_pos, n, sc.horizon_s, t);
      plan_age = 0.0;
    }

    SimRecord rec;
    rec.time_s = t;
    rec.drone_pos = drone_pos;
    rec.actor_truth = sc.actor.position(t);
    rec.actor_est = est.position;
    rec.shot_pos = xi_shot.point(0);
    rec.cost = res.breakdown;
    rec.iterations = res.iterations;
    rec.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rec.termination = res.termination;
    rec.optimizer_error = res.numerical_error;
    rec.visible = segment_visible(sc.environment, drone_pos, rec.actor_truth);
    if ((rec.actor_truth - drone_pos).norm() > 1e-9) {
      rec.gimbal = gimbal_angles(drone_pos, rec.actor_truth,
                                 sc.shot.sample(t).screen_pos, sc.camera);
    }
    rec.plan = flying;
    log.records.push_back(std::move(rec));

    plan_age += tick;
    const double h = tick / 4.0;
    drone_pos = flying.sample(plan_age);
    drone_vel = (flying.sample(plan_age + h) - flying.sample(plan_age - h)) / (2.0 * h);
  }
  return log;
}

SimLog run_simulation(const Scenario& sc) {
  validate(sc);
  const TsdfGrid grid = build_tsdf(sc.environment, sc.tsdf);
  return run_simulation(sc, grid);
}

double visibility_metric(const SimLog& log) {
  if (log.records.empty()) throw std::invalid_argument("visibility_metric on an empty log");
  std::size_t visible = 0;
  for (const SimRecord& r : log.records) visible += r.visible ? 1 : 0;
  return 100.0 * static_cast<double>(visible) / static_cast<double>(log.records.size());
}

DistanceStats shot_distance_metric(const SimLog& log) {
  if (log.records.empty()) throw std::invalid_argument("shot_distance_metric on an empty log");
  const std::size_t n = log.records.size();
  double sum = 0.0;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = (log.records[i].drone_pos - log.records[i].shot_pos).norm();
    sum += d[i];
  }
  DistanceStats stats;
  stats.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : d) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return stats;
}

double max_executed_step(const SimLog& log) {
  double worst = 0.0;
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    worst = std::max(worst,
                     (log.records[i].drone_pos - log.records[i - 1].drone_pos).norm());
  }
  return worst;
}

double median_solve_ms(const SimLog& log) {
  if (log.records.empty()) return 0.0;
  std::vector<double> times;
  times.reserve(log.records.size());
  for (const SimRecord& r : log.records) times.push_back(r.solve_ms);
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::gradient_tol:
      return "gradient_tol";
    case Termination::decrease_tol:
      return "decrease_tol";
    case Termination::iteration_cap:
      return "iteration_cap";
  }
  return "unknown";
}

void write_log_csv(const SimLog& log, const std::string& path) {
  std::ostringstream out;
  out << "time_s,drone_x,drone_y,drone_z,actor_x,actor_y,actor_z,"
         "est_x,est_y,est_z,shot_x,shot_y,shot_z,"
         "j_total,j_smooth,j_obs,j_occ,j_shot,iterations,pan_rad,tilt_rad,"
         "visible,optimizer_error\n";
  for (const SimRecord& r : log.records) {
    out << fmt(r.time_s);
    for (const Vec3& p : {r.drone_pos, r.actor_truth, r.actor_est, r.shot_pos}) {
      out << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z());
    }
    out << ',' << fmt(r.cost.total) << ',' << fmt(r.cost.smooth) << ',' << fmt(r.cost.obs)
        << ',' << fmt(r.cost.occ) << ',' << fmt(r.cost.shot) << ',' << r.iterations << ','
        << fmt(r.gimbal.pan) << ',' << fmt(r.gimbal.tilt) << ',' << (r.visible ? 1 : 0)
        << ',' << (r.optimizer_error ? 1 : 0) << '\n';
  }
  write_file(path, out.str());
}

void write_summary_csv(const SimLog& log, const std::string& path) {
  const double vis = visibility_metric(log);
  const DistanceStats dist = shot_distance_metric(log);
  std::size_t errors = 0;
  for (const SimRecord& r : log.records) errors += r.optimizer_error ? 1 : 0;
  std::ostringstream out;
  out << "scenario,seed,replans,visibility_pct,shot_dist_mean_m,shot_dist_std_m,"
         "max_step_m,optimizer_errors\n";
  out << log.scenario_name << ',' << log.seed << ',' << log.records.size() << ','
      << fmt(vis) << ',' << fmt(dist.mean) << ',' << fmt(dist.stddev) << ','
      << fmt(max_executed_step(log)) << ',' << errors << '\n';
  write_file(path, out.str());
}

void write_replay_json(const SimLog& log, const std::string& path) {
  using nlohmann::json;
  json root;
  root["scenario"] = log.scenario_name;
  root["seed"] = log.seed;
  root["replan_hz"] = log.replan_hz;
  root["horizon_s"] = log.horizon_s;

  json env;
  env["bounds_min"] = {log.environment.bounds_min.x(), log.environment.bounds_min.y(),
                       log.environment.bounds_min.z()};
  env["bounds_max"] = {log.environment.bounds_max.x(), log.environment.bounds_max.y(),
                       log.environment.bounds_max.z()};
  if (log.environment.ground_z) env["ground_z"] = *log.environment.ground_z;
  env["spheres"] = json::array();
  for (const SphereObstacle& s : log.environment.spheres) {
    env["spheres"].push_back(
        {{"center", {s.center.x(), s.center.y(), s.center.z()}}, {"radius", s.radius}});
  }
  root["environment"] = std::move(env);

  root["records"] = json::array();
  for (const SimRecord& r : log.records) {
    json rec;
    rec["time_s"] = r.time_s;
    rec["drone"] = {r.drone_pos.x(), r.drone_pos.y(), r.drone_pos.z()};
    rec["actor_truth"] = {r.actor_truth.x(), r.actor_truth.y(), r.actor_truth.z()};
    rec["actor_est"] = {r.actor_est.x(), r.actor_est.y(), r.actor_est.z()};
    rec["shot"] = {r.shot_pos.x(), r.shot_pos.y(), r.shot_pos.z()};
    rec["cost"] = {{"total", r.cost.total}, {"smooth", r.cost.smooth}, {"obs", r.cost.obs},
                   {"occ", r.cost.occ},     {"shot", r.cost.shot}};
    rec["iterations"] = r.iterations;
    rec["solve_ms"] = r.solve_ms;
    rec["termination"] = termination_name(r.termination);
    rec["optimizer_error"] = r.optimizer_error;
    rec["visible"] = r.visible;
    rec["gimbal"] = {{"pan", r.gimbal.pan}, {"tilt", r.gimbal.tilt}};
    json plan = json::array();
    for (int k = 0; k < r.plan.n(); ++k) {
      plan.push_back({r.plan.point(k).x(), r.plan.point(k).y(), r.plan.point(k).z()});
    }
    rec["plan"] = std::move(plan);
    root["records"].push_back(std::move(rec));
  }
  write_file(path, root.dump());
}

}  // namespace cineplan
