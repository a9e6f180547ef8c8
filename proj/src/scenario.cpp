#include "cineplan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cineplan {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("scenario config: " + path + ": " + what);
}

bool node_finite(double v) { return std::isfinite(v); }

double as_num(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a number");
  try {
    const double v = node.as<double>();
    if (!node_finite(v)) fail(path, "expected a finite number");
    return v;
  } catch (const YAML::Exception&) {
    fail(path, "expected a number, got '" + node.Scalar() + "'");
  }
}

int as_int(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected an integer");
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    fail(path, "expected an integer, got '" + node.Scalar() + "'");
  }
}

std::uint64_t as_u64(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected an unsigned integer");
  try {
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(path, "expected an unsigned integer, got '" + node.Scalar() + "'");
  }
}

std::string as_str(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, "expected a string");
  return node.as<std::string>();
}

Vec3 as_vec3(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 3) {
    fail(path, "expected a sequence of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = as_num(node[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::Vector2d as_vec2(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 2) {
    fail(path, "expected a sequence of 2 numbers");
  }
  return {as_num(node[0], path + "[0]"), as_num(node[1], path + "[1]")};
}

void expect_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(path, "expected a mapping");
}

// Typos should not silently keep a default alive.
void check_keys(const YAML::Node& map, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& entry : map) {
    const std::string key = entry.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

void parse_environment(const YAML::Node& node, const std::string& path, Environment* env) {
  expect_map(node, path);
  check_keys(node, path, {"bounds_min", "bounds_max", "ground_z", "spheres"});
  if (!node["bounds_min"]) fail(path + ".bounds_min", "missing");
  if (!node["bounds_max"]) fail(path + ".bounds_max", "missing");
  env->bounds_min = as_vec3(node["bounds_min"], path + ".bounds_min");
  env->bounds_max = as_vec3(node["bounds_max"], path + ".bounds_max");
  if (node["ground_z"]) env->ground_z = as_num(node["ground_z"], path + ".ground_z");
  if (const YAML::Node spheres = node["spheres"]) {
    if (!spheres.IsSequence()) fail(path + ".spheres", "expected a sequence");
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      const std::string sp = path + ".spheres[" + std::to_string(i) + "]";
      expect_map(spheres[i], sp);
      check_keys(spheres[i], sp, {"center", "radius"});
      if (!spheres[i]["center"]) fail(sp + ".center", "missing");
      if (!spheres[i]["radius"]) fail(sp + ".radius", "missing");
      SphereObstacle s;
      s.center = as_vec3(spheres[i]["center"], sp + ".center");
      s.radius = as_num(spheres[i]["radius"], sp + ".radius");
      env->spheres.push_back(s);
    }
  }
}

void parse_actor(const YAML::Node& node, const std::string& path, ActorScript* actor) {
  expect_map(node, path);
  check_keys(node, path,
             {"path", "start", "velocity", "center", "radius", "angular_rate_rad_s",
              "phase_rad", "points", "speed", "heading0_rad"});
  if (node["path"]) {
    const std::string kind = as_str(node["path"], path + ".path");
    if (kind == "line") {
      actor->path = ActorScript::Path::line;
    } else if (kind == "circle") {
      actor->path = ActorScript::Path::circle;
    } else if (kind == "waypoints") {
      actor->path = ActorScript::Path::waypoints;
    } else {
      fail(path + ".path", "expected line, circle, or waypoints, got '" + kind + "'");
    }
  }
  if (node["start"]) actor->start = as_vec3(node["start"], path + ".start");
  if (node["velocity"]) actor->velocity = as_vec3(node["velocity"], path + ".velocity");
  if (node["center"]) actor->center = as_vec3(node["center"], path + ".center");
  if (node["radius"]) actor->radius = as_num(node["radius"], path + ".radius");
  if (node["angular_rate_rad_s"]) {
    actor->angular_rate = as_num(node["angular_rate_rad_s"], path + ".angular_rate_rad_s");
  }
  if (node["phase_rad"]) actor->phase = as_num(node["phase_rad"], path + ".phase_rad");
  if (const YAML::Node pts = node["points"]) {
    if (!pts.IsSequence()) fail(path + ".points", "expected a sequence of [x, y, z]");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      actor->points.push_back(as_vec3(pts[i], path + ".points[" + std::to_string(i) + "]"));
    }
  }
  if (node["speed"]) actor->speed = as_num(node["speed"], path + ".speed");
  if (node["heading0_rad"]) actor->heading0 = as_num(node["heading0_rad"], path + ".heading0_rad");
}

void parse_shot(const YAML::Node& node, const std::string& path, ShotSchedule* shot) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(path, "expected a non-empty sequence of keyframes");
  }
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string kp = path + "[" + std::to_string(i) + "]";
    expect_map(node[i], kp);
    check_keys(node[i], kp, {"time_s", "distance", "line_angle_rad", "tilt_rad", "screen"});
    ShotKeyframe kf;
    if (node[i]["time_s"]) kf.time_s = as_num(node[i]["time_s"], kp + ".time_s");
    if (node[i]["distance"]) kf.spec.distance_rho = as_num(node[i]["distance"], kp + ".distance");
    if (node[i]["line_angle_rad"]) {
      kf.spec.phi_rel = as_num(node[i]["line_angle_rad"], kp + ".line_angle_rad");
    }
    if (node[i]["tilt_rad"]) kf.spec.theta_rel = as_num(node[i]["tilt_rad"], kp + ".tilt_rad");
    if (node[i]["screen"]) kf.spec.screen_pos = as_vec2(node[i]["screen"], kp + ".screen");
    shot->keyframes.push_back(kf);
  }
}

}  // namespace

Vec3 ActorScript::position(double t) const {
  switch (path) {
    case Path::line:
      return start + t * velocity;
    case Path::circle: {
      const double a = phase + angular_rate * t;
      return center + radius * Vec3(std::cos(a), std::sin(a), 0.0);
    }
    case Path::waypoints: {
      double s = speed * std::max(t, 0.0);
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double seg = (points[i + 1] - points[i]).norm();
        if (s <= seg) {
          return seg > 0.0 ? Vec3(points[i] + (s / seg) * (points[i + 1] - points[i]))
                           : points[i];
        }
        s -= seg;
      }
      return points.back();
    }
  }
  return start;
}

Vec3 ActorScript::velocity_at(double t) const {
  switch (path) {
    case Path::line:
      return velocity;
    case Path::circle: {
      const double a = phase + angular_rate * t;
      return radius * angular_rate * Vec3(-std::sin(a), std::cos(a), 0.0);
    }
    case Path::waypoints: {
      double s = speed * std::max(t, 0.0);
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double seg = (points[i + 1] - points[i]).norm();
        if (s <= seg && seg > 0.0) {
          return speed * (points[i + 1] - points[i]) / seg;
        }
        s -= seg;
      }
      return Vec3::Zero();
    }
  }
  return Vec3::Zero();
}

double ActorScript::initial_heading() const {
  if (heading0 != kDeriveHeading) return heading0;
  const Vec3 v = velocity_at(0.0);
  if (v.head<2>().norm() >= kHeadingSpeedGate) return std::atan2(v.y(), v.x());
  return 0.0;
}

void validate(const ActorScript& script) {
  auto finite = [](const Vec3& v) { return v.allFinite(); };
  if (!finite(script.start) || !finite(script.velocity) || !finite(script.center)) {
    throw std::invalid_argument("actor script has non-finite parameters");
  }
  if (script.path == ActorScript::Path::circle && script.radius <= 0.0) {
    throw std::invalid_argument("actor circle radius must be positive");
  }
  if (script.path == ActorScript::Path::waypoints) {
    if (script.points.size() < 2) {
      throw std::invalid_argument("actor waypoint path needs at least 2 points");
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < script.points.size(); ++i) {
      if (!finite(script.points[i]) || !finite(script.points[i + 1])) {
        throw std::invalid_argument("actor waypoint path has non-finite points");
      }
      total += (script.points[i + 1] - script.points[i]).norm();
    }
    if (total <= 0.0) throw std::invalid_argument("actor waypoint path has zero length");
    if (script.speed <= 0.0) throw std::invalid_argument("actor speed must be positive");
  }
}

void validate(const Scenario& sc) {
  if (sc.duration_s <= 0.0) throw std::invalid_argument("duration_s must be positive");
  if (sc.replan_hz <= 0.0) throw std::invalid_argument("replan_hz must be positive");
  if (sc.measurement_hz <= 0.0) throw std::invalid_argument("measurement_hz must be positive");
  if (sc.horizon_s <= 0.0) throw std::invalid_argument("horizon_s must be positive");
  if (sc.n < 3) throw std::invalid_argument("waypoints must be at least 3");
  if (!(sc.environment.bounds_min.array() < sc.environment.bounds_max.array()).all()) {
    throw std::invalid_argument("environment bounds_min must be below bounds_max");
  }
  for (const SphereObstacle& s : sc.environment.spheres) {
    if (s.radius <= 0.0 || !s.center.allFinite()) {
      throw std::invalid_argument("environment spheres need finite centers and positive radii");
    }
  }
  validate(sc.actor);
  validate(sc.shot);
  if (sc.noise.process_accel_std < 0.0 || sc.noise.measurement_pos_std < 0.0) {
    throw std::invalid_argument("noise standard deviations must be non-negative");
  }
  if (!sc.drone_start.start_position.allFinite() || !sc.drone_start.start_velocity.allFinite()) {
    throw std::invalid_argument("drone_start must be finite");
  }
  if (sc.costs.lambda_obs < 0.0 || sc.costs.lambda_occ < 0.0 || sc.costs.lambda_shot < 0.0) {
    throw std::invalid_argument("cost weights must be non-negative");
  }
  if (sc.costs.eps_obs <= 0.0) throw std::invalid_argument("eps_obs must be positive");
  if (sc.costs.actor_clearance_radius < 0.0) {
    throw std::invalid_argument("actor_clearance must be non-negative");
  }
  if (sc.costs.tau_samples < 1) throw std::invalid_argument("tau_samples must be at least 1");
  if (sc.optimizer.eta <= 0.0 || sc.optimizer.i_max < 1 || sc.optimizer.eps0 < 0.0 ||
      sc.optimizer.eps1 < 0.0) {
    throw std::invalid_argument("optimizer parameters out of range");
  }
  if (sc.tsdf.resolution <= 0.0 || sc.tsdf.truncation <= 0.0) {
    throw std::invalid_argument("tsdf resolution and truncation must be positive");
  }
  if (sc.camera.fov_h <= 0.0 || sc.camera.fov_h >= std::numbers::pi || sc.camera.fov_v <= 0.0 ||
      sc.camera.fov_v >= std::numbers::pi) {
    throw std::invalid_argument("camera fields of view must lie in (0, pi)");
  }
}

Scenario parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw std::runtime_error(std::string("scenario config: ") + e.what());
  }
  expect_map(root, "(top level)");
  check_keys(root, "",
             {"name", "seed", "duration_s", "replan_hz", "measurement_hz", "horizon_s",
              "waypoints", "environment", "tsdf", "actor", "noise", "drone_start", "shot",
              "costs", "optimizer", "camera"});

  Scenario sc;
  if (root["name"]) sc.name = as_str(root["name"], "name");
  if (root["seed"]) sc.seed = as_u64(root["seed"], "seed");
  if (root["duration_s"]) sc.duration_s = as_num(root["duration_s"], "duration_s");
  if (root["replan_hz"]) sc.replan_hz = as_num(root["replan_hz"], "replan_hz");
  if (root["measurement_hz"]) {
    sc.measurement_hz = as_num(root["measurement_hz"], "measurement_hz");
  }
  if (root["horizon_s"]) sc.horizon_s = as_num(root["horizon_s"], "horizon_s");
  if (root["waypoints"]) sc.n = as_int(root["waypoints"], "waypoints");

  if (!root["environment"]) fail("environment", "missing");
  parse_environment(root["environment"], "environment", &sc.environment);

  if (const YAML::Node t = root["tsdf"]) {
    expect_map(t, "tsdf");
    check_keys(t, "tsdf", {"resolution", "truncation", "max_voxels"});
    if (t["resolution"]) sc.tsdf.resolution = as_num(t["resolution"], "tsdf.resolution");
    if (t["truncation"]) sc.tsdf.truncation = as_num(t["truncation"], "tsdf.truncation");
    if (t["max_voxels"]) sc.tsdf.max_voxels = as_u64(t["max_voxels"], "tsdf.max_voxels");
  }

  if (!root["actor"]) fail("actor", "missing");
  parse_actor(root["actor"], "actor", &sc.actor);

  if (const YAML::Node noise = root["noise"]) {
    expect_map(noise, "noise");
    check_keys(noise, "noise", {"process_accel_std", "measurement_pos_std"});
    if (noise["process_accel_std"]) {
      sc.noise.process_accel_std = as_num(noise["process_accel_std"], "noise.process_accel_std");
    }
    if (noise["measurement_pos_std"]) {
      sc.noise.measurement_pos_std =
          as_num(noise["measurement_pos_std"], "noise.measurement_pos_std");
    }
  }

  if (!root["drone_start"]) fail("drone_start", "missing");
  {
    const YAML::Node ds = root["drone_start"];
    expect_map(ds, "drone_start");
    check_keys(ds, "drone_start", {"position", "velocity"});
    if (!ds["position"]) fail("drone_start.position", "missing");
    sc.drone_start.start_position = as_vec3(ds["position"], "drone_start.position");
    if (ds["velocity"]) {
      sc.drone_start.start_velocity = as_vec3(ds["velocity"], "drone_start.velocity");
    }
  }

  if (!root["shot"]) fail("shot", "missing");
  parse_shot(root["shot"], "shot", &sc.shot);

  if (const YAML::Node c = root["costs"]) {
    expect_map(c, "costs");
    check_keys(c, "costs",
               {"lambda_obs", "lambda_occ", "lambda_shot", "eps_obs", "actor_clearance",
                "tau_samples"});
    if (c["lambda_obs"]) sc.costs.lambda_obs = as_num(c["lambda_obs"], "costs.lambda_obs");
    if (c["lambda_occ"]) sc.costs.lambda_occ = as_num(c["lambda_occ"], "costs.lambda_occ");
    if (c["lambda_shot"]) sc.costs.lambda_shot = as_num(c["lambda_shot"], "costs.lambda_shot");
    if (c["eps_obs"]) sc.costs.eps_obs = as_num(c["eps_obs"], "costs.eps_obs");
    if (c["actor_clearance"]) {
      sc.costs.actor_clearance_radius = as_num(c["actor_clearance"], "costs.actor_clearance");
    }
    if (c["tau_samples"]) sc.costs.tau_samples = as_int(c["tau_samples"], "costs.tau_samples");
  }

  if (const YAML::Node o = root["optimizer"]) {
    expect_map(o, "optimizer");
    check_keys(o, "optimizer", {"eta", "eps0", "eps1", "max_iterations"});
    if (o["eta"]) sc.optimizer.eta = as_num(o["eta"], "optimizer.eta");
    if (o["eps0"]) sc.optimizer.eps0 = as_num(o["eps0"], "optimizer.eps0");
    if (o["eps1"]) sc.optimizer.eps1 = as_num(o["eps1"], "optimizer.eps1");
    if (o["max_iterations"]) sc.optimizer.i_max = as_int(o["max_iterations"], "optimizer.max_iterations");
  }

  if (const YAML::Node cam = root["camera"]) {
    expect_map(cam, "camera");
    check_keys(cam, "camera", {"fov_h_deg", "fov_v_deg"});
    constexpr double kDeg = std::numbers::pi / 180.0;
    if (cam["fov_h_deg"]) sc.camera.fov_h = kDeg * as_num(cam["fov_h_deg"], "camera.fov_h_deg");
    if (cam["fov_v_deg"]) sc.camera.fov_v = kDeg * as_num(cam["fov_v_deg"], "camera.fov_v_deg");
  }

  try {
    validate(sc);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("scenario config: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario make_occlusion_demo_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "occlusion_demo";
  sc.seed = seed;
  sc.duration_s = 12.0;
  sc.horizon_s = 10.0;
  sc.n = 51;

  sc.environment.bounds_min = Vec3(-8.0, -14.0, 0.0);
  sc.environment.bounds_max = Vec3(16.0, 14.0, 12.0);
  sc.environment.spheres.push_back({Vec3(4.2, 0.0, 0.0), 3.5});
  sc.tsdf.resolution = 0.25;
  sc.tsdf.truncation = 3.0;

  sc.actor.path = ActorScript::Path::line;
  sc.actor.start = Vec3(0.0, -9.0, 0.9);
  sc.actor.velocity = Vec3(0.0, 1.5, 0.0);

  ShotKeyframe kf;
  kf.spec.distance_rho = 8.0;
  kf.spec.phi_rel = -std::numbers::pi / 2.0;  // side view from the actor's right
  kf.spec.theta_rel = 0.2;
  sc.shot.keyframes.push_back(kf);

  // Start at the ideal viewpoint of the first frame.
  const Vec3 offset(8.0 * std::cos(kf.spec.theta_rel), 0.0, 8.0 * std::sin(kf.spec.theta_rel));
  sc.drone_start.start_position = sc.actor.start + offset;
  sc.drone_start.start_velocity = sc.actor.velocity;

  sc.noise.measurement_pos_std = 0.5;
  return sc;
}

}  // namespace cineplan
