#ifndef CINEPLAN_SCENARIO_HPP_
#define CINEPLAN_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cineplan/costs.hpp"
#include "cineplan/kalman.hpp"
#include "cineplan/optimizer.hpp"
#include "cineplan/shot.hpp"
#include "cineplan/tsdf.hpp"

namespace cineplan {

// Scripted ground-truth actor motion. The simulator samples this for truth
// and synthesizes noisy measurements from it; the planner only ever sees the
// filtered estimate.
struct ActorScript {
  enum class Path { line, circle, waypoints };

  Path path = Path::line;

  // line: start + t * velocity
  Vec3 start = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  // circle: center + radius * (cos, sin, 0) at angle phase + rate * t
  Vec3 center = Vec3::Zero();
  double radius = 5.0;
  double angular_rate = 0.2;  // rad/s, signed
  double phase = 0.0;

  // waypoints: polyline traversed at constant speed, holding the last point
  std::vector<Vec3> points;
  double speed = 1.5;

  // Initial facing direction, used to seed the estimator before the velocity
  // estimate is trustworthy. Negative infinity means "derive from the path".
  double heading0 = kDeriveHeading;
  static constexpr double kDeriveHeading = -1e30;

  Vec3 position(double t) const;
  Vec3 velocity_at(double t) const;
  double initial_heading() const;
};

void validate(const ActorScript& script);

// Pinhole field of view used for gimbal pointing and shot-scale conversions.
struct CameraModel {
  double fov_h = 1.396;  // rad, ~80 deg
  double fov_v = 0.873;  // rad, ~50 deg
};

// Everything one closed-loop run needs. CostContext's grid and actor slots
// are left empty here; the simulator fills them per replan.
struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration_s = 20.0;
  double replan_hz = 5.0;
  double measurement_hz = 10.0;
  double horizon_s = 10.0;
  int n = 51;

  Environment environment;
  TsdfBuildParams tsdf;
  ActorScript actor;
  NoiseParams noise;
  BoundaryCondition drone_start;
  ShotSchedule shot;
  CostContext costs;
  OptParams optimizer;
  CameraModel camera;
};

void validate(const Scenario& scenario);

// Parses a scenario config (YAML). Missing optional keys fall back to the
// defaults above; errors name the offending key path, e.g.
// "drone_start.position: expected a sequence of 3 numbers". Unknown keys are
// rejected so typos fail loudly instead of silently keeping a default.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& yaml_text);

// The paired demo: an actor walking a straight line filmed in side view,
// with a dome-shaped hill between the ideal viewpoint line and nothing else.
// Running it with the occlusion weight on versus zeroed separates the
// visibility metric by a wide margin.
Scenario make_occlusion_demo_scenario(std::uint64_t seed = 7);

}  // namespace cineplan

#endif  // CINEPLAN_SCENARIO_HPP_
