#ifndef CINEPLAN_SIMULATION_HPP_
#define CINEPLAN_SIMULATION_HPP_

#include <string>
#include <vector>

#include "cineplan/optimizer.hpp"
#include "cineplan/scenario.hpp"

namespace cineplan {

// Pan/tilt of a gimbal camera, radians. Pan is yaw around world z measured
// from +x; tilt is elevation of the optical axis, negative looking down.
struct GimbalAngles {
  double pan = 0.0;
  double tilt = 0.0;
};

// Closed-form gimbal pointing: the pan/tilt that place the target's pinhole
// projection at the requested normalized screen position (x right, y down,
// (0.5, 0.5) = boresight). Stands in for the image-feedback loop of a real
// rig, which needs no actor state at all. Throws std::invalid_argument when
// the target coincides with the camera or the screen position asks for a
// direction outside the field of view geometry.
GimbalAngles gimbal_angles(const Vec3& camera_pos, const Vec3& target_pos,
                           const Eigen::Vector2d& screen_pos, const CameraModel& camera);

// Where target_pos lands on the image for a camera at camera_pos with the
// given angles. Inverse of gimbal_angles; used to verify pointing.
Eigen::Vector2d project_to_screen(const Vec3& camera_pos, const GimbalAngles& angles,
                                  const Vec3& target_pos, const CameraModel& camera);

// True when no environment surface crosses the segment: the analytic signed
// distance stays non-negative at `samples` midpoint samples. The metric layer
// deliberately tests against the analytic geometry, not the planner's grid.
bool segment_visible(const Environment& env, const Vec3& a, const Vec3& b,
                     int samples = 64);

struct SimRecord {
  double time_s = 0.0;
  Vec3 drone_pos = Vec3::Zero();    // executed pose when the replan fired
  Vec3 actor_truth = Vec3::Zero();
  Vec3 actor_est = Vec3::Zero();
  Vec3 shot_pos = Vec3::Zero();     // ideal viewpoint for this instant
  TotalCost cost;                   // breakdown of the accepted plan
  int iterations = 0;
  double solve_ms = 0.0;
  Termination termination = Termination::iteration_cap;
  bool optimizer_error = false;
  bool visible = true;
  GimbalAngles gimbal;
  Trajectory plan;                  // trajectory the drone is executing
};

struct SimLog {
  std::string scenario_name;
  std::uint64_t seed = 0;
  double replan_hz = 0.0;
  double horizon_s = 0.0;
  Environment environment;          // geometry reference for the metrics
  std::vector<SimRecord> records;   // one per replan, time-ordered
};

// Closed-loop run: at every replan tick, fold the measurements since the
// last tick into the actor filter, forecast, build the ideal viewpoint
// trajectory, warm-start from the previous plan, optimize, then fly the
// first tick of the result under a perfect-tracking model. A failed solve is
// recorded and the drone keeps flying the last valid plan. Deterministic for
// a given scenario (the solve-time fields aside, which never feed back).
SimLog run_simulation(const Scenario& scenario, const TsdfGrid& grid);

// Convenience overload that builds the grid from the scenario first.
SimLog run_simulation(const Scenario& scenario);

// Fraction of replan ticks with an unobstructed drone-to-actor sightline,
// in percent of records. Throws std::invalid_argument on an empty log.
double visibility_metric(const SimLog& log);

struct DistanceStats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Distance between the executed pose and the concurrent ideal viewpoint,
// aggregated over the run. Throws std::invalid_argument on an empty log.
DistanceStats shot_distance_metric(const SimLog& log);

// Largest displacement between consecutive executed poses. Zero for logs
// with fewer than two records.
double max_executed_step(const SimLog& log);

double median_solve_ms(const SimLog& log);

// log.csv: one row per replan with poses, cost breakdown, iteration count,
// gimbal angles, and the visibility flag. Timing stays out of the CSVs so
// seed-identical reruns write identical bytes; it lives in the replay file.
void write_log_csv(const SimLog& log, const std::string& path);

// summary.csv: single-row rollup (visibility %, shot-distance stats, largest
// executed step, error count).
void write_summary_csv(const SimLog& log, const std::string& path);

// replay.json: full-fidelity record including planned trajectories, solve
// times, and the environment, for replay or plotting tools.
void write_replay_json(const SimLog& log, const std::string& path);

const char* termination_name(Termination t);

}  // namespace cineplan

#endif  // CINEPLAN_SIMULATION_HPP_
