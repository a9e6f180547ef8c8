#ifndef CINEPLAN_KALMAN_HPP_
#define CINEPLAN_KALMAN_HPP_

#include <string>
#include <vector>

#include "cineplan/geometry.hpp"

namespace cineplan {

using Mat6 = Eigen::Matrix<double, 6, 6>;

struct NoiseParams {
  double process_accel_std = 1.0;    // m/s^2, white-acceleration driving noise
  double measurement_pos_std = 1.0;  // m, per-axis position measurement noise
};

// Constant-velocity actor estimate. Heading is yaw in (-pi, pi], derived from
// the horizontal velocity estimate when it is trustworthy.
struct ActorState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat6 covariance = Mat6::Identity();
  double heading = 0.0;
  double last_update_s = 0.0;
};

// Minimum horizontal speed before the velocity estimate drives the heading;
// below it the previous heading is held (a standing actor has no direction).
inline constexpr double kHeadingSpeedGate = 0.3;

ActorState initial_actor_state(const Vec3& position, double time_s,
                               double heading, const NoiseParams& noise);

// Propagates the constant-velocity model by dt seconds. Process noise uses
// the continuous white-acceleration discretization, so the covariance trace
// strictly increases for dt > 0.
ActorState kf_predict(const ActorState& state, double dt, const NoiseParams& noise);

// Position-only measurement update (Joseph form, keeps the covariance
// symmetric PSD). Refreshes the heading from the updated velocity.
ActorState kf_update(const ActorState& state, const Vec3& measured_position,
                     const NoiseParams& noise);

struct ActorForecast {
  Trajectory trajectory;          // start_time_s = state.last_update_s
  std::vector<double> headings;   // one per waypoint, constant-velocity hold
};

// Extrapolates the current estimate over horizon_s on an n-point grid.
ActorForecast forecast_actor(const ActorState& state, double horizon_s, int n);

struct TimedMeasurement {
  double time_s = 0.0;
  Vec3 position = Vec3::Zero();
};

// Reads "time_s,x,y,z" rows (header optional). Throws std::runtime_error on
// unreadable files, malformed rows, or non-increasing timestamps.
std::vector<TimedMeasurement> load_measurement_csv(const std::string& path);

double normalize_angle(double radians);

}  // namespace cineplan

#endif  // CINEPLAN_KALMAN_HPP_
