#ifndef CINEPLAN_GEOMETRY_HPP_
#define CINEPLAN_GEOMETRY_HPP_

#include <Eigen/Dense>

namespace cineplan {

using Vec3 = Eigen::Vector3d;

// One row per waypoint, columns x/y/z. Cost gradients share this shape.
using WaypointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

struct BoundaryCondition {
  Vec3 start_position = Vec3::Zero();
  Vec3 start_velocity = Vec3::Zero();
};

// Uniformly sampled position trajectory: n waypoints spanning horizon_s,
// so the sample spacing is dt() = horizon_s / (n - 1).
struct Trajectory {
  WaypointMatrix waypoints;
  double horizon_s = 0.0;
  double start_time_s = 0.0;

  int n() const { return static_cast<int>(waypoints.rows()); }
  double dt() const { return horizon_s / (n() - 1); }
  Vec3 point(int k) const { return waypoints.row(k).transpose(); }
  void set_point(int k, const Vec3& p) { waypoints.row(k) = p.transpose(); }

  // Piecewise-linear position at t_rel seconds past start_time_s.
  // Clamps to the end waypoints outside [0, horizon_s].
  Vec3 sample(double t_rel) const;
};

Trajectory zero_trajectory(int n, double horizon_s, double start_time_s = 0.0);

// Straight line from a to b, inclusive of both ends.
Trajectory line_trajectory(const Vec3& a, const Vec3& b, int n, double horizon_s,
                           double start_time_s = 0.0);

// Throws std::invalid_argument on n < 3, non-finite data, or horizon_s <= 0.
void validate(const Trajectory& traj);

// Second-order finite differences on the uniform grid: central stencils at
// interior waypoints, one-sided stencils at the ends (so velocity stays exact
// on quadratics and acceleration on quadratics, with no shortened output).
WaypointMatrix finite_diff_velocity(const Trajectory& traj);
WaypointMatrix finite_diff_acceleration(const Trajectory& traj);

// Applies the transpose of the velocity stencil operator to w (n x 3).
// Cost gradients need this adjoint to account for how each waypoint enters
// its neighbors' velocity estimates.
WaypointMatrix velocity_operator_transpose(const WaypointMatrix& w, double dt);

// Resamples traj onto the same grid advanced by elapsed_s: output waypoint k
// holds the old trajectory at elapsed_s + k*dt, linearly interpolated. Times
// past the old horizon extend from the final waypoint at extend_velocity.
// n, horizon_s and dt are preserved; start_time_s advances by elapsed_s.
// Requires elapsed_s in [0, horizon_s).
Trajectory time_shift(const Trajectory& traj, double elapsed_s,
                      const Vec3& extend_velocity);

}  // namespace cineplan

#endif  // CINEPLAN_GEOMETRY_HPP_
