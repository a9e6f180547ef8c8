#include "cineplan/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cineplan {

Vec3 Trajectory::sample(double t_rel) const {
  const int count = n();
  if (t_rel <= 0.0) return point(0);
  if (t_rel >= horizon_s) return point(count - 1);
  const double u = t_rel / dt();
  const int i = std::min(static_cast<int>(u), count - 2);
  const double a = u - i;
  return (1.0 - a) * point(i) + a * point(i + 1);
}

Trajectory zero_trajectory(int n, double horizon_s, double start_time_s) {
  Trajectory traj;
  traj.waypoints = WaypointMatrix::Zero(n, 3);
  traj.horizon_s = horizon_s;
  traj.start_time_s = start_time_s;
  return traj;
}

Trajectory line_trajectory(const Vec3& a, const Vec3& b, int n, double horizon_s,
                           double start_time_s) {
  Trajectory traj = zero_trajectory(n, horizon_s, start_time_s);
  for (int k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / (n - 1);
    traj.set_point(k, (1.0 - s) * a + s * b);
  }
  return traj;
}

void validate(const Trajectory& traj) {
  if (traj.n() < 3) throw std::invalid_argument("trajectory needs at least 3 waypoints");
  if (!(traj.horizon_s > 0.0)) throw std::invalid_argument("trajectory horizon must be positive");
  if (!traj.waypoints.allFinite()) throw std::invalid_argument("trajectory contains non-finite waypoints");
}

WaypointMatrix finite_diff_velocity(const Trajectory& traj) {
  const int n = traj.n();
  const double dt = traj.dt();
  WaypointMatrix v(n, 3);
  v.row(0) = (-3.0 * traj.waypoints.row(0) + 4.0 * traj.waypoints.row(1) -
              traj.waypoints.row(2)) /
             (2.0 * dt);
  for (int k = 1; k < n - 1; ++k) {
    v.row(k) = (traj.waypoints.row(k + 1) - traj.waypoints.row(k - 1)) / (2.0 * dt);
  }
  v.row(n - 1) = (3.0 * traj.waypoints.row(n - 1) - 4.0 * traj.waypoints.row(n - 2) +
                  traj.waypoints.row(n - 3)) /
                 (2.0 * dt);
  return v;
}

WaypointMatrix finite_diff_acceleration(const Trajectory& traj) {
  const int n = traj.n();
  const double dt2 = traj.dt() * traj.dt();
  WaypointMatrix a(n, 3);
  // One-sided 3-point stencils at the ends are exact on quadratics and keep
  // working at the n = 3 minimum.
  a.row(0) = (traj.waypoints.row(0) - 2.0 * traj.waypoints.row(1) +
              traj.waypoints.row(2)) /
             dt2;
  for (int k = 1; k < n - 1; ++k) {
    a.row(k) = (traj.waypoints.row(k + 1) - 2.0 * traj.waypoints.row(k) +
                traj.waypoints.row(k - 1)) /
               dt2;
  }
  a.row(n - 1) = (traj.waypoints.row(n - 1) - 2.0 * traj.waypoints.row(n - 2) +
                  traj.waypoints.row(n - 3)) /
                 dt2;
  return a;
}

WaypointMatrix velocity_operator_transpose(const WaypointMatrix& w, double dt) {
  const int n = static_cast<int>(w.rows());
  WaypointMatrix out = WaypointMatrix::Zero(n, 3);
  const double half = 1.0 / (2.0 * dt);
  // Row 0 stencil: (-3, 4, -1) / 2dt on waypoints 0..2.
  out.row(0) += -3.0 * half * w.row(0);
  out.row(1) += 4.0 * half * w.row(0);
  out.row(2) += -1.0 * half * w.row(0);
  for (int k = 1; k < n - 1; ++k) {
    out.row(k - 1) += -half * w.row(k);
    out.row(k + 1) += half * w.row(k);
  }
  // Row n-1 stencil: (1, -4, 3) / 2dt on waypoints n-3..n-1.
  out.row(n - 1) += 3.0 * half * w.row(n - 1);
  out.row(n - 2) += -4.0 * half * w.row(n - 1);
  out.row(n - 3) += 1.0 * half * w.row(n - 1);
  return out;
}

Trajectory time_shift(const Trajectory& traj, double elapsed_s,
                      const Vec3& extend_velocity) {
  if (elapsed_s < 0.0 || elapsed_s >= traj.horizon_s) {
    throw std::invalid_argument("time_shift elapsed_s must lie in [0, horizon)");
  }
  if (elapsed_s == 0.0) return traj;
  const int n = traj.n();
  const double dt = traj.dt();
  Trajectory out = traj;
  out.start_time_s = traj.start_time_s + elapsed_s;
  const Vec3 tail = traj.point(n - 1);
  for (int k = 0; k < n; ++k) {
    const double t = elapsed_s + k * dt;
    if (t <= traj.horizon_s) {
      out.set_point(k, traj.sample(t));
    } else {
      out.set_point(k, tail + (t - traj.horizon_s) * extend_velocity);
    }
  }
  return out;
}

}  // namespace cineplan
