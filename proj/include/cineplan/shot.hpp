#ifndef CINEPLAN_SHOT_HPP_
#define CINEPLAN_SHOT_HPP_

#include <vector>

#include "cineplan/geometry.hpp"

namespace cineplan {

// Artistic framing parameters for one viewpoint, expressed relative to the
// actor: range rho, azimuth phi_rel measured from the actor's heading,
// elevation theta_rel, and the normalized screen position the actor should
// occupy (x right, y down, both in [0,1]).
struct ShotSpec {
  double distance_rho = 8.0;
  double phi_rel = 0.0;
  double theta_rel = 0.0;
  Eigen::Vector2d screen_pos = Eigen::Vector2d(0.5, 0.5);
};

// Throws std::invalid_argument unless rho > 0, theta_rel in [-pi/2, pi/2],
// screen_pos in [0,1]^2, and everything is finite. phi_rel only needs to be
// finite: schedules keep it unwrapped so a 0 -> 2*pi keyframe pair means one
// full orbit.
void validate(const ShotSpec& spec);

// Maps a shot-scale framing choice (actor height as a fraction of the image)
// to the camera range that realizes it under a pinhole of vertical field of
// view fov_v: rho = height / (2 * scale * tan(fov_v / 2)).
double shot_scale_to_distance(double shot_scale, double actor_height_m,
                              double fov_v_rad);

struct ShotKeyframe {
  double time_s = 0.0;
  ShotSpec spec;
};

// Piecewise-linear shot parameters over absolute time; clamps outside the
// keyframe range. Keyframe times must be strictly increasing.
struct ShotSchedule {
  std::vector<ShotKeyframe> keyframes;

  ShotSpec sample(double time_s) const;
};

void validate(const ShotSchedule& schedule);

// The viewpoint trajectory the drone would fly if only framing mattered:
// for each forecast waypoint, offset the actor position by the scheduled
// (rho, phi_rel, theta_rel) triple in the actor's heading frame. Shares the
// actor grid (n, horizon, start time). headings must have one entry per
// waypoint.
Trajectory ideal_shot_trajectory(const Trajectory& actor,
                                 const std::vector<double>& headings,
                                 const ShotSchedule& schedule);

struct ShotCostResult {
  double cost = 0.0;
  WaypointMatrix gradient;  // n x 3, zero row for the fixed start
};

// Mean squared viewpoint residual, (1/(2(n-1))) * sum_k |xi_q[k] - xi_shot[k]|^2.
// The start waypoint's residual is a constant (the start is pinned), so the
// gradient covers rows 1..n-1 only. Grids must match.
ShotCostResult shot_cost(const Trajectory& xi_q, const Trajectory& xi_shot);

}  // namespace cineplan

#endif  // CINEPLAN_SHOT_HPP_
