#include "cineplan/shot.hpp"

#include <cmath>
#include <stdexcept>

namespace cineplan {

void validate(const ShotSpec& spec) {
  if (!(spec.distance_rho > 0.0)) throw std::invalid_argument("shot distance_rho must be positive");
  if (!std::isfinite(spec.phi_rel)) throw std::invalid_argument("shot phi_rel must be finite");
  if (!(spec.theta_rel >= -M_PI / 2 && spec.theta_rel <= M_PI / 2)) {
    throw std::invalid_argument("shot theta_rel must lie in [-pi/2, pi/2]");
  }
  for (int i = 0; i < 2; ++i) {
    if (!(spec.screen_pos[i] >= 0.0 && spec.screen_pos[i] <= 1.0)) {
      throw std::invalid_argument("shot screen_pos must lie in [0,1]^2");
    }
  }
}

double shot_scale_to_distance(double shot_scale, double actor_height_m,
                              double fov_v_rad) {
  if (!(shot_scale > 0.0)) throw std::invalid_argument("shot_scale must be positive");
  if (!(actor_height_m > 0.0)) throw std::invalid_argument("actor height must be positive");
  if (!(fov_v_rad > 0.0 && fov_v_rad < M_PI)) {
    throw std::invalid_argument("vertical fov must lie in (0, pi)");
  }
  return actor_height_m / (2.0 * shot_scale * std::tan(fov_v_rad / 2.0));
}

void validate(const ShotSchedule& schedule) {
  if (schedule.keyframes.empty()) throw std::invalid_argument("shot schedule needs at least one keyframe");
  for (std::size_t i = 0; i < schedule.keyframes.size(); ++i) {
    validate(schedule.keyframes[i].spec);
    if (i > 0 && !(schedule.keyframes[i].time_s > schedule.keyframes[i - 1].time_s)) {
      throw std::invalid_argument("shot keyframe times must be strictly increasing");
    }
  }
}

ShotSpec ShotSchedule::sample(double time_s) const {
  if (keyframes.empty()) throw std::invalid_argument("shot schedule is empty");
  if (time_s <= keyframes.front().time_s) return keyframes.front().spec;
  if (time_s >= keyframes.back().time_s) return keyframes.back().spec;
  std::size_t hi = 1;
  while (keyframes[hi].time_s < time_s) ++hi;
  const ShotKeyframe& a = keyframes[hi - 1];
  const ShotKeyframe& b = keyframes[hi];
  const double u = (time_s - a.time_s) / (b.time_s - a.time_s);
  ShotSpec out;
  out.distance_rho = (1 - u) * a.spec.distance_rho + u * b.spec.distance_rho;
  out.phi_rel = (1 - u) * a.spec.phi_rel + u * b.spec.phi_rel;
  out.theta_rel = (1 - u) * a.spec.theta_rel + u * b.spec.theta_rel;
  out.screen_pos = (1 - u) * a.spec.screen_pos + u * b.spec.screen_pos;
  return out;
}

Trajectory ideal_shot_trajectory(const Trajectory& actor,
                                 const std::vector<double>& headings,
                                 const ShotSchedule& schedule) {
  if (static_cast<int>(headings.size()) != actor.n()) {
    throw std::invalid_argument("need one heading per actor waypoint");
  }
  Trajectory shot = actor;
  for (int k = 0; k < actor.n(); ++k) {
    const double t = actor.start_time_s + k * actor.dt();
    const ShotSpec spec = schedule.sample(t);
    const double yaw = headings[k] + spec.phi_rel;
    const Vec3 offset(spec.distance_rho * std::cos(yaw) * std::cos(spec.theta_rel),
                      spec.distance_rho * std::sin(yaw) * std::cos(spec.theta_rel),
                      spec.distance_rho * std::sin(spec.theta_rel));
    shot.set_point(k, actor.point(k) + offset);
  }
  return shot;
}

ShotCostResult shot_cost(const Trajectory& xi_q, const Trajectory& xi_shot) {
  const int n = xi_q.n();
  if (n != xi_shot.n() || std::abs(xi_q.dt() - xi_shot.dt()) > 1e-9) {
    throw std::invalid_argument("shot_cost needs matching trajectory grids");
  }
  ShotCostResult result;
  result.gradient = WaypointMatrix::Zero(n, 3);
  const WaypointMatrix residual = xi_q.waypoints - xi_shot.waypoints;
  result.cost = residual.squaredNorm() / (2.0 * (n - 1));
  result.gradient.bottomRows(n - 1) = residual.bottomRows(n - 1) / (n - 1);
  return result;
}

}  // namespace cineplan
