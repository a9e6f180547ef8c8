#include "cineplan/kalman.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cineplan {

namespace {

using Mat3 = Eigen::Matrix3d;

}  // namespace

double normalize_angle(double radians) {
  double a = std::remainder(radians, 2.0 * M_PI);
  if (a <= -M_PI) a = M_PI;
  return a;
}

ActorState initial_actor_state(const Vec3& position, double time_s,
                               double heading, const NoiseParams& noise) {
  ActorState state;
  state.position = position;
  state.velocity = Vec3::Zero();
  state.heading = normalize_angle(heading);
  state.last_update_s = time_s;
  const double r2 = noise.measurement_pos_std * noise.measurement_pos_std;
  // Velocity is unknown at startup; give it a broad prior so the first few
  // measurements pull it in quickly.
  state.covariance = Mat6::Zero();
  state.covariance.topLeftCorner<3, 3>() = r2 * Mat3::Identity();
  state.covariance.bottomRightCorner<3, 3>() = 4.0 * Mat3::Identity();
  return state;
}

ActorState kf_predict(const ActorState& state, double dt, const NoiseParams& noise) {
  if (dt < 0.0) throw std::invalid_argument("kf_predict needs dt >= 0");
  ActorState out = state;
  out.position = state.position + dt * state.velocity;
  out.last_update_s = state.last_update_s + dt;

  Mat6 f = Mat6::Identity();
  f.topRightCorner<3, 3>() = dt * Mat3::Identity();

  const double q = noise.process_accel_std * noise.process_accel_std;
  Mat6 qm = Mat6::Zero();
  qm.topLeftCorner<3, 3>() = q * dt * dt * dt / 3.0 * Mat3::Identity();
  qm.topRightCorner<3, 3>() = q * dt * dt / 2.0 * Mat3::Identity();
  qm.bottomLeftCorner<3, 3>() = qm.topRightCorner<3, 3>();
  qm.bottomRightCorner<3, 3>() = q * dt * Mat3::Identity();

  out.covariance = f * state.covariance * f.transpose() + qm;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

ActorState kf_update(const ActorState& state, const Vec3& measured_position,
                     const NoiseParams& noise) {
  const double r2 = noise.measurement_pos_std * noise.measurement_pos_std;
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h.leftCols<3>() = Mat3::Identity();

  const Mat3 s = state.covariance.topLeftCorner<3, 3>() + r2 * Mat3::Identity();
  const Eigen::Matrix<double, 6, 3> k =
      state.covariance.leftCols<3>() * s.inverse();

  ActorState out = state;
  const Vec3 innovation = measured_position - state.position;
  Eigen::Matrix<double, 6, 1> x;
  x << state.position, state.velocity;
  x += k * innovation;
  out.position = x.head<3>();
  out.velocity = x.tail<3>();

  const Mat6 ikh = Mat6::Identity() - k * h;
  out.covariance = ikh * state.covariance * ikh.transpose() +
                   k * (r2 * Mat3::Identity()) * k.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();

  if (out.velocity.head<2>().norm() > kHeadingSpeedGate) {
    out.heading = normalize_angle(std::atan2(out.velocity.y(), out.velocity.x()));
  }
  return out;
}

ActorForecast forecast_actor(const ActorState& state, double horizon_s, int n) {
  ActorForecast forecast;
  forecast.trajectory = zero_trajectory(n, horizon_s, state.last_update_s);
  const double dt = forecast.trajectory.dt();
  for (int k = 0; k < n; ++k) {
    forecast.trajectory.set_point(k, state.position + (k * dt) * state.velocity);
  }
  forecast.headings.assign(n, state.heading);
  return forecast;
}

std::vector<TimedMeasurement> load_measurement_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measurement file " + path);
  std::vector<TimedMeasurement> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.find("time_s") != std::string::npos) continue;
    std::istringstream ss(line);
    TimedMeasurement m;
    char comma;
    if (!(ss >> m.time_s >> comma >> m.position.x() >> comma >> m.position.y() >>
          comma >> m.position.z())) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed measurement row '" + line + "'");
    }
    if (!rows.empty() && m.time_s <= rows.back().time_s) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": timestamps must be strictly increasing");
    }
    rows.push_back(m);
  }
  return rows;
}

}  // namespace cineplan
