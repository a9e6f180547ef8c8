#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cineplan/geometry.hpp"

using namespace cineplan;

namespace {

Trajectory polynomial_trajectory(int n, double horizon, const Vec3& c0, const Vec3& c1,
                                 const Vec3& c2) {
  Trajectory traj = zero_trajectory(n, horizon);
  for (int k = 0; k < n; ++k) {
    const double t = k * traj.dt();
    traj.set_point(k, c0 + c1 * t + c2 * t * t);
  }
  return traj;
}

}  // namespace

TEST_CASE("velocity is exact on linear trajectories") {
  const Vec3 v(1.5, -0.25, 3.0);
  const Trajectory traj = polynomial_trajectory(11, 5.0, Vec3(1, 2, 3), v, Vec3::Zero());
  const WaypointMatrix vel = finite_diff_velocity(traj);
  for (int k = 0; k < traj.n(); ++k) {
    CHECK((vel.row(k).transpose() - v).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("velocity and acceleration are exact on quadratics, endpoints included") {
  const Vec3 c1(2.0, 0.0, -1.0);
  const Vec3 c2(0.5, -0.3, 0.1);
  const Trajectory traj = polynomial_trajectory(21, 10.0, Vec3(0, 1, 0), c1, c2);
  const WaypointMatrix vel = finite_diff_velocity(traj);
  const WaypointMatrix acc = finite_diff_acceleration(traj);
  for (int k = 0; k < traj.n(); ++k) {
    const double t = k * traj.dt();
    const Vec3 v_true = c1 + 2.0 * c2 * t;
    CHECK((vel.row(k).transpose() - v_true).norm() < 1e-10);
    CHECK((acc.row(k).transpose() - 2.0 * c2).norm() < 1e-10);
  }
}

TEST_CASE("acceleration of p(t) = (t^2, 0, 0) is (2, 0, 0) at every waypoint") {
  const Trajectory traj =
      polynomial_trajectory(101, 10.0, Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0));
  const WaypointMatrix acc = finite_diff_acceleration(traj);
  for (int k = 0; k < traj.n(); ++k) {
    CHECK(acc(k, 0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(acc(k, 1)) < 1e-12);
    CHECK(std::abs(acc(k, 2)) < 1e-12);
  }
}

TEST_CASE("velocity operator transpose matches the explicit stencil matrix") {
  const int n = 9;
  const double dt = 0.25;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  d(0, 0) = -3.0;
  d(0, 1) = 4.0;
  d(0, 2) = -1.0;
  for (int k = 1; k < n - 1; ++k) {
    d(k, k - 1) = -1.0;
    d(k, k + 1) = 1.0;
  }
  d(n - 1, n - 1) = 3.0;
  d(n - 1, n - 2) = -4.0;
  d(n - 1, n - 3) = 1.0;
  d /= 2.0 * dt;

  std::mt19937 rng(7);
  std::normal_distribution<double> dist(0.0, 1.0);
  WaypointMatrix w(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) w(i, j) = dist(rng);

  const WaypointMatrix got = velocity_operator_transpose(w, dt);
  const Eigen::MatrixXd want = d.transpose() * w;
  CHECK((got - want).norm() < 1e-12);

  // And the forward operator applied through finite_diff_velocity agrees too.
  Trajectory traj = zero_trajectory(n, dt * (n - 1));
  traj.waypoints = w;
  CHECK((finite_diff_velocity(traj) - (d * w)).norm() < 1e-12);
}

TEST_CASE("time_shift by one sample advances waypoints and extends the tail") {
  const int n = 51;
  const double horizon = 10.0;
  std::mt19937 rng(3);
  std::normal_distribution<double> dist(0.0, 2.0);
  Trajectory traj = zero_trajectory(n, horizon, 100.0);
  for (int k = 0; k < n; ++k)
    traj.set_point(k, Vec3(dist(rng), dist(rng), dist(rng)));

  const Vec3 v_ext(1.0, -2.0, 0.5);
  const Trajectory shifted = time_shift(traj, 0.2, v_ext);

  CHECK(shifted.n() == n);
  CHECK(shifted.horizon_s == doctest::Approx(horizon));
  CHECK(shifted.dt() == doctest::Approx(traj.dt()));
  CHECK(shifted.start_time_s == doctest::Approx(100.2));
  for (int k = 0; k + 1 < n; ++k) {
    CHECK((shifted.point(k) - traj.point(k + 1)).norm() < 1e-12);
  }
  const Vec3 want_tail = traj.point(n - 1) + 0.2 * v_ext;
  CHECK((shifted.point(n - 1) - want_tail).norm() < 1e-12);
}

TEST_CASE("time_shift with elapsed zero is the identity") {
  Trajectory traj = line_trajectory(Vec3(0, 0, 0), Vec3(5, 5, 1), 11, 4.0);
  const Trajectory shifted = time_shift(traj, 0.0, Vec3(9, 9, 9));
  CHECK((shifted.waypoints - traj.waypoints).norm() == 0.0);
  CHECK(shifted.start_time_s == traj.start_time_s);
}

TEST_CASE("time_shift interpolates between samples for fractional shifts") {
  Trajectory traj = line_trajectory(Vec3(0, 0, 0), Vec3(10, 0, 0), 11, 10.0);
  const Trajectory shifted = time_shift(traj, 0.37, Vec3::Zero());
  for (int k = 0; k < 10; ++k) {
    CHECK(shifted.point(k).x() == doctest::Approx(0.37 + k).epsilon(1e-12));
  }
  // Past the old horizon the tail holds position under zero extend velocity.
  CHECK(shifted.point(10).x() == doctest::Approx(10.0));
}

TEST_CASE("time_shift rejects out-of-range elapsed times") {
  Trajectory traj = line_trajectory(Vec3::Zero(), Vec3(1, 1, 1), 5, 2.0);
  CHECK_THROWS_AS(time_shift(traj, -0.1, Vec3::Zero()), std::invalid_argument);
  CHECK_THROWS_AS(time_shift(traj, 2.0, Vec3::Zero()), std::invalid_argument);
}

TEST_CASE("validate rejects degenerate trajectories") {
  CHECK_THROWS_AS(validate(zero_trajectory(2, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(validate(zero_trajectory(5, 0.0)), std::invalid_argument);
  Trajectory bad = zero_trajectory(5, 1.0);
  bad.waypoints(2, 1) = std::nan("");
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK_NOTHROW(validate(zero_trajectory(3, 1.0)));
}

TEST_CASE("sample interpolates linearly and clamps at the ends") {
  Trajectory traj = line_trajectory(Vec3(0, 0, 0), Vec3(4, 8, 0), 5, 4.0);
  CHECK((traj.sample(1.5) - Vec3(1.5, 3.0, 0)).norm() < 1e-12);
  CHECK((traj.sample(-1.0) - Vec3(0, 0, 0)).norm() == 0.0);
  CHECK((traj.sample(99.0) - Vec3(4, 8, 0)).norm() == 0.0);
}
