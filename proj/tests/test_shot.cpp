#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cineplan/shot.hpp"

using namespace cineplan;

namespace {

ShotSchedule constant_schedule(const ShotSpec& spec) {
  ShotSchedule schedule;
  schedule.keyframes.push_back({0.0, spec});
  return schedule;
}

}  // namespace

TEST_CASE("shot scale maps to camera range through the pinhole model") {
  // A 1.8 m actor filling a quarter of the frame under a 60 degree vertical
  // fov sits 6.2354 m away.
  CHECK(shot_scale_to_distance(0.25, 1.8, M_PI / 3) ==
        doctest::Approx(6.2354).epsilon(1e-4));
  // Filling the whole frame: 1.8 / (2 tan 30 deg).
  CHECK(shot_scale_to_distance(1.0, 1.8, M_PI / 3) ==
        doctest::Approx(1.558845).epsilon(1e-5));
  // Tighter framing means a closer camera.
  CHECK(shot_scale_to_distance(0.5, 1.8, M_PI / 3) <
        shot_scale_to_distance(0.25, 1.8, M_PI / 3));
  CHECK_THROWS_AS(shot_scale_to_distance(0.0, 1.8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(shot_scale_to_distance(0.5, 1.8, 4.0), std::invalid_argument);
}

TEST_CASE("ideal shot offsets follow heading, azimuth and elevation") {
  Trajectory actor = zero_trajectory(3, 1.0);
  for (int k = 0; k < 3; ++k) actor.set_point(k, Vec3(0, 0, 1));
  const std::vector<double> headings(3, 0.0);

  SUBCASE("front shot sits along the heading") {
    const Trajectory shot =
        ideal_shot_trajectory(actor, headings, constant_schedule({5.0, 0.0, 0.0, {0.5, 0.5}}));
    CHECK((shot.point(1) - Vec3(5, 0, 1)).norm() < 1e-12);
  }
  SUBCASE("side shot rotates a quarter turn") {
    const Trajectory shot = ideal_shot_trajectory(
        actor, headings, constant_schedule({5.0, M_PI / 2, 0.0, {0.5, 0.5}}));
    CHECK((shot.point(1) - Vec3(0, 5, 1)).norm() < 1e-9);
  }
  SUBCASE("overhead elevation collapses the horizontal offset") {
    const Trajectory shot = ideal_shot_trajectory(
        actor, headings, constant_schedule({5.0, 0.0, M_PI / 2, {0.5, 0.5}}));
    CHECK((shot.point(1) - Vec3(0, 0, 6)).norm() < 1e-9);
  }
  SUBCASE("heading rotates the whole frame") {
    const std::vector<double> turned(3, M_PI);
    const Trajectory shot = ideal_shot_trajectory(
        actor, turned, constant_schedule({5.0, 0.0, 0.0, {0.5, 0.5}}));
    CHECK((shot.point(1) - Vec3(-5, 0, 1)).norm() < 1e-9);
  }
}

TEST_CASE("an unwrapped 0 to 2pi azimuth keyframe pair orbits the actor once") {
  const int n = 9;
  Trajectory actor = zero_trajectory(n, 8.0);
  const std::vector<double> headings(n, 0.0);
  ShotSchedule schedule;
  schedule.keyframes.push_back({0.0, {4.0, 0.0, 0.5, {0.5, 0.5}}});
  schedule.keyframes.push_back({8.0, {4.0, 2 * M_PI, 0.5, {0.5, 0.5}}});
  const Trajectory shot = ideal_shot_trajectory(actor, headings, schedule);
  const double ring_radius = 4.0 * std::cos(0.5);
  const double height = 4.0 * std::sin(0.5);
  for (int k = 0; k < n; ++k) {
    const double phi = 2 * M_PI * k / (n - 1);
    const Vec3 want(ring_radius * std::cos(phi), ring_radius * std::sin(phi), height);
    CHECK((shot.point(k) - want).norm() < 1e-9);
  }
  // Full orbit: first and last viewpoints coincide.
  CHECK((shot.point(0) - shot.point(n - 1)).norm() < 1e-9);
}

TEST_CASE("every ideal viewpoint sits exactly rho from the actor") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 21;
  Trajectory actor = zero_trajectory(n, 10.0);
  std::vector<double> headings(n);
  for (int k = 0; k < n; ++k) {
    actor.set_point(k, Vec3(5 * u(rng), 5 * u(rng), 1 + 0.1 * u(rng)));
    headings[k] = M_PI * u(rng);
  }
  ShotSchedule schedule;
  schedule.keyframes.push_back({0.0, {3.0, 0.3, -0.4, {0.4, 0.6}}});
  schedule.keyframes.push_back({10.0, {9.0, 2.0, 0.7, {0.5, 0.5}}});
  const Trajectory shot = ideal_shot_trajectory(actor, headings, schedule);
  for (int k = 0; k < n; ++k) {
    const double t = k * actor.dt();
    const double rho = schedule.sample(t).distance_rho;
    CHECK((shot.point(k) - actor.point(k)).norm() == doctest::Approx(rho).epsilon(1e-9));
  }
}

TEST_CASE("schedule sampling clamps outside the keyframe range") {
  ShotSchedule schedule;
  schedule.keyframes.push_back({2.0, {3.0, 0.1, 0.0, {0.5, 0.5}}});
  schedule.keyframes.push_back({4.0, {7.0, 0.5, 0.0, {0.5, 0.5}}});
  CHECK(schedule.sample(-10.0).distance_rho == doctest::Approx(3.0));
  CHECK(schedule.sample(99.0).distance_rho == doctest::Approx(7.0));
  CHECK(schedule.sample(3.0).distance_rho == doctest::Approx(5.0));
  CHECK(schedule.sample(3.0).phi_rel == doctest::Approx(0.3));
}

TEST_CASE("shot cost is zero on the ideal trajectory and quadratic off it") {
  const int n = 11;
  Trajectory shot = line_trajectory(Vec3(0, 0, 2), Vec3(10, 0, 2), n, 10.0);
  ShotCostResult at_ideal = shot_cost(shot, shot);
  CHECK(at_ideal.cost == 0.0);
  CHECK(at_ideal.gradient.norm() == 0.0);

  // A uniform 1 m offset on every waypoint costs n / (2(n-1)).
  Trajectory offset = shot;
  for (int k = 0; k < n; ++k) offset.set_point(k, shot.point(k) + Vec3(1, 0, 0));
  const ShotCostResult shifted = shot_cost(offset, shot);
  CHECK(shifted.cost == doctest::Approx(n / (2.0 * (n - 1))).epsilon(1e-12));
  CHECK(shifted.gradient.row(0).norm() == 0.0);
  for (int k = 1; k < n; ++k) {
    CHECK(shifted.gradient(k, 0) == doctest::Approx(1.0 / (n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("shot cost gradient matches finite differences on free waypoints") {
  std::mt19937 rng(29);
  std::normal_distribution<double> dist(0.0, 1.0);
  const int n = 9;
  Trajectory shot = line_trajectory(Vec3::Zero(), Vec3(8, 2, 1), n, 4.0);
  Trajectory q = shot;
  for (int k = 0; k < n; ++k)
    q.set_point(k, shot.point(k) + Vec3(dist(rng), dist(rng), dist(rng)));

  const ShotCostResult res = shot_cost(q, shot);
  const double h = 1e-6;
  for (int k = 1; k < n; ++k) {
    for (int a = 0; a < 3; ++a) {
      Trajectory hi = q, lo = q;
      hi.waypoints(k, a) += h;
      lo.waypoints(k, a) -= h;
      const double fd = (shot_cost(hi, shot).cost - shot_cost(lo, shot).cost) / (2 * h);
      CHECK(res.gradient(k, a) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("shot cost gradient is exactly linear in the trajectory") {
  const int n = 7;
  Trajectory shot = line_trajectory(Vec3::Zero(), Vec3(6, 0, 0), n, 3.0);
  Trajectory q = shot;
  std::mt19937 rng(31);
  std::normal_distribution<double> dist(0.0, 1.0);
  WaypointMatrix delta(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) delta(i, j) = dist(rng);
  delta.row(0).setZero();  // the start is pinned

  Trajectory q2 = q;
  q2.waypoints += delta;
  const WaypointMatrix diff =
      shot_cost(q2, shot).gradient - shot_cost(q, shot).gradient;
  CHECK((diff - delta / (n - 1)).norm() < 1e-12);
}

TEST_CASE("shot cost rejects mismatched grids") {
  const Trajectory a = line_trajectory(Vec3::Zero(), Vec3(1, 0, 0), 11, 5.0);
  const Trajectory b = line_trajectory(Vec3::Zero(), Vec3(1, 0, 0), 21, 5.0);
  CHECK_THROWS_AS(shot_cost(a, b), std::invalid_argument);
}

TEST_CASE("shot spec validation enforces ranges") {
  CHECK_NOTHROW(validate(ShotSpec{8.0, 0.0, 0.0, {0.5, 0.5}}));
  CHECK_THROWS_AS(validate(ShotSpec{0.0, 0.0, 0.0, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ShotSpec{3.0, 0.0, 2.0, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ShotSpec{3.0, 0.0, 0.0, {1.5, 0.5}}), std::invalid_argument);
  ShotSchedule bad;
  bad.keyframes.push_back({1.0, {}});
  bad.keyframes.push_back({1.0, {}});
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
