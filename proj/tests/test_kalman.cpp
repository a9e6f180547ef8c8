#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cineplan/kalman.hpp"

using namespace cineplan;

TEST_CASE("predict moves the mean by v*dt and inflates the covariance") {
  NoiseParams noise;
  ActorState s = initial_actor_state(Vec3(1, 2, 3), 0.0, 0.0, noise);
  s.velocity = Vec3(2, -1, 0.5);
  const ActorState out = kf_predict(s, 0.4, noise);
  CHECK((out.position - Vec3(1.8, 1.6, 3.2)).norm() < 1e-12);
  CHECK((out.velocity - s.velocity).norm() == 0.0);
  CHECK(out.covariance.trace() > s.covariance.trace());
  CHECK(out.last_update_s == doctest::Approx(0.4));
}

TEST_CASE("update pulls the state toward the measurement and shrinks position variance") {
  NoiseParams noise;
  ActorState s = initial_actor_state(Vec3::Zero(), 0.0, 0.0, noise);
  s = kf_predict(s, 0.1, noise);
  const ActorState out = kf_update(s, Vec3(1, 0, 0), noise);
  CHECK(out.position.x() > 0.0);
  CHECK(out.position.x() < 1.0);
  CHECK(out.covariance.topLeftCorner<3, 3>().trace() <
        s.covariance.topLeftCorner<3, 3>().trace());
}

TEST_CASE("noiseless uniform motion at 10 Hz converges to the true velocity") {
  NoiseParams noise;
  const Vec3 v_true(1.0, 0.5, 0.0);
  ActorState s = initial_actor_state(Vec3::Zero(), 0.0, 0.0, noise);
  // The transient rings (the velocity estimate overshoots the truth and
  // oscillates with decaying amplitude), so the honest convergence statement
  // is that the peak error over each successive second shrinks.
  double window_peak[5] = {0, 0, 0, 0, 0};
  for (int i = 1; i <= 50; ++i) {
    const double t = 0.1 * i;
    s = kf_predict(s, 0.1, noise);
    s = kf_update(s, v_true * t, noise);
    const double err = (s.velocity - v_true).norm();
    window_peak[(i - 1) / 10] = std::max(window_peak[(i - 1) / 10], err);
  }
  for (int w = 1; w < 5; ++w) CHECK(window_peak[w] < window_peak[w - 1]);
  CHECK((s.velocity - v_true).norm() <= 0.01 * v_true.norm());
  CHECK((s.position - v_true * 5.0).norm() < 0.05);
}

TEST_CASE("covariance stays symmetric PSD through random measurement sequences") {
  NoiseParams noise;
  noise.process_accel_std = 2.0;
  noise.measurement_pos_std = 0.5;
  std::mt19937 rng(99);
  std::normal_distribution<double> jitter(0.0, 1.5);
  ActorState s = initial_actor_state(Vec3::Zero(), 0.0, 0.0, noise);
  for (int i = 0; i < 200; ++i) {
    s = kf_predict(s, 0.1, noise);
    const Vec3 z(0.1 * i + jitter(rng), jitter(rng), 1.0 + 0.1 * jitter(rng));
    s = kf_update(s, z, noise);
    CHECK((s.covariance - s.covariance.transpose()).norm() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat6> eig(s.covariance);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    CHECK(std::isfinite(s.heading));
    CHECK(s.heading > -M_PI);
    CHECK(s.heading <= M_PI);
  }
}

TEST_CASE("heading follows the velocity only above the speed gate") {
  NoiseParams noise;
  noise.measurement_pos_std = 0.01;
  ActorState s = initial_actor_state(Vec3::Zero(), 0.0, M_PI / 2, noise);

  SUBCASE("slow drift holds the previous heading") {
    for (int i = 1; i <= 30; ++i) {
      s = kf_predict(s, 0.1, noise);
      s = kf_update(s, Vec3(0.01 * i, 0, 0), noise);  // 0.1 m/s, under the gate
    }
    CHECK(s.velocity.head<2>().norm() < kHeadingSpeedGate);
    CHECK(s.heading == doctest::Approx(M_PI / 2));
  }

  SUBCASE("walking pace locks heading to the motion direction") {
    for (int i = 1; i <= 30; ++i) {
      s = kf_predict(s, 0.1, noise);
      s = kf_update(s, Vec3(0.1 * i, 0.1 * i, 0), noise);  // ~1.4 m/s diagonal
    }
    CHECK(s.heading == doctest::Approx(M_PI / 4).epsilon(1e-3));
  }
}

TEST_CASE("forecast of a stationary actor repeats the position") {
  NoiseParams noise;
  ActorState s = initial_actor_state(Vec3(3, -1, 0.5), 12.0, 0.3, noise);
  const ActorForecast f = forecast_actor(s, 10.0, 51);
  CHECK(f.trajectory.n() == 51);
  CHECK(f.trajectory.start_time_s == doctest::Approx(12.0));
  CHECK(static_cast<int>(f.headings.size()) == 51);
  for (int k = 0; k < 51; ++k) {
    CHECK((f.trajectory.point(k) - Vec3(3, -1, 0.5)).norm() == 0.0);
    CHECK(f.headings[k] == doctest::Approx(0.3));
  }
}

TEST_CASE("forecast of a moving actor is a uniformly spaced line") {
  NoiseParams noise;
  ActorState s = initial_actor_state(Vec3::Zero(), 0.0, 0.0, noise);
  s.velocity = Vec3(1.5, 0, 0);
  const ActorForecast f = forecast_actor(s, 10.0, 11);
  for (int k = 0; k < 11; ++k) {
    CHECK((f.trajectory.point(k) - Vec3(1.5 * k, 0, 0)).norm() < 1e-12);
  }
}

TEST_CASE("forecast then time_shift equals forecasting from the predicted state") {
  NoiseParams noise;
  ActorState s = initial_actor_state(Vec3(1, 1, 1), 5.0, 0.0, noise);
  s.velocity = Vec3(0.7, -0.2, 0.1);
  const ActorForecast base = forecast_actor(s, 10.0, 51);
  const double step = base.trajectory.dt();
  const Trajectory shifted = time_shift(base.trajectory, step, s.velocity);
  const ActorForecast direct = forecast_actor(kf_predict(s, step, noise), 10.0, 51);
  CHECK((shifted.waypoints - direct.trajectory.waypoints).norm() < 1e-9);
  CHECK(shifted.start_time_s == doctest::Approx(direct.trajectory.start_time_s));
}

TEST_CASE("measurement csv parses well-formed rows and rejects bad input") {
  namespace fs = std::filesystem;
  const std::string good = (fs::temp_directory_path() / "meas_good.csv").string();
  {
    std::ofstream out(good);
    out << "time_s,x,y,z\n0.0,1.0,2.0,3.0\n0.1,1.1,2.0,3.0\n";
  }
  const auto rows = load_measurement_csv(good);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].time_s == doctest::Approx(0.0));
  CHECK((rows[1].position - Vec3(1.1, 2.0, 3.0)).norm() < 1e-12);
  std::remove(good.c_str());

  const std::string bad = (fs::temp_directory_path() / "meas_bad.csv").string();
  {
    std::ofstream out(bad);
    out << "0.0,1.0,2.0,3.0\n0.1,oops,2.0,3.0\n";
  }
  CHECK_THROWS_AS(load_measurement_csv(bad), std::runtime_error);
  {
    std::ofstream out(bad);
    out << "0.2,1.0,2.0,3.0\n0.1,1.0,2.0,3.0\n";
  }
  CHECK_THROWS_AS(load_measurement_csv(bad), std::runtime_error);
  std::remove(bad.c_str());
  CHECK_THROWS_AS(load_measurement_csv("/nonexistent/meas.csv"), std::runtime_error);
}
