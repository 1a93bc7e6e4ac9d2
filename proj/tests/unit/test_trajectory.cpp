#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tpp/trajectory.hpp"

using namespace tpp;

namespace {

Trajectory line(std::initializer_list<double> q1s) {
  Trajectory t;
  for (double q : q1s) t.waypoints.emplace_back(q, 0.1 * q, -0.2 * q, 0.0);
  return t;
}

}  // namespace

TEST_CASE("resample keeps a uniformly spaced trajectory") {
  const Trajectory t = line({0, 1, 2, 3, 4});
  CHECK(resample(t, 5) == t);
}

TEST_CASE("resample 2 -> 3 gives the midpoint") {
  const Trajectory t = line({0, 1});
  const Trajectory r = resample(t, 3);
  REQUIRE(r.size() == 3);
  CHECK((r.waypoints[1].q - 0.5 * (t.waypoints[0].q + t.waypoints[1].q)).norm() < 1e-15);
}

TEST_CASE("resample 3 -> 5 against hand interpolation") {
  Trajectory t;
  t.waypoints = {ArmConfig(0, 0, 0, 0), ArmConfig(1, -1, 2, 0.5), ArmConfig(3, 1, 0, -0.5)};
  const Trajectory r = resample(t, 5);
  const Eigen::Vector4d expected[] = {{0, 0, 0, 0}, {0.5, -0.5, 1, 0.25}, {1, -1, 2, 0.5}, {2, 0, 1, 0}, {3, 1, 0, -0.5}};
  for (int i = 0; i < 5; ++i) CHECK((r.waypoints[i].q - expected[i]).norm() < 1e-15);
}

TEST_CASE("resample rejects n < 2 and empty input") {
  CHECK_THROWS_AS(resample(line({0, 1}), 1), std::domain_error);
  CHECK_THROWS_AS(resample(Trajectory{}, 4), std::domain_error);
}

TEST_CASE("resample is idempotent and keeps endpoints") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory t;
    const int m = 2 + static_cast<int>(rng() % 40);
    for (int i = 0; i < m; ++i) t.waypoints.emplace_back(u(rng), u(rng), u(rng), u(rng));
    const std::size_t n = 2 + rng() % 60;
    const Trajectory once = resample(t, n);
    CHECK(once.size() == n);
    CHECK(resample(once, n) == once);
    CHECK(once.waypoints.front() == t.waypoints.front());
    CHECK(once.waypoints.back() == t.waypoints.back());
  }
}

TEST_CASE("thirds sizes") {
  const auto sizes = [](std::size_t n) {
    const auto p = thirds(n);
    return std::array<std::size_t, 3>{p[0].size(), p[1].size(), p[2].size()};
  };
  CHECK(sizes(9) == std::array<std::size_t, 3>{3, 3, 3});
  CHECK(sizes(10) == std::array<std::size_t, 3>{4, 3, 3});
  CHECK(sizes(3) == std::array<std::size_t, 3>{1, 1, 1});
  CHECK_THROWS_AS(thirds(2), std::domain_error);
}

TEST_CASE("thirds partition every N in [3, 200]") {
  for (std::size_t n = 3; n <= 200; ++n) {
    const auto p = thirds(n);
    CHECK(p[0].begin == 0);
    CHECK(p[0].end == p[1].begin);
    CHECK(p[1].end == p[2].begin);
    CHECK(p[2].end == n);
    for (const auto& r : p) CHECK(r.size() >= 1);
    const auto o = oracle::parts(n);
    CHECK(o[0].size() == p[0].size());
    CHECK(o[1].size() == p[1].size());
  }
}

TEST_CASE("deviation angle") {
  CHECK(deviation_angle(ArmConfig(0.4, 0, 0, 0)) == 0.0);
  CHECK(deviation_angle(ArmConfig(0, 0.5, 0.5, std::numbers::pi / 2 - 1.0)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(deviation_angle(ArmConfig(0, 1.2, 2.5, 2.0)) == doctest::Approx(2 * std::numbers::pi - 5.7));
}

TEST_CASE("object track agrees with the FK oracle on random trajectories") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const oracle::Toy toy = oracle::random_toy(seed);
    const ObjectTrack track = object_track(toy.scene, toy.trajectory);
    REQUIRE(track.position.size() == toy.trajectory.size());
    for (std::size_t j = 0; j < toy.trajectory.size(); ++j) {
      CHECK((track.position[j] - oracle::fk(toy.scene.arm, toy.trajectory.waypoints[j]).wrist).norm() < 1e-12);
      CHECK(std::abs(track.deviation[j] - oracle::deviation(toy.trajectory.waypoints[j])) < 1e-12);
      CHECK(track.deviation[j] >= 0.0);
      CHECK(track.deviation[j] <= std::numbers::pi);
    }
  }
}

TEST_CASE("trajectory csv columns") {
  const oracle::Toy toy = oracle::random_toy(3, 4);
  std::ostringstream os;
  write_trajectory_csv(os, toy.scene, toy.trajectory);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "j,q1,q2,q3,q4,wrist_x,wrist_y,wrist_z,deviation");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}
