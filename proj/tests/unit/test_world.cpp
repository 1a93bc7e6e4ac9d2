#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tpp/world.hpp"

using namespace tpp;
using std::numbers::pi;

namespace {

ArmModel unit_arm() {
  ArmModel arm = ArmModel::standard();
  arm.shoulder_origin = Vec3(0, 0, 1);
  arm.link_upper = 1.0;
  arm.link_fore = 1.0;
  return arm;
}

ArmConfig random_config(std::mt19937_64& rng, const ArmModel& arm) {
  Eigen::Vector4d q;
  for (int k = 0; k < 4; ++k)
    q[k] = std::uniform_real_distribution<double>(arm.joint_limits[k].lo, arm.joint_limits[k].hi)(rng);
  return ArmConfig(q);
}

}  // namespace

TEST_CASE("fk: zero angles extend along +x") {
  const ArmPose p = forward_kinematics(unit_arm(), ArmConfig(0, 0, 0, 0));
  CHECK((p.elbow - Vec3(1, 0, 1)).norm() < 1e-12);
  CHECK((p.wrist - Vec3(2, 0, 1)).norm() < 1e-12);
}

TEST_CASE("fk: quarter yaw swings the chain onto +y") {
  const ArmPose p = forward_kinematics(unit_arm(), ArmConfig(pi / 2, 0, 0, 0));
  CHECK((p.elbow - Vec3(0, 1, 1)).norm() < 1e-12);
  CHECK((p.wrist - Vec3(0, 2, 1)).norm() < 1e-12);
}

TEST_CASE("fk: pitched configuration against hand trig") {
  const ArmPose p = forward_kinematics(unit_arm(), ArmConfig(0, pi / 4, -pi / 2, 0));
  const double s = std::sqrt(0.5);
  // Upper link rises at 45 degrees, the forearm then points 45 degrees down.
  CHECK((p.elbow - Vec3(s, 0, 1 + s)).norm() < 1e-12);
  CHECK((p.wrist - Vec3(2 * s, 0, 1)).norm() < 1e-12);
}

TEST_CASE("fk: limit violation is a domain error") {
  CHECK_THROWS_AS(forward_kinematics(ArmModel::standard(), ArmConfig(0, 2.0, 0, 0)), std::domain_error);
}

TEST_CASE("fk: matches rotation-composition oracle and keeps link lengths") {
  std::mt19937_64 rng(11);
  const ArmModel arm = ArmModel::standard();
  for (int i = 0; i < 500; ++i) {
    const ArmConfig c = random_config(rng, arm);
    const ArmPose p = forward_kinematics(arm, c);
    const oracle::Pose o = oracle::fk(arm, c);
    CHECK((p.elbow - o.elbow).norm() < 1e-12);
    CHECK((p.wrist - o.wrist).norm() < 1e-12);
    CHECK(std::abs((p.elbow - arm.shoulder_origin).norm() - arm.link_upper) < 1e-9);
    CHECK(std::abs((p.wrist - p.elbow).norm() - arm.link_fore) < 1e-9);
  }
}

TEST_CASE("fk: yaw equivariance about the shoulder axis") {
  std::mt19937_64 rng(12);
  const ArmModel arm = ArmModel::standard();
  for (int i = 0; i < 200; ++i) {
    ArmConfig c = random_config(rng, arm);
    c.q[0] = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    const double delta = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    ArmConfig turned = c;
    turned.q[0] += delta;
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(delta, Vec3::UnitZ()).toRotationMatrix();
    const ArmPose a = forward_kinematics(arm, c);
    const ArmPose b = forward_kinematics(arm, turned);
    const Vec3 o = arm.shoulder_origin;
    CHECK((rot * (a.elbow - o) + o - b.elbow).norm() < 1e-9);
    CHECK((rot * (a.wrist - o) + o - b.wrist).norm() < 1e-9);
  }
}

TEST_CASE("cylindrical coordinates") {
  const Cylindrical a = cylindrical(Vec3(0, 0, 1), Vec3::Zero());
  CHECK(a.r == 0.0);
  CHECK(a.theta == 0.0);
  CHECK(a.z == 1.0);
  const Cylindrical b = cylindrical(Vec3(1, 1, 2), Vec3::Zero());
  CHECK(b.r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(b.theta == doctest::Approx(pi / 4).epsilon(1e-12));
  CHECK(b.z == 2.0);
  const Vec3 o(0.3, -0.2, 0.9);
  const Cylindrical c = cylindrical(o, o);
  CHECK(c.r == 0.0);
  CHECK(c.theta == 0.0);
  CHECK(c.z == 0.0);
}

TEST_CASE("cylindrical round trip from its inverse construction") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const Vec3 origin(u(rng), u(rng), u(rng));
    const double r = 1e-6 + 2 * u(rng), th = -pi + 2 * pi * u(rng) * 0.999999, z = u(rng) - 0.5;
    const Cylindrical c = cylindrical(origin + Vec3(r * std::cos(th), r * std::sin(th), z), origin);
    CHECK(std::abs(c.r - r) < 1e-9);
    CHECK(std::abs(c.theta - th) < 1e-9);
    CHECK(std::abs(c.z - z) < 1e-9);
  }
}

TEST_CASE("box point distance") {
  const Box unit{Vec3::Zero(), Vec3::Constant(0.5)};
  CHECK(box_point_distance(unit, Vec3::Zero()) == 0.0);
  CHECK(box_point_distance(unit, Vec3(2, 0, 0)) == doctest::Approx(1.5));
  CHECK(box_point_distance(unit, Vec3(1, 1, 1)) == doctest::Approx(std::sqrt(0.75)));
  CHECK(box_point_distance(unit, Vec3(0.5, 0.2, -0.5)) == 0.0);
}

TEST_CASE("box point distance is 1-Lipschitz between sampled points") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Box b{Vec3(0.1, -0.2, 0.3), Vec3(0.3, 0.2, 0.4)};
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng)), q(u(rng), u(rng), u(rng));
    CHECK(box_point_distance(b, p) <= box_point_distance(b, q) + (p - q).norm() + 1e-12);
  }
}

TEST_CASE("is_below") {
  SceneObject box;
  box.box = Box{Vec3(0, 0, 0.25), Vec3::Constant(0.25)};
  CHECK(is_below(box, Vec3(0, 0, 1.0)));
  CHECK_FALSE(is_below(box, Vec3(2, 0, 1.0)));
  CHECK_FALSE(is_below(box, Vec3(0, 0, -1.0)));
  // Footprint margin: 4 cm outside the edge still counts, 6 cm does not.
  CHECK(is_below(box, Vec3(0.29, 0, 1.0)));
  CHECK_FALSE(is_below(box, Vec3(0.31, 0, 1.0)));
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  for (double a = -20; a < 20; a += 0.37) {
    const double w = wrap_angle(a);
    CHECK(w > -pi);
    CHECK(w <= pi);
    CHECK(std::abs(std::remainder(w - a, 2 * pi)) < 1e-9);
  }
}

TEST_CASE("scene validation") {
  Scene s;
  s.goal = Vec3(0.5, 0, 0.9);
  SceneObject held;
  held.id = "cup";
  held.box = Box{Vec3(0.5, 0, 0.9), Vec3::Constant(0.03)};
  held.attributes.assign(6, 0);
  s.objects.push_back(held);
  s.manipulated_id = "cup";
  CHECK_NOTHROW(s.validate());
  SUBCASE("unknown carried id") {
    s.manipulated_id = "mug";
    CHECK_THROWS(s.validate());
  }
  SUBCASE("goal under the table") {
    s.goal.z() = 0.5;
    CHECK_THROWS(s.validate());
  }
  SUBCASE("attribute vector of the wrong length") {
    s.objects[0].attributes.resize(5);
    CHECK_THROWS(s.validate());
  }
  SUBCASE("non-positive half extent") {
    s.objects[0].box.half_extents.x() = 0;
    CHECK_THROWS(s.validate());
  }
}

TEST_CASE("attribute sets") {
  const AttributeSet a = AttributeSet::defaults();
  CHECK(a.size() == 6);
  CHECK(a.index_of("liquid") == attr::kLiquid);
  CHECK(AttributeSet::with_human().index_of("human") == attr::kHuman);
  CHECK_THROWS_AS(a.index_of("sticky"), std::invalid_argument);
}
