#include "tpp/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace tpp {

AttributeSet::AttributeSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("attribute set must not be empty");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw std::invalid_argument("attribute labels must be unique");
}

AttributeSet AttributeSet::defaults() {
  return AttributeSet({"heavy", "fragile", "sharp", "hot", "liquid", "electronic"});
}

AttributeSet AttributeSet::with_human() {
  auto labels = defaults().labels();
  labels.emplace_back("human");
  return AttributeSet(std::move(labels));
}

std::size_t AttributeSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown attribute: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

bool AttributeSet::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

Vec3 axis_separation(const Box& a, const Box& b) {
  Vec3 gap;
  for (int i = 0; i < 3; ++i) {
    const double d = std::abs(a.center[i] - b.center[i]) - a.half_extents[i] - b.half_extents[i];
    gap[i] = std::max(0.0, d);
  }
  return gap;
}

double box_box_distance(const Box& a, const Box& b) { return axis_separation(a, b).norm(); }

bool boxes_overlap(const Box& a, const Box& b) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(a.center[i] - b.center[i]) >= a.half_extents[i] + b.half_extents[i]) return false;
  }
  return true;
}

ArmModel ArmModel::standard() {
  ArmModel arm;
  arm.joint_limits = {JointLimit{-std::numbers::pi, std::numbers::pi},
                      JointLimit{-std::numbers::pi / 2.0, std::numbers::pi / 2.0},
                      JointLimit{-2.8, 2.8},
                      JointLimit{-std::numbers::pi, std::numbers::pi}};
  return arm;
}

void ArmModel::validate() const {
  if (!(link_upper > 0.0) || !(link_fore > 0.0))
    throw std::invalid_argument("arm link lengths must be positive");
  for (const auto& lim : joint_limits) {
    if (!(lim.lo < lim.hi)) throw std::invalid_argument("joint limit lo must be < hi");
  }
}

bool within_limits(const ArmModel& arm, const ArmConfig& cfg) {
  for (std::size_t i = 0; i < kJoints; ++i) {
    const double v = cfg.q[static_cast<int>(i)];
    if (!(v >= arm.joint_limits[i].lo && v <= arm.joint_limits[i].hi)) return false;
  }
  return true;
}

const SceneObject& Scene::manipulated() const {
  const SceneObject* found = nullptr;
  for (const auto& o : objects) {
    if (o.id == manipulated_id) {
      if (found) throw std::invalid_argument("manipulated id is ambiguous: " + manipulated_id);
      found = &o;
    }
  }
  if (!found) throw std::invalid_argument("manipulated id not found: " + manipulated_id);
  return *found;
}

std::vector<const SceneObject*> Scene::obstacles() const {
  std::vector<const SceneObject*> out;
  out.reserve(objects.size());
  for (const auto& o : objects) {
    if (o.id != manipulated_id) out.push_back(&o);
  }
  return out;
}

void Scene::validate() const {
  arm.validate();
  std::set<std::string> ids;
  for (const auto& o : objects) {
    if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate object id: " + o.id);
    if (!(o.box.half_extents.array() > 0.0).all())
      throw std::invalid_argument("object half extents must be positive: " + o.id);
    if (o.attributes.size() != attributes.size())
      throw std::invalid_argument("attribute vector length mismatch: " + o.id);
  }
  manipulated();
  if (!(goal.z() > table_height)) throw std::invalid_argument("goal must lie above the table");
  if (!within_limits(arm, start_config)) throw std::invalid_argument("start config violates limits");
}

ArmPose forward_kinematics_unchecked(const ArmModel& arm, const ArmConfig& cfg) {
  const double q1 = cfg.q[0], q2 = cfg.q[1], q3 = cfg.q[2];
  const double c1 = std::cos(q1), s1 = std::sin(q1);
  ArmPose pose;
  pose.shoulder = arm.shoulder_origin;
  pose.elbow = pose.shoulder + arm.link_upper * Vec3(std::cos(q2) * c1, std::cos(q2) * s1, std::sin(q2));
  const double a = q2 + q3;
  pose.wrist = pose.elbow + arm.link_fore * Vec3(std::cos(a) * c1, std::cos(a) * s1, std::sin(a));
  return pose;
}

ArmPose forward_kinematics(const ArmModel& arm, const ArmConfig& cfg) {
  if (!within_limits(arm, cfg)) throw std::domain_error("arm config violates joint limits");
  return forward_kinematics_unchecked(arm, cfg);
}

Cylindrical cylindrical(const Vec3& p, const Vec3& origin) {
  const Vec3 d = p - origin;
  Cylindrical c;
  c.r = std::hypot(d.x(), d.y());
  c.theta = c.r < 1e-12 ? 0.0 : std::atan2(d.y(), d.x());
  c.z = d.z();
  return c;
}

double box_point_distance(const Box& box, const Vec3& p) {
  const Vec3 excess = ((p - box.center).cwiseAbs() - box.half_extents).cwiseMax(0.0);
  return excess.norm();
}

bool is_below(const SceneObject& candidate, const Vec3& object_position) {
  const Box& b = candidate.box;
  if (!(b.top() < object_position.z())) return false;
  const double mx = b.half_extents.x() + kBelowFootprintMargin;
  const double my = b.half_extents.y() + kBelowFootprintMargin;
  return std::abs(object_position.x() - b.center.x()) <= mx &&
         std::abs(object_position.y() - b.center.y()) <= my;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace tpp
