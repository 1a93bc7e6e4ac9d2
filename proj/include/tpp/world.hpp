#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tpp {

using Vec3 = Eigen::Vector3d;

/// Ordered attribute vocabulary. The feature block layout depends on the
/// order, so a set is fixed for the lifetime of a run.
class AttributeSet {
 public:
  AttributeSet() = default;
  explicit AttributeSet(std::vector<std::string> labels);

  /// {heavy, fragile, sharp, hot, liquid, electronic}
  static AttributeSet defaults();
  /// defaults() plus a trailing "human" label.
  static AttributeSet with_human();

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Throws std::invalid_argument for unknown labels.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const;

  bool operator==(const AttributeSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

namespace attr {
inline constexpr std::size_t kHeavy = 0;
inline constexpr std::size_t kFragile = 1;
inline constexpr std::size_t kSharp = 2;
inline constexpr std::size_t kHot = 3;
inline constexpr std::size_t kLiquid = 4;
inline constexpr std::size_t kElectronic = 5;
inline constexpr std::size_t kHuman = 6;
}  // namespace attr

/// Axis-aligned box.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);

  Vec3 lower() const { return center - half_extents; }
  Vec3 upper() const { return center + half_extents; }
  double top() const { return center.z() + half_extents.z(); }
  double bottom() const { return center.z() - half_extents.z(); }
};

/// Per-axis gap between the intervals of two boxes; 0 on axes where they overlap.
Vec3 axis_separation(const Box& a, const Box& b);
/// Euclidean distance between two solid boxes (0 when touching or overlapping).
double box_box_distance(const Box& a, const Box& b);
/// True when the open interiors intersect.
bool boxes_overlap(const Box& a, const Box& b);

struct SceneObject {
  std::string id;
  Box box;
  std::vector<std::uint8_t> attributes;

  bool has(std::size_t attribute) const {
    return attribute < attributes.size() && attributes[attribute] != 0;
  }
};

struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr std::size_t kJoints = 4;

/// Base yaw followed by three pitch joints acting in a vertical plane.
struct ArmModel {
  Vec3 shoulder_origin = Vec3(0.0, 0.0, 0.9);
  double link_upper = 0.45;
  double link_fore = 0.45;
  std::array<JointLimit, kJoints> joint_limits{};

  static ArmModel standard();
  void validate() const;
};

struct ArmConfig {
  Eigen::Vector4d q = Eigen::Vector4d::Zero();

  ArmConfig() = default;
  explicit ArmConfig(const Eigen::Vector4d& joints) : q(joints) {}
  ArmConfig(double q1, double q2, double q3, double q4) : q(q1, q2, q3, q4) {}

  bool operator==(const ArmConfig& other) const { return q == other.q; }
};

bool within_limits(const ArmModel& arm, const ArmConfig& cfg);

struct ArmPose {
  Vec3 shoulder;
  Vec3 elbow;
  Vec3 wrist;
};

struct Scene {
  AttributeSet attributes = AttributeSet::defaults();
  std::vector<SceneObject> objects;
  std::string manipulated_id;
  double table_height = 0.7;
  Vec3 goal = Vec3::Zero();
  ArmConfig start_config;
  ArmModel arm = ArmModel::standard();

  /// The carried object. Throws std::invalid_argument if the id does not
  /// resolve to exactly one object.
  const SceneObject& manipulated() const;
  /// Every object except the carried one.
  std::vector<const SceneObject*> obstacles() const;
  void validate() const;
};

/// Throws std::domain_error when cfg violates the joint limits.
ArmPose forward_kinematics(const ArmModel& arm, const ArmConfig& cfg);
/// Unchecked variant used on hot paths where limits were already enforced.
ArmPose forward_kinematics_unchecked(const ArmModel& arm, const ArmConfig& cfg);

struct Cylindrical {
  double r = 0.0;
  double theta = 0.0;
  double z = 0.0;
};

Cylindrical cylindrical(const Vec3& p, const Vec3& origin);

double box_point_distance(const Box& box, const Vec3& p);
inline double box_point_distance(const SceneObject& object, const Vec3& p) {
  return box_point_distance(object.box, p);
}

inline constexpr double kBelowFootprintMargin = 0.05;

/// True iff the candidate's top lies below the object position and the
/// object's x-y falls inside the candidate footprint grown by 5 cm.
bool is_below(const SceneObject& candidate, const Vec3& object_position);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace tpp
