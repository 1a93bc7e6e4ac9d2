#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "tpp/trajectory.hpp"
#include "tpp/world.hpp"

namespace tpp {

inline constexpr std::size_t kEdgeFeatures = 4;
inline constexpr std::size_t kRobotFeatures = 27;
inline constexpr std::size_t kObjectFeatures = 28;
inline constexpr std::size_t kObjectEnvFeatures = 20;
inline constexpr std::size_t kEnvFeatures = kRobotFeatures + kObjectFeatures + kObjectEnvFeatures;

inline constexpr std::size_t kRobotOffset = 0;
inline constexpr std::size_t kObjectOffset = kRobotOffset + kRobotFeatures;
inline constexpr std::size_t kObjectEnvOffset = kObjectOffset + kObjectFeatures;

inline constexpr std::size_t object_object_size(std::size_t attributes) {
  return kEdgeFeatures * attributes * attributes;
}
/// Offset of block w_pq: p indexes the environment object's attribute, q the
/// carried object's.
inline constexpr std::size_t object_object_block(std::size_t p, std::size_t q, std::size_t attributes) {
  return kEdgeFeatures * (p * attributes + q);
}

struct FeatureVector {
  Eigen::VectorXd phi_O;
  Eigen::VectorXd phi_E;

  /// [phi_O; phi_E]
  Eigen::VectorXd stacked() const;
  double norm() const { return std::sqrt(phi_O.squaredNorm() + phi_E.squaredNorm()); }
  bool operator==(const FeatureVector& other) const {
    return phi_O.size() == other.phi_O.size() && phi_E.size() == other.phi_E.size() &&
           phi_O == other.phi_O && phi_E == other.phi_E;
  }
};

struct FeatureOptions {
  /// Proximity threshold for interaction edges, meters.
  double tau = 0.10;
  /// Horizontal distances saturate here, meters.
  double horizontal_cap = 2.0;
};

struct InteractionEdge {
  std::size_t waypoint_index = 0;
  std::size_t object_index = 0;  // index into scene.objects
  std::string object_id;
  /// |gap| along x, y, z and the below indicator.
  Eigen::Vector4d base = Eigen::Vector4d::Zero();
};

std::vector<InteractionEdge> build_edges(const Scene& scene, const Trajectory& t, double tau);

/// Unscaled object-object block vector of length 4 M^2.
Eigen::VectorXd phi_object_object(const Scene& scene, const Trajectory& t, double tau);
Eigen::VectorXd phi_object_object(const Scene& scene, const std::vector<InteractionEdge>& edges);

/// Unscaled family blocks. All require N >= 3 and throw std::domain_error otherwise.
Eigen::VectorXd phi_robot(const Scene& scene, const Trajectory& t);
Eigen::VectorXd phi_object(const Scene& scene, const Trajectory& t);
Eigen::VectorXd phi_object_env(const Scene& scene, const Trajectory& t, const FeatureOptions& options = {});

/// Fixed per-index multipliers applied by extract(): distances / 2 m, angles
/// / pi, object-object sums / N (so they read as per-waypoint averages).
struct FeatureScale {
  Eigen::VectorXd object_object;
  Eigen::VectorXd environment;
};
FeatureScale feature_scale(std::size_t attributes, std::size_t waypoints);

/// phi_E = [robot | object | object-env], both blocks scaled by feature_scale().
FeatureVector extract(const Scene& scene, const Trajectory& t, const FeatureOptions& options = {});

/// Index -> {block, third, description} over [phi_O; phi_E].
nlohmann::json layout_manifest(const AttributeSet& attributes);

}  // namespace tpp
