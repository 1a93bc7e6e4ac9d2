#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tpp/trajectory.hpp"
#include "tpp/world.hpp"

namespace tpp {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerConfig {
  std::size_t n_candidates = 50;
  double rrt_step = 0.1;
  double goal_bias_lo = 0.1;
  double goal_bias_hi = 0.6;
  std::size_t max_rrt_nodes = 3000;
  double blocking_radius = 0.08;
  std::uint64_t rng_seed = 0;
  /// Disables the blocking-obstacle diversity device (comparison runs only).
  bool blocking = true;

  void validate() const;
};

inline constexpr double kGoalTolerance = 0.05;

/// Collision model: the carried object's box, centred at the wrist, against
/// every obstacle box and the table plane. Joint limits are part of validity.
class CollisionChecker {
 public:
  CollisionChecker(const Scene& scene, std::span<const Box> extra_obstacles = {}, double margin = 0.0);

  Box carried_box(const Vec3& wrist) const;
  bool valid(const ArmConfig& cfg) const;
  /// Checks interpolated configurations spaced at most `step` apart, ends included.
  bool edge_valid(const ArmConfig& a, const ArmConfig& b, double step) const;
  bool trajectory_valid(const Trajectory& t, double step) const;

 private:
  const ArmModel* arm_;
  Vec3 carried_half_;
  double floor_z_;
  std::vector<Box> obstacles_;
};

/// Closed-form wrist placements at `target` (elbow up / elbow down) with the
/// wrist pitch set to keep the object upright; entries violating joint
/// limits are dropped.
std::vector<ArmConfig> inverse_kinematics(const ArmModel& arm, const Vec3& target);

struct RrtOptions {
  double step = 0.1;
  std::size_t max_nodes = 3000;
  std::size_t waypoints = kCanonicalWaypoints;
  /// Extra clearance used while growing the tree; the returned trajectory is
  /// re-validated without it.
  double planning_margin = 0.005;
  /// Joint-space resolution of the final exact check of the resampled path.
  double validation_step = 0.025;
};

/// Joint-space RRT from scene.start_config to any configuration whose wrist
/// is within 5 cm of scene.goal. Returns nullopt when the node budget runs out.
std::optional<Trajectory> rrt_plan(const Scene& scene, std::span<const Box> extra_obstacles,
                                   double goal_bias, std::uint64_t seed,
                                   const RrtOptions& options = {});

/// Throws SamplerError when fewer than two trajectories are found within
/// 5 * n_candidates planner calls.
std::vector<Trajectory> sample_diverse(const Scene& scene, const SamplerConfig& cfg);

/// Mean over pairs of the average per-waypoint joint-space distance.
double mean_pairwise_distance(std::span<const Trajectory> set);

}  // namespace tpp
