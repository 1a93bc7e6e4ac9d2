#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "tpp/world.hpp"

namespace tpp {

/// Waypoints with implicit uniform timestamps t_j = j / (N - 1).
struct Trajectory {
  std::vector<ArmConfig> waypoints;

  std::size_t size() const { return waypoints.size(); }
  bool operator==(const Trajectory&) const = default;
};

inline constexpr std::size_t kCanonicalWaypoints = 30;

/// Half-open waypoint index range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Piecewise-linear joint-space resampling to n uniformly spaced waypoints.
/// Endpoints are preserved exactly. Throws std::domain_error for n < 2 or an
/// empty input.
Trajectory resample(const Trajectory& t, std::size_t n);

/// Splits N waypoints into three contiguous parts of sizes ceil(N/3),
/// ceil((N - ceil(N/3)) / 2) and the remainder.
std::array<IndexRange, 3> thirds(std::size_t n);
inline std::array<IndexRange, 3> thirds(const Trajectory& t) { return thirds(t.size()); }

struct ObjectTrack {
  std::vector<Vec3> position;
  /// Angle of the object's up axis from world vertical, in [0, pi].
  std::vector<double> deviation;
  std::vector<ArmPose> poses;
};

ObjectTrack object_track(const Scene& scene, const Trajectory& t);

/// |wrap(q2 + q3 + q4)|
double deviation_angle(const ArmConfig& cfg);

/// Largest per-waypoint joint-space distance; infinity when sizes differ.
double max_waypoint_distance(const Trajectory& a, const Trajectory& b);

/// Columns j,q1..q4,wrist_x,wrist_y,wrist_z,deviation.
void write_trajectory_csv(std::ostream& os, const Scene& scene, const Trajectory& t);

}  // namespace tpp
