#include "tpp/trajectory.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tpp {

Trajectory resample(const Trajectory& t, std::size_t n) {
  if (n < 2) throw std::domain_error("resample needs at least 2 waypoints");
  if (t.waypoints.empty()) throw std::domain_error("cannot resample an empty trajectory");
  const std::size_t src = t.size();
  Trajectory out;
  out.waypoints.reserve(n);
  if (src == 1) {
    out.waypoints.assign(n, t.waypoints.front());
    return out;
  }
  const std::size_t span = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == span) {
      out.waypoints.push_back(t.waypoints.back());
      continue;
    }
    // Integer position keeps exact hits exact (identity and idempotence).
    const std::size_t num = i * (src - 1);
    const std::size_t seg = num / span;
    const std::size_t rem = num % span;
    if (rem == 0) {
      out.waypoints.push_back(t.waypoints[seg]);
      continue;
    }
    const double f = static_cast<double>(rem) / static_cast<double>(span);
    const auto& a = t.waypoints[seg].q;
    const auto& b = t.waypoints[seg + 1].q;
    out.waypoints.emplace_back(Eigen::Vector4d(a + f * (b - a)));
  }
  return out;
}

std::array<IndexRange, 3> thirds(std::size_t n) {
  if (n < 3) throw std::domain_error("thirds needs at least 3 waypoints");
  const std::size_t first = (n + 2) / 3;
  const std::size_t rest = n - first;
  const std::size_t second = (rest + 1) / 2;
  return {IndexRange{0, first}, IndexRange{first, first + second}, IndexRange{first + second, n}};
}

double deviation_angle(const ArmConfig& cfg) {
  return std::min(std::abs(wrap_angle(cfg.q[1] + cfg.q[2] + cfg.q[3])), std::numbers::pi);
}

ObjectTrack object_track(const Scene& scene, const Trajectory& t) {
  ObjectTrack track;
  track.position.reserve(t.size());
  track.deviation.reserve(t.size());
  track.poses.reserve(t.size());
  for (const auto& cfg : t.waypoints) {
    ArmPose pose = forward_kinematics(scene.arm, cfg);
    track.position.push_back(pose.wrist);
    track.deviation.push_back(deviation_angle(cfg));
    track.poses.push_back(pose);
  }
  return track;
}

double max_waypoint_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, (a.waypoints[j].q - b.waypoints[j].q).norm());
  }
  return worst;
}

void write_trajectory_csv(std::ostream& os, const Scene& scene, const Trajectory& t) {
  const ObjectTrack track = object_track(scene, t);
  os << "j,q1,q2,q3,q4,wrist_x,wrist_y,wrist_z,deviation\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const auto& q = t.waypoints[j].q;
    const auto& p = track.position[j];
    os << j << ',' << q[0] << ',' << q[1] << ',' << q[2] << ',' << q[3] << ',' << p.x() << ','
       << p.y() << ',' << p.z() << ',' << track.deviation[j] << '\n';
  }
}

}  // namespace tpp
