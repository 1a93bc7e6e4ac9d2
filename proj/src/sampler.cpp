#include "tpp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tpp/random.hpp"

namespace tpp {

void SamplerConfig::validate() const {
  if (n_candidates < 2) throw std::invalid_argument("n_candidates must be >= 2");
  if (!(goal_bias_lo > 0.0 && goal_bias_lo < goal_bias_hi && goal_bias_hi < 1.0))
    throw std::invalid_argument("goal bias range must satisfy 0 < lo < hi < 1");
  if (!(rrt_step > 0.0)) throw std::invalid_argument("rrt_step must be positive");
  if (max_rrt_nodes < 2) throw std::invalid_argument("max_rrt_nodes must be >= 2");
  if (!(blocking_radius > 0.0)) throw std::invalid_argument("blocking_radius must be positive");
}

CollisionChecker::CollisionChecker(const Scene& scene, std::span<const Box> extra_obstacles, double margin)
    : arm_(&scene.arm),
      carried_half_(scene.manipulated().box.half_extents + Vec3::Constant(margin)),
      floor_z_(scene.table_height) {
  for (const SceneObject* o : scene.obstacles()) obstacles_.push_back(o->box);
  obstacles_.insert(obstacles_.end(), extra_obstacles.begin(), extra_obstacles.end());
}

Box CollisionChecker::carried_box(const Vec3& wrist) const { return Box{wrist, carried_half_}; }

bool CollisionChecker::valid(const ArmConfig& cfg) const {
  if (!within_limits(*arm_, cfg)) return false;
  const Box carried = carried_box(forward_kinematics_unchecked(*arm_, cfg).wrist);
  if (carried.bottom() < floor_z_) return false;
  for (const auto& b : obstacles_) {
    if (boxes_overlap(carried, b)) return false;
  }
  return true;
}

bool CollisionChecker::edge_valid(const ArmConfig& a, const ArmConfig& b, double step) const {
  const double len = (b.q - a.q).norm();
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
  for (std::size_t i = 0; i <= pieces; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(pieces);
    if (!valid(ArmConfig(Eigen::Vector4d(a.q + f * (b.q - a.q))))) return false;
  }
  return true;
}

bool CollisionChecker::trajectory_valid(const Trajectory& t, double step) const {
  if (t.waypoints.empty()) return false;
  if (!valid(t.waypoints.front())) return false;
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!edge_valid(t.waypoints[j - 1], t.waypoints[j], step)) return false;
  }
  return true;
}

std::vector<ArmConfig> inverse_kinematics(const ArmModel& arm, const Vec3& target) {
  const Vec3 d = target - arm.shoulder_origin;
  const double r = std::hypot(d.x(), d.y());
  const double z = d.z();
  const double l1 = arm.link_upper, l2 = arm.link_fore;
  const double c3 = (r * r + z * z - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  std::vector<ArmConfig> out;
  if (c3 < -1.0 || c3 > 1.0) return out;
  const double q1 = r < 1e-12 ? 0.0 : std::atan2(d.y(), d.x());
  for (double sign : {1.0, -1.0}) {
    const double q3 = sign * std::acos(c3);
    const double q2 = std::atan2(z, r) - std::atan2(l2 * std::sin(q3), l1 + l2 * std::cos(q3));
    ArmConfig cfg(q1, q2, q3, -(q2 + q3));
    if (within_limits(arm, cfg)) out.push_back(cfg);
    if (c3 == 1.0 || c3 == -1.0) break;
  }
  return out;
}

namespace {

ArmConfig random_config(const ArmModel& arm, Rng& rng) {
  ArmConfig cfg;
  for (std::size_t i = 0; i < kJoints; ++i)
    cfg.q[static_cast<int>(i)] = uniform(rng, arm.joint_limits[i].lo, arm.joint_limits[i].hi);
  return cfg;
}

constexpr double kGoalWristJitter = std::numbers::pi / 4.0;

}  // namespace

std::optional<Trajectory> rrt_plan(const Scene& scene, std::span<const Box> extra_obstacles,
                                   double goal_bias, std::uint64_t seed, const RrtOptions& options) {
  const ArmModel& arm = scene.arm;
  const CollisionChecker planner(scene, extra_obstacles, options.planning_margin);
  const CollisionChecker exact(scene, extra_obstacles, 0.0);
  if (!planner.valid(scene.start_config)) return std::nullopt;

  const std::vector<ArmConfig> goals = inverse_kinematics(arm, scene.goal);
  Rng rng(seed);

  std::vector<ArmConfig> nodes{scene.start_config};
  std::vector<std::size_t> parent{0};
  const auto reached = [&](const ArmConfig& cfg) {
    return (forward_kinematics_unchecked(arm, cfg).wrist - scene.goal).norm() <= kGoalTolerance;
  };

  std::optional<std::size_t> goal_node;
  if (reached(scene.start_config)) goal_node = 0;

  const std::size_t max_draws = options.max_nodes * 20;
  for (std::size_t draw = 0; !goal_node && nodes.size() < options.max_nodes && draw < max_draws; ++draw) {
    ArmConfig target;
    if (!goals.empty() && uniform01(rng) < goal_bias) {
      target = goals[uniform_index(rng, goals.size())];
      const auto& lim = arm.joint_limits[3];
      target.q[3] = std::clamp(target.q[3] + uniform(rng, -kGoalWristJitter, kGoalWristJitter), lim.lo, lim.hi);
    } else {
      target = random_config(arm, rng);
    }

    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = (nodes[i].q - target.q).squaredNorm();
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    const double dist = std::sqrt(best);
    if (dist < 1e-12) continue;
    const ArmConfig next = dist <= options.step
                               ? target
                               : ArmConfig(Eigen::Vector4d(nodes[nearest].q +
                                                           (options.step / dist) * (target.q - nodes[nearest].q)));
    if (!planner.edge_valid(nodes[nearest], next, options.step)) continue;
    nodes.push_back(next);
    parent.push_back(nearest);
    if (reached(next)) goal_node = nodes.size() - 1;
  }
  if (!goal_node) return std::nullopt;

  Trajectory raw;
  for (std::size_t i = *goal_node;; i = parent[i]) {
    raw.waypoints.push_back(nodes[i]);
    if (i == 0) break;
  }
  std::reverse(raw.waypoints.begin(), raw.waypoints.end());
  if (raw.size() == 1) raw.waypoints.push_back(raw.waypoints.front());

  Trajectory out = resample(raw, options.waypoints);
  if (!exact.trajectory_valid(out, options.validation_step)) return std::nullopt;
  return out;
}

std::vector<Trajectory> sample_diverse(const Scene& scene, const SamplerConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  RrtOptions options;
  options.step = cfg.rrt_step;
  options.max_nodes = cfg.max_rrt_nodes;
  const CollisionChecker start_check(scene);
  const Box goal_box{scene.goal, scene.manipulated().box.half_extents};
  const Box start_box = start_check.carried_box(forward_kinematics_unchecked(scene.arm, scene.start_config).wrist);

  std::vector<Trajectory> accepted;
  const std::size_t max_attempts = 5 * cfg.n_candidates;
  for (std::size_t attempt = 0; attempt < max_attempts && accepted.size() < cfg.n_candidates; ++attempt) {
    const double bias = uniform(rng, cfg.goal_bias_lo, cfg.goal_bias_hi);
    std::vector<Box> extra;
    const double block_draw = uniform01(rng);
    if (cfg.blocking && !accepted.empty() && block_draw < 0.5) {
      const Trajectory& prior = accepted[uniform_index(rng, accepted.size())];
      const std::size_t interior = prior.size() > 2 ? prior.size() - 2 : 1;
      const std::size_t j = std::min<std::size_t>(1 + uniform_index(rng, interior), prior.size() - 1);
      const Vec3 at = forward_kinematics_unchecked(scene.arm, prior.waypoints[j]).wrist;
      const Box block{at, Vec3::Constant(cfg.blocking_radius)};
      if (!boxes_overlap(block, start_box) && !boxes_overlap(block, goal_box)) extra.push_back(block);
    }
    const std::uint64_t plan_seed = rng();
    auto plan = rrt_plan(scene, extra, bias, plan_seed, options);
    if (!plan) continue;
    const bool duplicate = std::any_of(accepted.begin(), accepted.end(), [&](const Trajectory& t) {
      return max_waypoint_distance(t, *plan) < 1e-6;
    });
    if (!duplicate) accepted.push_back(std::move(*plan));
  }
  if (accepted.size() < 2)
    throw SamplerError("sampler found " + std::to_string(accepted.size()) + " trajectories in " +
                       std::to_string(max_attempts) + " attempts");
  return accepted;
}

double mean_pairwise_distance(std::span<const Trajectory> set) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      const auto& ta = set[a];
      const auto& tb = set[b];
      const std::size_t n = std::min(ta.size(), tb.size());
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += (ta.waypoints[j].q - tb.waypoints[j].q).norm();
      total += n ? sum / static_cast<double>(n) : 0.0;
      ++pairs;
    }
  }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

}  // namespace tpp
