#include "tpp/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tpp/spectral.hpp"

namespace tpp {

Eigen::VectorXd FeatureVector::stacked() const {
  Eigen::VectorXd out(phi_O.size() + phi_E.size());
  out << phi_O, phi_E;
  return out;
}

std::vector<InteractionEdge> build_edges(const Scene& scene, const Trajectory& t, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("edge threshold must be positive");
  const SceneObject& carried = scene.manipulated();
  std::vector<InteractionEdge> edges;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Vec3 wrist = forward_kinematics(scene.arm, t.waypoints[j]).wrist;
    const Box held{wrist, carried.box.half_extents};
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      const SceneObject& o = scene.objects[k];
      if (o.id == scene.manipulated_id) continue;
      const Vec3 gap = axis_separation(held, o.box);
      const bool below = is_below(o, wrist);
      if (gap.norm() < tau || below) {
        InteractionEdge e;
        e.waypoint_index = j;
        e.object_index = k;
        e.object_id = o.id;
        e.base << gap.x(), gap.y(), gap.z(), below ? 1.0 : 0.0;
        edges.push_back(std::move(e));
      }
    }
  }
  return edges;
}

Eigen::VectorXd phi_object_object(const Scene& scene, const std::vector<InteractionEdge>& edges) {
  const std::size_t m = scene.attributes.size();
  const SceneObject& carried = scene.manipulated();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(object_object_size(m)));
  for (const auto& e : edges) {
    const SceneObject& o = scene.objects.at(e.object_index);
    for (std::size_t p = 0; p < m; ++p) {
      if (!o.has(p)) continue;
      for (std::size_t q = 0; q < m; ++q) {
        if (!carried.has(q)) continue;
        phi.segment<4>(static_cast<Eigen::Index>(object_object_block(p, q, m))) += e.base;
      }
    }
  }
  return phi;
}

Eigen::VectorXd phi_object_object(const Scene& scene, const Trajectory& t, double tau) {
  return phi_object_object(scene, build_edges(scene, t, tau));
}

namespace {

void require_three(const Trajectory& t) {
  if (t.size() < 3) throw std::domain_error("trajectory features need at least 3 waypoints");
}

std::vector<double> slice(const std::vector<double>& v, IndexRange r) {
  return {v.begin() + static_cast<std::ptrdiff_t>(r.begin), v.begin() + static_cast<std::ptrdiff_t>(r.end)};
}

/// Vertical gap under the carried box and horizontal clearance to boxes that
/// share its height band, per waypoint.
struct Clearance {
  std::vector<double> vertical;
  std::vector<double> horizontal;
};

Clearance clearances(const Scene& scene, const ObjectTrack& track, double cap) {
  const Vec3 half = scene.manipulated().box.half_extents;
  const auto obstacles = scene.obstacles();
  Clearance c;
  c.vertical.reserve(track.position.size());
  c.horizontal.reserve(track.position.size());
  for (const Vec3& p : track.position) {
    const Box held{p, half};
    const double bottom = held.bottom();
    double support = scene.table_height;
    double horizontal = cap;
    for (const SceneObject* o : obstacles) {
      const Box& b = o->box;
      const bool over = std::abs(p.x() - b.center.x()) <= b.half_extents.x() &&
                        std::abs(p.y() - b.center.y()) <= b.half_extents.y();
      if (over && b.top() <= bottom) support = std::max(support, b.top());
      const double band = std::min(held.top(), b.top()) - std::max(bottom, b.bottom());
      if (band > 0.0) {
        const Vec3 gap = axis_separation(held, b);
        horizontal = std::min(horizontal, std::hypot(gap.x(), gap.y()));
      }
    }
    c.vertical.push_back(std::clamp(bottom - support, 0.0, cap));
    c.horizontal.push_back(horizontal);
  }
  return c;
}

}  // namespace

Eigen::VectorXd phi_robot(const Scene& scene, const Trajectory& t) {
  require_three(t);
  const ObjectTrack track = object_track(scene, t);
  const Vec3& origin = scene.arm.shoulder_origin;
  std::vector<Cylindrical> wrist, elbow;
  for (const auto& pose : track.poses) {
    wrist.push_back(cylindrical(pose.wrist, origin));
    elbow.push_back(cylindrical(pose.elbow, origin));
  }
  const auto coord = [](const Cylindrical& c, int axis) { return axis == 0 ? c.r : axis == 1 ? c.theta : c.z; };

  Eigen::VectorXd phi(kRobotFeatures);
  const auto parts = thirds(t);
  for (std::size_t part = 0; part < 3; ++part) {
    const IndexRange r = parts[part];
    const auto base = static_cast<Eigen::Index>(9 * part);
    for (int axis = 0; axis < 3; ++axis) {
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      std::size_t wrist_argmax = r.begin;
      double wrist_best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = r.begin; j < r.end; ++j) {
        const double w = coord(wrist[j], axis);
        const double e = coord(elbow[j], axis);
        hi = std::max({hi, w, e});
        lo = std::min({lo, w, e});
        if (w > wrist_best) {
          wrist_best = w;
          wrist_argmax = j;
        }
      }
      phi[base + axis] = hi;
      phi[base + 3 + axis] = lo;
      phi[base + 6 + axis] = coord(elbow[wrist_argmax], axis);
    }
  }
  return phi;
}

Eigen::VectorXd phi_object(const Scene& scene, const Trajectory& t) {
  require_three(t);
  const ObjectTrack track = object_track(scene, t);
  const std::size_t n = t.size();
  const double final_dev = track.deviation.back();
  std::vector<double> rel(n), xs(n), ys(n), zs(n);
  for (std::size_t j = 0; j < n; ++j) {
    rel[j] = std::abs(track.deviation[j] - final_dev);
    xs[j] = track.position[j].x();
    ys[j] = track.position[j].y();
    zs[j] = track.position[j].z();
  }

  Eigen::VectorXd phi(kObjectFeatures);
  const auto parts = thirds(t);
  for (std::size_t part = 0; part < 3; ++part) {
    const IndexRange r = parts[part];
    const auto base = static_cast<Eigen::Index>(9 * part);
    double worst = 0.0;
    for (std::size_t j = r.begin; j < r.end; ++j) worst = std::max(worst, rel[j]);
    phi[base] = std::cos(worst);
    const std::vector<double>* signals[] = {&xs, &ys, &zs, &track.deviation};
    for (int s = 0; s < 4; ++s) {
      const BandPower bp = band_power(slice(*signals[s], r));
      phi[base + 1 + 2 * s] = bp.low;
      phi[base + 2 + 2 * s] = bp.high;
    }
  }
  phi[27] = *std::max_element(rel.begin(), rel.end());
  return phi;
}

Eigen::VectorXd phi_object_env(const Scene& scene, const Trajectory& t, const FeatureOptions& options) {
  require_three(t);
  const ObjectTrack track = object_track(scene, t);
  const Clearance c = clearances(scene, track, options.horizontal_cap);
  const std::size_t n = t.size();

  Eigen::VectorXd phi(kObjectEnvFeatures);
  const auto parts = thirds(t);
  for (std::size_t part = 0; part < 3; ++part) {
    const IndexRange r = parts[part];
    const auto base = static_cast<Eigen::Index>(4 * part);
    double gap = std::numeric_limits<double>::infinity(), side = gap, table = gap, goal = gap;
    for (std::size_t j = r.begin; j < r.end; ++j) {
      gap = std::min(gap, c.vertical[j]);
      side = std::min(side, c.horizontal[j]);
      table = std::min(table, track.position[j].z() - scene.table_height);
      goal = std::min(goal, (track.position[j] - scene.goal).norm());
    }
    phi[base] = gap;
    phi[base + 1] = side;
    phi[base + 2] = table;
    phi[base + 3] = goal;
  }
  double gap_sum = 0.0, side_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    gap_sum += c.vertical[j];
    side_sum += c.horizontal[j];
  }
  phi[12] = gap_sum / static_cast<double>(n);
  phi[13] = side_sum / static_cast<double>(n);
  for (std::size_t part = 0; part < 3; ++part) {
    const BandPower bp = band_power(slice(c.vertical, parts[part]));
    phi[static_cast<Eigen::Index>(14 + 2 * part)] = bp.low;
    phi[static_cast<Eigen::Index>(15 + 2 * part)] = bp.high;
  }
  return phi;
}

FeatureScale feature_scale(std::size_t attributes, std::size_t waypoints) {
  constexpr double metres = 1.0 / 2.0;
  constexpr double radians = 1.0 / std::numbers::pi;
  FeatureScale s;
  s.object_object = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(object_object_size(attributes)),
                                              1.0 / static_cast<double>(std::max<std::size_t>(waypoints, 1)));
  for (Eigen::Index i = 0; i < s.object_object.size(); i += 4) s.object_object.segment<3>(i) *= metres;

  s.environment = Eigen::VectorXd::Ones(kEnvFeatures);
  for (Eigen::Index part = 0; part < 3; ++part) {
    const Eigen::Index b = static_cast<Eigen::Index>(kRobotOffset) + 9 * part;
    // r, theta, z for max, min and elbow-at-wrist-max.
    for (Eigen::Index k = 0; k < 3; ++k) {
      s.environment[b + 3 * k] = metres;
      s.environment[b + 3 * k + 1] = radians;
      s.environment[b + 3 * k + 2] = metres;
    }
  }
  s.environment[static_cast<Eigen::Index>(kObjectOffset + 27)] = radians;
  for (Eigen::Index i = 0; i < 14; ++i) s.environment[static_cast<Eigen::Index>(kObjectEnvOffset) + i] = metres;
  return s;
}

FeatureVector extract(const Scene& scene, const Trajectory& t, const FeatureOptions& options) {
  const FeatureScale scale = feature_scale(scene.attributes.size(), t.size());
  FeatureVector f;
  f.phi_O = phi_object_object(scene, t, options.tau).cwiseProduct(scale.object_object);
  f.phi_E.resize(kEnvFeatures);
  f.phi_E << phi_robot(scene, t), phi_object(scene, t), phi_object_env(scene, t, options);
  f.phi_E = f.phi_E.cwiseProduct(scale.environment);
  return f;
}

nlohmann::json layout_manifest(const AttributeSet& attributes) {
  using nlohmann::json;
  const auto& labels = attributes.labels();
  const std::size_t m = labels.size();
  json entries = json::array();
  std::size_t index = 0;
  const char* axes[] = {"dx", "dy", "dz", "below"};
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      for (int k = 0; k < 4; ++k) {
        entries.push_back({{"index", index++},
                           {"block", "object_object"},
                           {"third", nullptr},
                           {"description", labels[p] + "->" + labels[q] + " " + axes[k]}});
      }
    }
  }
  const auto push = [&](const char* block, json third, std::string description) {
    entries.push_back({{"index", index++}, {"block", block}, {"third", std::move(third)}, {"description", std::move(description)}});
  };
  const char* coords[] = {"r", "theta", "z"};
  for (int part = 0; part < 3; ++part) {
    for (int c = 0; c < 3; ++c) push("robot", part, std::string("max ") + coords[c] + " of wrist and elbow");
    for (int c = 0; c < 3; ++c) push("robot", part, std::string("min ") + coords[c] + " of wrist and elbow");
    for (int c = 0; c < 3; ++c) push("robot", part, std::string("elbow ") + coords[c] + " at wrist max " + coords[c]);
  }
  const char* signals[] = {"x", "y", "z", "deviation"};
  for (int part = 0; part < 3; ++part) {
    push("object", part, "cos of max deviation from final orientation");
    for (const char* s : signals) {
      push("object", part, std::string("low-band power of ") + s);
      push("object", part, std::string("high-band power of ") + s);
    }
  }
  push("object", nullptr, "max deviation from final orientation");
  for (int part = 0; part < 3; ++part) {
    push("object_env", part, "min vertical gap to supporting surface");
    push("object_env", part, "min horizontal distance to surrounding boxes");
    push("object_env", part, "min height above table");
    push("object_env", part, "min distance to goal");
  }
  push("object_env", nullptr, "mean vertical gap");
  push("object_env", nullptr, "mean horizontal distance");
  for (int part = 0; part < 3; ++part) {
    push("object_env", part, "low-band power of vertical gap");
    push("object_env", part, "high-band power of vertical gap");
  }
  return entries;
}

}  // namespace tpp
