#pragma once

#include <string>

#include "json.hpp"

#include "tpp/features.hpp"
#include "tpp/learner.hpp"
#include "tpp/trajectory.hpp"
#include "tpp/world.hpp"

namespace tpp {

using json = nlohmann::json;

/// Thrown for malformed documents: missing or unknown fields, wrong types,
/// wrong lengths.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);

json to_json(const Scene& scene);
/// Strict: unknown fields anywhere are rejected. Runs Scene::validate().
Scene scene_from_json(const json& j);

/// {"waypoints":[[q1..q4],...]}
json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j);

/// Render payload: joints plus wrist positions and object deviation per waypoint.
json trajectory_payload(const Scene& scene, const Trajectory& t);

json to_json(const FeatureVector& f);
FeatureVector features_from_json(const json& j);

/// {"t", "w_O", "w_E", "hash"}; the hash is checked on load.
json to_json(const WeightState& w);
WeightState weights_from_json(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace tpp
