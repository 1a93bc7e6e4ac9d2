#include "tpp/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tpp {

namespace {

void require_fields(const json& j, std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + " must be an object");
  std::set<std::string> known;
  for (const char* k : required) {
    known.insert(k);
    if (!j.contains(k)) throw FormatError(std::string(what) + " is missing \"" + k + "\"");
  }
  for (const char* k : optional) known.insert(k);
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw FormatError(std::string(what) + " has unknown field \"" + key + "\"");
  }
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ArmConfig config_from_json(const json& j) {
  if (!j.is_array() || j.size() != kJoints) throw FormatError("arm configuration must have 4 joints");
  return ArmConfig(number(j[0], "joint"), number(j[1], "joint"), number(j[2], "joint"), number(j[3], "joint"));
}

json config_to_json(const ArmConfig& c) { return json::array({c.q[0], c.q[1], c.q[2], c.q[3]}); }

}  // namespace

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return Vec3(number(j[0], "coordinate"), number(j[1], "coordinate"), number(j[2], "coordinate"));
}

json to_json(const Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    json attrs = json::array();
    for (std::size_t a = 0; a < o.attributes.size(); ++a)
      if (o.attributes[a]) attrs.push_back(scene.attributes.labels()[a]);
    objects.push_back({{"id", o.id},
                       {"center", to_json(o.box.center)},
                       {"half_extents", to_json(o.box.half_extents)},
                       {"attributes", attrs}});
  }
  json limits = json::array();
  for (const auto& l : scene.arm.joint_limits) limits.push_back(json::array({l.lo, l.hi}));
  return {{"attributes", scene.attributes.labels()},
          {"objects", objects},
          {"manipulated_id", scene.manipulated_id},
          {"table_height", scene.table_height},
          {"goal", to_json(scene.goal)},
          {"start_config", config_to_json(scene.start_config)},
          {"arm",
           {{"shoulder_origin", to_json(scene.arm.shoulder_origin)},
            {"link_upper", scene.arm.link_upper},
            {"link_fore", scene.arm.link_fore},
            {"joint_limits", limits}}}};
}

Scene scene_from_json(const json& j) {
  require_fields(j, {"attributes", "objects", "manipulated_id", "table_height", "goal", "start_config", "arm"}, {},
                 "scene");
  Scene s;
  try {
    if (!j["attributes"].is_array()) throw FormatError("attributes must be an array");
    s.attributes = AttributeSet(j["attributes"].get<std::vector<std::string>>());
    if (!j["objects"].is_array()) throw FormatError("objects must be an array");
    for (const auto& jo : j["objects"]) {
      require_fields(jo, {"id", "center", "half_extents", "attributes"}, {}, "object");
      SceneObject o;
      o.id = jo["id"].get<std::string>();
      o.box = Box{vec3_from_json(jo["center"]), vec3_from_json(jo["half_extents"])};
      o.attributes.assign(s.attributes.size(), 0);
      for (const auto& a : jo["attributes"]) o.attributes[s.attributes.index_of(a.get<std::string>())] = 1;
      s.objects.push_back(std::move(o));
    }
    s.manipulated_id = j["manipulated_id"].get<std::string>();
    s.table_height = number(j["table_height"], "table_height");
    s.goal = vec3_from_json(j["goal"]);
    s.start_config = config_from_json(j["start_config"]);
    const json& arm = j["arm"];
    require_fields(arm, {"shoulder_origin", "link_upper", "link_fore", "joint_limits"}, {}, "arm");
    s.arm.shoulder_origin = vec3_from_json(arm["shoulder_origin"]);
    s.arm.link_upper = number(arm["link_upper"], "link_upper");
    s.arm.link_fore = number(arm["link_fore"], "link_fore");
    const json& limits = arm["joint_limits"];
    if (!limits.is_array() || limits.size() != kJoints) throw FormatError("joint_limits must have 4 entries");
    for (std::size_t i = 0; i < kJoints; ++i) {
      if (!limits[i].is_array() || limits[i].size() != 2) throw FormatError("joint limit must be [lo, hi]");
      s.arm.joint_limits[i] = JointLimit{number(limits[i][0], "limit"), number(limits[i][1], "limit")};
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const Trajectory& t) {
  json w = json::array();
  for (const auto& c : t.waypoints) w.push_back(config_to_json(c));
  return {{"waypoints", w}};
}

Trajectory trajectory_from_json(const json& j) {
  require_fields(j, {"waypoints"}, {}, "trajectory");
  if (!j["waypoints"].is_array()) throw FormatError("waypoints must be an array");
  Trajectory t;
  for (const auto& c : j["waypoints"]) t.waypoints.push_back(config_from_json(c));
  return t;
}

json trajectory_payload(const Scene& scene, const Trajectory& t) {
  const ObjectTrack track = object_track(scene, t);
  json wrist = json::array();
  for (const auto& p : track.position) wrist.push_back(to_json(p));
  json out = to_json(t);
  out["wrist"] = wrist;
  out["deviation"] = track.deviation;
  return out;
}

json to_json(const FeatureVector& f) { return {{"phi_O", vector_to_json(f.phi_O)}, {"phi_E", vector_to_json(f.phi_E)}}; }

FeatureVector features_from_json(const json& j) {
  require_fields(j, {"phi_O", "phi_E"}, {}, "features");
  return FeatureVector{vector_from_json(j["phi_O"], "phi_O"), vector_from_json(j["phi_E"], "phi_E")};
}

json to_json(const WeightState& w) {
  return {{"t", w.t}, {"w_O", vector_to_json(w.w_O)}, {"w_E", vector_to_json(w.w_E)}, {"hash", weight_hash(w)}};
}

WeightState weights_from_json(const json& j) {
  require_fields(j, {"t", "w_O", "w_E"}, {"hash"}, "weights");
  WeightState w;
  if (!j["t"].is_number_unsigned() || j["t"].get<std::size_t>() < 1) throw FormatError("t must be a positive integer");
  w.t = j["t"].get<std::size_t>();
  w.w_O = vector_from_json(j["w_O"], "w_O");
  w.w_E = vector_from_json(j["w_E"], "w_E");
  if (static_cast<std::size_t>(w.w_E.size()) != kEnvFeatures) throw FormatError("w_E must have 75 entries");
  if (j.contains("hash") && j["hash"].get<std::string>() != weight_hash(w))
    throw FormatError("weight hash does not match contents");
  return w;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

}  // namespace tpp
