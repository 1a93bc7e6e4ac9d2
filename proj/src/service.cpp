#include "tpp/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <thread>

#include "httplib.h"

#include "tpp/random.hpp"
#include "tpp/scenario.hpp"

namespace tpp {

IkResult coordinate_descent_ik(const ArmModel& arm, const ArmConfig& seed, const Vec3& target, std::size_t iterations,
                               double initial_step) {
  ArmConfig q = seed;
  for (std::size_t j = 0; j < kJoints; ++j)
    q.q[j] = std::clamp(q.q[j], arm.joint_limits[j].lo, arm.joint_limits[j].hi);
  const auto error = [&](const ArmConfig& c) { return (forward_kinematics_unchecked(arm, c).wrist - target).norm(); };
  double best = error(q);
  std::array<double, kJoints> step;
  step.fill(initial_step);
  for (std::size_t it = 0; it < iterations && best > 0.0; ++it) {
    for (std::size_t j = 0; j < kJoints; ++j) {
      bool improved = false;
      for (double dir : {1.0, -1.0}) {
        ArmConfig trial = q;
        trial.q[j] = std::clamp(q.q[j] + dir * step[j], arm.joint_limits[j].lo, arm.joint_limits[j].hi);
        const double e = error(trial);
        if (e < best) {
          best = e;
          q = trial;
          improved = true;
          break;
        }
      }
      if (!improved) step[j] *= 0.5;
    }
  }
  return {q, best};
}

struct SessionManager::Session {
  std::string id;
  Scene scene;
  WeightState w;
  std::uint64_t candidate_seed = 0;
  std::size_t k = 5;
  std::vector<Trajectory> trajectories;
  std::vector<FeatureVector> features;
  json history = json::array();
  std::vector<json> events;
  mutable std::shared_mutex mutex;
  mutable std::condition_variable_any changed;
};

namespace {

struct CandidateSet {
  std::vector<Trajectory> trajectories;
  std::vector<FeatureVector> features;
};

CandidateSet sample(const Scene& scene, const ServiceOptions& options, std::uint64_t seed, std::size_t t) {
  SamplerConfig sc = options.sampler;
  sc.n_candidates = options.candidates;
  sc.rng_seed = derive_seed(seed, t);
  CandidateSet out;
  try {
    out.trajectories = sample_diverse(scene, sc);
  } catch (const SamplerError& e) {
    throw ServiceError(422, std::string("scene is infeasible: ") + e.what());
  }
  for (const auto& tr : out.trajectories) out.features.push_back(extract(scene, tr, options.features));
  return out;
}

const json& field(const json& request, const char* name) {
  if (!request.is_object() || !request.contains(name))
    throw ServiceError(400, std::string("request is missing \"") + name + "\"");
  return request[name];
}

void only_fields(const json& request, std::initializer_list<const char*> allowed) {
  if (!request.is_object()) throw ServiceError(400, "request body must be a JSON object");
  for (const auto& [key, _] : request.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ServiceError(400, "unknown request field \"" + key + "\"");
  }
}

}  // namespace

SessionManager::SessionManager(ServiceOptions options) : options_(std::move(options)) {}
SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "no session " + id);
  return it->second;
}

std::vector<std::string> SessionManager::ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

namespace {

/// Top-k of a fresh ranking of the stored candidates.
json presentation(const Scene& scene, const WeightState& w, const std::vector<Trajectory>& trajectories,
                  const std::vector<FeatureVector>& features, std::size_t k) {
  const auto order = rank(w, features);
  json top = json::array();
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    top.push_back({{"rank", i + 1},
                   {"candidate", order[i]},
                   {"score", score(w, features[order[i]])},
                   {"trajectory", trajectory_payload(scene, trajectories[order[i]])}});
  }
  return top;
}

}  // namespace

json SessionManager::create(const json& request) {
  only_fields(request, {"scene", "family", "seed", "candidate_seed", "k"});
  auto s = std::make_shared<Session>();
  try {
    if (request.contains("scene")) {
      if (request.contains("family")) throw ServiceError(400, "give either a scene or a family, not both");
      s->scene = scene_from_json(request["scene"]);
    } else {
      const Family family = parse_family(field(request, "family").get<std::string>());
      const std::uint64_t seed = request.value("seed", std::uint64_t{0});
      s->scene = generate_scenario(family, seed);
    }
    s->candidate_seed = request.value("candidate_seed", std::uint64_t{0});
    s->k = request.value("k", options_.k);
  } catch (const ServiceError&) {
    throw;
  } catch (const std::exception& e) {
    throw ServiceError(400, e.what());
  }
  if (s->k < 1) throw ServiceError(400, "k must be at least 1");
  s->w = WeightState::zero(object_object_size(s->scene.attributes.size()));
  CandidateSet c = sample(s->scene, options_, s->candidate_seed, s->w.t);
  s->trajectories = std::move(c.trajectories);
  s->features = std::move(c.features);

  {
    std::unique_lock lock(sessions_mutex_);
    s->id = "s" + std::to_string(next_id_++);
    sessions_[s->id] = s;
  }
  s->events.push_back({{"seq", 0}, {"type", "created"}, {"t", s->w.t}, {"weights_hash", weight_hash(s->w)}});
  return {{"id", s->id},
          {"t", s->w.t},
          {"k", s->k},
          {"scene", to_json(s->scene)},
          {"top", presentation(s->scene, s->w, s->trajectories, s->features, s->k)},
          {"weights_hash", weight_hash(s->w)}};
}

json SessionManager::get_state(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->mutex);
  return {{"id", s->id},
          {"t", s->w.t},
          {"k", s->k},
          {"scene", to_json(s->scene)},
          {"weights", to_json(s->w)},
          {"history", s->history},
          {"layout", layout_manifest(s->scene.attributes)},
          {"top", presentation(s->scene, s->w, s->trajectories, s->features, s->k)}};
}

json SessionManager::rerank(const std::string& id, const json& request) {
  only_fields(request, {"rank"});
  const json& r = field(request, "rank");
  if (!r.is_number_integer()) throw ServiceError(400, "rank must be an integer");
  auto s = find(id);
  std::unique_lock lock(s->mutex);
  const auto order = rank(s->w, s->features);
  const long shown = static_cast<long>(std::min(s->k, order.size()));
  const long clicked = r.get<long>();
  if (clicked < 1 || clicked > shown)
    throw ServiceError(422, "rank must lie in 1.." + std::to_string(shown));
  json summary = {{"kind", "rerank"}, {"rank", clicked}};
  json out = commit(*s, s->features[order[0]], s->features[order[static_cast<std::size_t>(clicked - 1)]],
                    std::move(summary), options_);
  lock.unlock();
  s->changed.notify_all();
  return out;
}

json SessionManager::edit(const std::string& id, const json& request) {
  only_fields(request, {"index", "target"});
  const json& idx = field(request, "index");
  if (!idx.is_number_integer()) throw ServiceError(400, "index must be an integer");
  Vec3 target;
  try {
    target = vec3_from_json(field(request, "target"));
  } catch (const FormatError& e) {
    throw ServiceError(400, e.what());
  }
  auto s = find(id);
  std::unique_lock lock(s->mutex);
  const auto order = rank(s->w, s->features);
  const Trajectory& predicted = s->trajectories[order[0]];
  const long j = idx.get<long>();
  if (j < 1 || j + 1 >= static_cast<long>(predicted.size()))
    throw ServiceError(422, "index must name an interior waypoint (1.." + std::to_string(predicted.size() - 2) + ")");
  const auto wp = static_cast<std::size_t>(j);

  const IkResult ik = coordinate_descent_ik(s->scene.arm, predicted.waypoints[wp], target, options_.ik_iterations);
  if (!(ik.residual < options_.ik_tolerance))
    throw ServiceError(422, "target is out of reach (residual " + std::to_string(ik.residual) + " m)");
  const CollisionChecker checker(s->scene);
  if (!checker.valid(ik.config) || !checker.edge_valid(predicted.waypoints[wp - 1], ik.config, options_.collision_step) ||
      !checker.edge_valid(ik.config, predicted.waypoints[wp + 1], options_.collision_step))
    throw ServiceError(422, "edited waypoint collides");

  Trajectory improved = predicted;
  improved.waypoints[wp] = ik.config;
  const FeatureVector fb = extract(s->scene, improved, options_.features);
  json summary = {{"kind", "edit"}, {"index", j}, {"target", to_json(target)}, {"residual", ik.residual}};
  json out = commit(*s, s->features[order[0]], fb, std::move(summary), options_);
  lock.unlock();
  s->changed.notify_all();
  return out;
}

json SessionManager::commit(Session& s, const FeatureVector& predicted, const FeatureVector& feedback, json summary,
                           const ServiceOptions& options) {
  const WeightState next = tpp_update(s.w, predicted, feedback);
  CandidateSet c = sample(s.scene, options, s.candidate_seed, next.t);
  const double delta = std::sqrt((feedback.phi_O - predicted.phi_O).squaredNorm() +
                                 (feedback.phi_E - predicted.phi_E).squaredNorm());
  summary["t"] = s.w.t;
  summary["delta_norm"] = delta;
  summary["weights_hash"] = weight_hash(next);

  s.w = next;
  s.trajectories = std::move(c.trajectories);
  s.features = std::move(c.features);
  s.history.push_back(summary);
  json event = summary;
  event["seq"] = s.events.size();
  event["type"] = summary["kind"];
  event.erase("kind");
  s.events.push_back(event);
  return {{"update", summary},
          {"t", s.w.t},
          {"top", presentation(s.scene, s.w, s.trajectories, s.features, s.k)},
          {"weights_hash", weight_hash(s.w)}};
}

json SessionManager::events(const std::string& id, std::size_t since, std::chrono::milliseconds wait) const {
  auto s = find(id);
  std::shared_lock lock(s->mutex);
  if (s->events.size() <= since && wait.count() > 0)
    s->changed.wait_for(lock, wait, [&] { return s->events.size() > since; });
  json list = json::array();
  for (std::size_t i = since; i < s->events.size(); ++i) list.push_back(s->events[i]);
  return {{"id", s->id}, {"events", list}, {"next", s->events.size()}};
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpService::Impl {
  explicit Impl(SessionManager& m) : manager(m) {}
  SessionManager& manager;
  httplib::Server server;
  std::thread thread;
};

namespace {

constexpr long kMaxWaitMs = 30000;

template <typename Fn>
void respond(httplib::Response& res, Fn&& fn, int ok = 200) {
  try {
    res.set_content(fn().dump(), "application/json");
    res.status = ok;
  } catch (const ServiceError& e) {
    res.status = e.status;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const json::exception& e) {
    res.status = 400;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const std::invalid_argument& e) {
    res.status = 400;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  }
}

json body(const httplib::Request& req) { return req.body.empty() ? json::object() : json::parse(req.body); }

std::size_t query_number(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t pos = 0;
  const unsigned long long n = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(std::string("bad query parameter ") + name);
  return static_cast<std::size_t>(n);
}

}  // namespace

HttpService::HttpService(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {
  auto& m = impl_->manager;
  auto& srv = impl_->server;
  srv.Post("/sessions", [&m](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return m.create(body(req)); }, 201);
  });
  srv.Get(R"(/sessions/([^/]+))", [&m](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return m.get_state(req.matches[1]); });
  });
  srv.Post(R"(/sessions/([^/]+)/rerank)", [&m](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return m.rerank(req.matches[1], body(req)); });
  });
  srv.Post(R"(/sessions/([^/]+)/edit)", [&m](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return m.edit(req.matches[1], body(req)); });
  });
  srv.Get(R"(/sessions/([^/]+)/events)", [&m](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] {
      const std::size_t since = query_number(req, "since", 0);
      const long wait = static_cast<long>(std::min<std::size_t>(query_number(req, "wait_ms", 0), kMaxWaitMs));
      return m.events(req.matches[1], since, std::chrono::milliseconds(wait));
    });
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpService::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tpp
