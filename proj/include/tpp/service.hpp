#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpp/features.hpp"
#include "tpp/io.hpp"
#include "tpp/learner.hpp"
#include "tpp/sampler.hpp"

namespace tpp {

/// Request-level failure; `status` is the HTTP code the server answers with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

struct IkResult {
  ArmConfig config;
  double residual = 0.0;
};

/// Coordinate descent on the four joints, starting at `seed`, minimizing the
/// wrist-to-target distance. Each sweep tries +-step per joint inside the
/// limits and halves the step of a joint that did not improve.
IkResult coordinate_descent_ik(const ArmModel& arm, const ArmConfig& seed, const Vec3& target,
                               std::size_t iterations = 200, double initial_step = 0.2);

struct ServiceOptions {
  std::size_t candidates = 50;
  std::size_t k = 5;
  SamplerConfig sampler;
  FeatureOptions features;
  double ik_tolerance = 0.02;
  std::size_t ik_iterations = 200;
  double collision_step = 0.1;
};

/// Server-held coactive sessions. Each session serializes its mutations
/// behind its own lock; different sessions never contend.
class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});
  ~SessionManager();

  /// Body: {"scene": {...}} or {"family": name, "seed": n}; optional
  /// "candidate_seed" and "k". Returns the first presentation.
  json create(const json& request);
  json get_state(const std::string& id) const;
  /// Body: {"rank": r} with 1 <= r <= k.
  json rerank(const std::string& id, const json& request);
  /// Body: {"index": j, "target": [x, y, z]}; edits the top-ranked trajectory.
  json edit(const std::string& id, const json& request);
  /// Events with seq >= since; blocks up to `wait` when there are none yet.
  json events(const std::string& id, std::size_t since, std::chrono::milliseconds wait) const;

  std::vector<std::string> ids() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  /// Applies one update and moves the session to the next candidate set; the
  /// session is left untouched if sampling fails.
  static json commit(Session& s, const FeatureVector& predicted, const FeatureVector& feedback, json summary,
                     const ServiceOptions& options);

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

/// HTTP front end: POST /sessions, GET /sessions/{id},
/// POST /sessions/{id}/rerank, POST /sessions/{id}/edit,
/// GET /sessions/{id}/events?since=&wait_ms=.
class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port;
  /// the bound port is returned.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tpp
