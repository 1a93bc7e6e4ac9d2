#include "tpp/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tpp/random.hpp"
#include "tpp/sampler.hpp"

namespace tpp {

HiddenUtility::HiddenUtility(Eigen::VectorXd w_O, Eigen::VectorXd w_E)
    : w_O_(std::move(w_O)), w_E_(std::move(w_E)), norm_(std::sqrt(w_O_.squaredNorm() + w_E_.squaredNorm())) {}

HiddenUtility HiddenUtility::random(std::size_t object_object_dims, std::size_t env_dims, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd w_O(static_cast<Eigen::Index>(object_object_dims));
  Eigen::VectorXd w_E(static_cast<Eigen::Index>(env_dims));
  for (auto& v : w_O) v = uniform(rng, -1.0, 1.0);
  for (auto& v : w_E) v = uniform(rng, -1.0, 1.0);
  const double n = std::sqrt(w_O.squaredNorm() + w_E.squaredNorm());
  if (n > 0.0) {
    w_O /= n;
    w_E /= n;
  }
  return HiddenUtility(std::move(w_O), std::move(w_E));
}

HiddenUtility HiddenUtility::from_weights(Eigen::VectorXd w_O, Eigen::VectorXd w_E) {
  return HiddenUtility(std::move(w_O), std::move(w_E));
}

double HiddenUtility::operator()(const FeatureVector& f) const {
  if (f.phi_O.size() != w_O_.size() || f.phi_E.size() != w_E_.size())
    throw std::domain_error("feature layout does not match hidden utility");
  return w_O_.dot(f.phi_O) + w_E_.dot(f.phi_E);
}

std::vector<double> HiddenUtility::utilities(std::span<const FeatureVector> candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& f : candidates) out.push_back((*this)(f));
  return out;
}

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::ReplaceTop: return "replace-top";
    case Mechanism::OneFromK: return "one-from-k";
    case Mechanism::ApproxArgmax: return "approx-argmax";
    case Mechanism::WaypointCorrection: return "waypoint";
  }
  return "unknown";
}

Mechanism parse_mechanism(const std::string& name) {
  if (name == "replace-top") return Mechanism::ReplaceTop;
  if (name == "one-from-k" || name == "one-from-5" || name == "one-from-n") return Mechanism::OneFromK;
  if (name == "approx-argmax") return Mechanism::ApproxArgmax;
  if (name == "waypoint") return Mechanism::WaypointCorrection;
  throw std::invalid_argument("unknown feedback mechanism: " + name);
}

FeedbackRecord account(FeedbackRecord r, double target_alpha) {
  if (!(target_alpha > 0.0 && target_alpha <= 1.0)) throw std::domain_error("target alpha must lie in (0, 1]");
  const double gap = r.s_best - r.s_predicted;
  const double gain = r.s_feedback - r.s_predicted;
  r.alpha = gap > 1e-12 ? gain / gap : 1.0;
  r.xi = std::max(0.0, target_alpha * gap - gain);
  return r;
}

namespace {

Feedback make(std::span<const double> u, std::size_t position, Mechanism m, double target_alpha) {
  if (u.empty()) throw std::domain_error("feedback needs at least one candidate");
  Feedback fb;
  fb.position = position;
  fb.record.mechanism = to_string(m);
  fb.record.s_predicted = u[0];
  fb.record.s_feedback = u[position];
  fb.record.s_best = *std::max_element(u.begin(), u.end());
  fb.record = account(fb.record, target_alpha);
  return fb;
}

}  // namespace

Feedback feedback_replace_top(std::span<const double> u, double target_alpha) {
  if (u.empty()) throw std::domain_error("feedback needs at least one candidate");
  std::size_t chosen = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i] > u[0]) {
      chosen = i;
      break;
    }
  }
  return make(u, chosen, Mechanism::ReplaceTop, target_alpha);
}

Feedback feedback_one_from_k(std::span<const double> u, std::size_t k, double target_alpha) {
  if (u.empty()) throw std::domain_error("feedback needs at least one candidate");
  const std::size_t shown = std::clamp<std::size_t>(k, 1, u.size());
  std::size_t chosen = 0;
  for (std::size_t i = 1; i < shown; ++i) {
    if (u[i] > u[chosen]) chosen = i;
  }
  return make(u, chosen, Mechanism::OneFromK, target_alpha);
}

Feedback feedback_approx_argmax(std::span<const double> u, std::uint64_t seed, double target_alpha, std::size_t draws) {
  if (u.empty()) throw std::domain_error("feedback needs at least one candidate");
  Rng rng(seed);
  std::vector<std::size_t> pool(u.size());
  std::iota(pool.begin(), pool.end(), 0);
  const std::size_t m = std::min(draws, pool.size());
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    if (u[pool[i]] > u[chosen]) chosen = pool[i];
  }
  return make(u, chosen, Mechanism::ApproxArgmax, target_alpha);
}

Feedback feedback_replace_top(const HiddenUtility& h, std::span<const FeatureVector> ranked, double target_alpha) {
  const auto u = h.utilities(ranked);
  return feedback_replace_top(u, target_alpha);
}

Feedback feedback_one_from_k(const HiddenUtility& h, std::span<const FeatureVector> ranked, std::size_t k,
                             double target_alpha) {
  const auto u = h.utilities(ranked);
  return feedback_one_from_k(u, k, target_alpha);
}

Feedback feedback_approx_argmax(const HiddenUtility& h, std::span<const FeatureVector> ranked, std::uint64_t seed,
                                double target_alpha) {
  const auto u = h.utilities(ranked);
  return feedback_approx_argmax(u, seed, target_alpha);
}

Feedback apply_noisy_click(const Feedback& base, std::span<const double> u, const NoisyClick& noise,
                           std::uint64_t seed, double target_alpha) {
  Rng rng(seed);
  const double coin = uniform01(rng);
  const std::size_t shown = std::clamp<std::size_t>(noise.k, 1, u.size());
  const std::size_t pick = uniform_index(rng, shown);
  if (!(coin < noise.epsilon)) return base;
  Feedback fb = base;
  fb.position = pick;
  fb.record.s_feedback = u[pick];
  fb.record.mechanism = base.record.mechanism + "+noisy";
  fb.record = account(fb.record, target_alpha);
  return fb;
}

WaypointFeedback feedback_waypoint_correction(const HiddenUtility& h, const Scene& scene, const Trajectory& predicted,
                                              const FeatureVector& predicted_features, double best_in_set,
                                              double target_alpha, const FeatureOptions& options, double delta,
                                              double collision_step) {
  const CollisionChecker checker(scene);
  const double base = h(predicted_features);
  WaypointFeedback out;
  out.trajectory = predicted;
  out.features = predicted_features;
  double best = base;

  for (std::size_t j = 1; j + 1 < predicted.size(); ++j) {
    for (std::size_t joint = 0; joint < kJoints; ++joint) {
      for (double sign : {1.0, -1.0}) {
        Trajectory trial = predicted;
        trial.waypoints[j].q[static_cast<int>(joint)] += sign * delta;
        if (!checker.valid(trial.waypoints[j])) continue;
        if (!checker.edge_valid(trial.waypoints[j - 1], trial.waypoints[j], collision_step) ||
            !checker.edge_valid(trial.waypoints[j], trial.waypoints[j + 1], collision_step))
          continue;
        FeatureVector f = extract(scene, trial, options);
        const double s = h(f);
        if (s > best) {
          best = s;
          out.trajectory = std::move(trial);
          out.features = std::move(f);
          out.waypoint = j;
          out.joint = joint;
          out.delta = sign * delta;
        }
      }
    }
  }

  FeedbackRecord r;
  r.mechanism = to_string(Mechanism::WaypointCorrection);
  r.s_predicted = base;
  r.s_feedback = best;
  r.s_best = std::max(best_in_set, base);
  out.record = account(r, target_alpha);
  return out;
}

}  // namespace tpp
