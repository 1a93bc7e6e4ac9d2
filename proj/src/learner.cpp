#include "tpp/learner.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace tpp {

WeightState WeightState::zero(std::size_t object_object_dims, std::size_t env_dims) {
  WeightState w;
  w.w_O = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(object_object_dims));
  w.w_E = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(env_dims));
  return w;
}

WeightState WeightState::zero_like(const FeatureVector& layout) {
  return zero(static_cast<std::size_t>(layout.phi_O.size()), static_cast<std::size_t>(layout.phi_E.size()));
}

namespace {
void check_layout(const WeightState& w, const FeatureVector& f) {
  if (w.w_O.size() != f.phi_O.size() || w.w_E.size() != f.phi_E.size())
    throw std::domain_error("feature layout does not match weight layout");
}
}  // namespace

double score(const WeightState& w, const FeatureVector& f) {
  check_layout(w, f);
  return w.w_O.dot(f.phi_O) + w.w_E.dot(f.phi_E);
}

std::vector<std::size_t> rank(const WeightState& w, std::span<const FeatureVector> candidates) {
  if (candidates.empty()) throw std::domain_error("cannot rank an empty candidate set");
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& f : candidates) scores.push_back(score(w, f));
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

WeightState tpp_update(const WeightState& w, const FeatureVector& predicted, const FeatureVector& feedback) {
  check_layout(w, predicted);
  check_layout(w, feedback);
  WeightState next;
  next.w_O = w.w_O + (feedback.phi_O - predicted.phi_O);
  next.w_E = w.w_E + (feedback.phi_E - predicted.phi_E);
  next.t = w.t + 1;
  return next;
}

std::string weight_hash(const WeightState& w) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(w.t));
  mix(static_cast<std::uint64_t>(w.w_O.size()));
  for (double v : w.w_O) mix(std::bit_cast<std::uint64_t>(v));
  mix(static_cast<std::uint64_t>(w.w_E.size()));
  for (double v : w.w_E) mix(std::bit_cast<std::uint64_t>(v));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tpp
