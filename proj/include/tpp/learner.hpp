#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tpp/features.hpp"

namespace tpp {

/// Perceptron parameters (w_O, w_E) and the iteration counter. The counter
/// starts at 1, so t - 1 updates have been applied.
struct WeightState {
  Eigen::VectorXd w_O;
  Eigen::VectorXd w_E;
  std::size_t t = 1;

  static WeightState zero(std::size_t object_object_dims, std::size_t env_dims = kEnvFeatures);
  static WeightState zero_like(const FeatureVector& layout);

  bool operator==(const WeightState& other) const {
    return t == other.t && w_O.size() == other.w_O.size() && w_E.size() == other.w_E.size() &&
           w_O == other.w_O && w_E == other.w_E;
  }
};

/// w_O . phi_O + w_E . phi_E. Throws std::domain_error on layout mismatch.
double score(const WeightState& w, const FeatureVector& f);

/// Candidate indices in descending score order; ties keep insertion order.
/// Throws std::domain_error when empty.
std::vector<std::size_t> rank(const WeightState& w, std::span<const FeatureVector> candidates);

/// w <- w + phi(feedback) - phi(predicted); t <- t + 1.
WeightState tpp_update(const WeightState& w, const FeatureVector& predicted, const FeatureVector& feedback);

/// FNV-1a over t and the raw weight bytes, as 16 hex digits.
std::string weight_hash(const WeightState& w);

}  // namespace tpp
