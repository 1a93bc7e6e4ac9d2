#pragma once

#include <span>
#include <vector>

#include "tpp/features.hpp"
#include "tpp/oracle.hpp"

namespace tpp {

/// (1/T) sum_t (s*(y*_t) - s*(y_t)).
double regret(std::span<const FeedbackRecord> records);

/// 2 C ||w*|| / (alpha sqrt(T)) + (1 / (alpha T)) sum_t xi_t.
/// Holds for strictly alpha-informative feedback, and in expectation when
/// the xi are expected slacks.
double regret_bound(double feature_bound, double utility_norm, double alpha, std::span<const double> xi,
                    std::size_t T);

/// max ||[phi_O; phi_E]||_2 over every candidate of every set.
double feature_norm_bound(std::span<const std::vector<FeatureVector>> candidate_sets);
double feature_norm_bound(std::span<const FeatureVector> candidates);

/// DCG@k / IDCG@k for Likert labels listed in ranked order.
/// Requires 1 <= k <= size and positive labels; throws std::domain_error.
double ndcg_at_k(std::span<const int> ranked_labels, std::size_t k);

/// Quintile grades 1..5 of the utilities, top quintile = 5. A grade counts
/// only strictly smaller utilities, so ties take the lower grade.
std::vector<int> likert_labels(std::span<const double> utilities);
std::vector<int> likert_labels(const HiddenUtility& h, std::span<const FeatureVector> candidates);

}  // namespace tpp
