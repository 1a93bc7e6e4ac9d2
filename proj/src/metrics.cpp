#include "tpp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tpp {

double regret(std::span<const FeedbackRecord> records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.s_best - r.s_predicted;
  return sum / static_cast<double>(records.size());
}

double regret_bound(double feature_bound, double utility_norm, double alpha, std::span<const double> xi,
                    std::size_t T) {
  if (T == 0) throw std::domain_error("regret bound needs T >= 1");
  if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
  const double t = static_cast<double>(T);
  const double slack = std::accumulate(xi.begin(), xi.end(), 0.0);
  return 2.0 * feature_bound * utility_norm / (alpha * std::sqrt(t)) + slack / (alpha * t);
}

double feature_norm_bound(std::span<const FeatureVector> candidates) {
  double c = 0.0;
  for (const auto& f : candidates) c = std::max(c, f.norm());
  return c;
}

double feature_norm_bound(std::span<const std::vector<FeatureVector>> candidate_sets) {
  double c = 0.0;
  for (const auto& set : candidate_sets) c = std::max(c, feature_norm_bound(std::span<const FeatureVector>(set)));
  return c;
}

double ndcg_at_k(std::span<const int> labels, std::size_t k) {
  if (k < 1 || k > labels.size()) throw std::domain_error("nDCG needs 1 <= k <= list length");
  if (std::any_of(labels.begin(), labels.end(), [](int l) { return l <= 0; }))
    throw std::domain_error("nDCG labels must be positive");
  const auto dcg = [k](const std::vector<int>& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += static_cast<double>(l[i]) / std::log2(static_cast<double>(i) + 2.0);
    return s;
  };
  std::vector<int> ranked(labels.begin(), labels.end());
  std::vector<int> ideal = ranked;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  return dcg(ranked) / dcg(ideal);
}

std::vector<int> likert_labels(std::span<const double> u) {
  const std::size_t n = u.size();
  std::vector<double> sorted(u.begin(), u.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> labels;
  labels.reserve(n);
  for (double v : u) {
    const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
    labels.push_back(1 + static_cast<int>((5 * below) / n));
  }
  return labels;
}

std::vector<int> likert_labels(const HiddenUtility& h, std::span<const FeatureVector> candidates) {
  const auto u = h.utilities(candidates);
  return likert_labels(u);
}

}  // namespace tpp
