#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpp/features.hpp"
#include "tpp/trajectory.hpp"

namespace tpp {

/// The simulated user's utility s*(x, y) = w* . phi(x, y). The weights are
/// sealed: callers can evaluate the utility but never read w*.
class HiddenUtility {
 public:
  /// Coordinates uniform in [-1, 1], then scaled to unit norm.
  static HiddenUtility random(std::size_t object_object_dims, std::size_t env_dims, std::uint64_t seed);
  static HiddenUtility from_weights(Eigen::VectorXd w_O, Eigen::VectorXd w_E);

  double operator()(const FeatureVector& f) const;
  std::vector<double> utilities(std::span<const FeatureVector> candidates) const;
  double norm() const { return norm_; }

 private:
  HiddenUtility(Eigen::VectorXd w_O, Eigen::VectorXd w_E);
  Eigen::VectorXd w_O_;
  Eigen::VectorXd w_E_;
  double norm_ = 0.0;
};

enum class Mechanism { ReplaceTop, OneFromK, ApproxArgmax, WaypointCorrection };

std::string to_string(Mechanism m);
/// Accepts replace-top, one-from-k (alias one-from-5), approx-argmax, waypoint.
Mechanism parse_mechanism(const std::string& name);

struct FeedbackRecord {
  std::size_t t = 0;
  std::string mechanism;
  double s_predicted = 0.0;  // s*(y_t)
  double s_feedback = 0.0;   // s*(ybar_t)
  double s_best = 0.0;       // s*(y*_t), best in the candidate set
  double alpha = 1.0;        // realized informativeness
  double xi = 0.0;           // slack against the target alpha
};

/// Fills alpha and xi from the three utilities. Throws std::domain_error
/// unless 0 < target_alpha <= 1.
FeedbackRecord account(FeedbackRecord record, double target_alpha);

/// Oracle answer on a ranked candidate list: the position (0-based rank) of
/// the improved trajectory and its accounting record.
struct Feedback {
  std::size_t position = 0;
  FeedbackRecord record;
};

/// All utilities are given in ranked order, position 0 being the prediction.
Feedback feedback_replace_top(std::span<const double> ranked_utility, double target_alpha);
Feedback feedback_one_from_k(std::span<const double> ranked_utility, std::size_t k, double target_alpha);
Feedback feedback_approx_argmax(std::span<const double> ranked_utility, std::uint64_t seed, double target_alpha,
                                std::size_t draws = 5);

Feedback feedback_replace_top(const HiddenUtility& h, std::span<const FeatureVector> ranked, double target_alpha);
Feedback feedback_one_from_k(const HiddenUtility& h, std::span<const FeatureVector> ranked, std::size_t k,
                             double target_alpha);
Feedback feedback_approx_argmax(const HiddenUtility& h, std::span<const FeatureVector> ranked, std::uint64_t seed,
                                double target_alpha);

/// With probability epsilon the user clicks uniformly among the top k
/// instead of answering as the base mechanism did. May worsen feedback.
struct NoisyClick {
  double epsilon = 0.0;
  std::size_t k = 5;
};
Feedback apply_noisy_click(const Feedback& base, std::span<const double> ranked_utility, const NoisyClick& noise,
                           std::uint64_t seed, double target_alpha);

struct WaypointFeedback {
  Trajectory trajectory;
  FeatureVector features;
  FeedbackRecord record;
  /// Set when a perturbation was applied.
  std::optional<std::size_t> waypoint;
  std::size_t joint = 0;
  double delta = 0.0;
};

/// Tries +-delta on every joint of every interior waypoint and keeps the
/// collision-free change with the largest utility gain. `best_in_set` is
/// s*(y*_t) for accounting.
WaypointFeedback feedback_waypoint_correction(const HiddenUtility& h, const Scene& scene, const Trajectory& predicted,
                                              const FeatureVector& predicted_features, double best_in_set,
                                              double target_alpha, const FeatureOptions& options = {},
                                              double delta = 0.1, double collision_step = 0.1);

}  // namespace tpp
