#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tpp/features.hpp"
#include "tpp/learner.hpp"
#include "tpp/trajectory.hpp"

namespace tpp {

/// One stored demonstration: candidate-minus-feedback feature rows restricted
/// to the columns that are non-zero in at least one row, with the L2 margins.
struct MmpExample {
  std::vector<Eigen::Index> columns;
  Eigen::MatrixXd diff;
  Eigen::VectorXd margin;
};

struct MmpState {
  std::vector<MmpExample> examples;
  WeightState weights;
  double lambda = 0.1;
  std::size_t passes = 200;
  std::uint64_t seed = 0;
  /// Objective of the returned iterate after each pass of the last training call.
  std::vector<double> objective_trace;

  static MmpState create(std::size_t object_object_dims, double lambda, std::size_t passes = 200,
                         std::uint64_t seed = 0, std::size_t env_dims = kEnvFeatures);
};

/// Appends (feedback, candidates) to the training set, then retrains from
/// w = 0 with `passes` epochs of averaged stochastic subgradient descent on
///   lambda/2 ||w||^2 + 1/|T| sum_i max_y' [ ||phi(ybar) - phi(y')|| + w.phi(y') - w.phi(ybar) ]_+
/// The averaged iterate with the lowest objective seen so far is kept.
MmpState mmp_observe_and_train(MmpState state, const FeatureVector& feedback,
                               std::span<const FeatureVector> candidates);

double mmp_objective(const MmpState& state, const WeightState& w);

/// Task-independent plan: one RRT call with goal bias 0.3 and seed 0.
/// Throws SamplerError when the planner fails.
Trajectory geometric_plan(const Scene& scene);

/// Shortest joint-space path first; ties keep insertion order.
std::vector<std::size_t> geometric_rank(std::span<const Trajectory> candidates);

/// Hand-coded preference: reward clearance above supporting surfaces and an
/// upright object, nothing else.
WeightState manual_weights(std::size_t attributes);
std::vector<std::size_t> manual_rank(std::span<const FeatureVector> candidates);

}  // namespace tpp
