#include "tpp/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tpp/random.hpp"
#include "tpp/sampler.hpp"

namespace tpp {

MmpState MmpState::create(std::size_t object_object_dims, double lambda, std::size_t passes, std::uint64_t seed,
                          std::size_t env_dims) {
  if (!(lambda > 0.0)) throw std::invalid_argument("MMP regularization must be positive");
  MmpState s;
  s.weights = WeightState::zero(object_object_dims, env_dims);
  s.lambda = lambda;
  s.passes = passes;
  s.seed = seed;
  return s;
}

namespace {

Eigen::VectorXd stack(const WeightState& w) {
  Eigen::VectorXd v(w.w_O.size() + w.w_E.size());
  v << w.w_O, w.w_E;
  return v;
}

MmpExample make_example(const FeatureVector& feedback, std::span<const FeatureVector> candidates) {
  const Eigen::VectorXd target = feedback.stacked();
  const auto d = target.size();
  Eigen::MatrixXd full(static_cast<Eigen::Index>(candidates.size()), d);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].phi_O.size() != feedback.phi_O.size() || candidates[i].phi_E.size() != feedback.phi_E.size())
      throw std::domain_error("candidate layout does not match feedback layout");
    full.row(static_cast<Eigen::Index>(i)) = (candidates[i].stacked() - target).transpose();
  }
  MmpExample ex;
  for (Eigen::Index c = 0; c < d; ++c) {
    if ((full.col(c).array() != 0.0).any()) ex.columns.push_back(c);
  }
  ex.diff.resize(full.rows(), static_cast<Eigen::Index>(ex.columns.size()));
  for (std::size_t c = 0; c < ex.columns.size(); ++c) ex.diff.col(static_cast<Eigen::Index>(c)) = full.col(ex.columns[c]);
  ex.margin = full.rowwise().norm();
  return ex;
}

Eigen::VectorXd gather(const Eigen::VectorXd& w, const std::vector<Eigen::Index>& cols) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out[static_cast<Eigen::Index>(c)] = w[cols[c]];
  return out;
}

/// Loss-augmented violation max(0, max_y' margin + w . diff) and the row attaining it.
std::pair<double, Eigen::Index> violation(const MmpExample& ex, const Eigen::VectorXd& w) {
  if (ex.diff.rows() == 0) return {0.0, -1};
  if (ex.columns.empty()) {
    Eigen::Index j = 0;
    const double v = ex.margin.maxCoeff(&j);
    return {std::max(0.0, v), v > 0.0 ? j : -1};
  }
  const Eigen::VectorXd v = ex.diff * gather(w, ex.columns) + ex.margin;
  Eigen::Index j = 0;
  const double best = v.maxCoeff(&j);
  return {std::max(0.0, best), best > 0.0 ? j : -1};
}

double objective(const std::vector<MmpExample>& examples, double lambda, const Eigen::VectorXd& w) {
  double loss = 0.0;
  for (const auto& ex : examples) loss += violation(ex, w).first;
  const double n = examples.empty() ? 1.0 : static_cast<double>(examples.size());
  return 0.5 * lambda * w.squaredNorm() + loss / n;
}

WeightState unstack(const Eigen::VectorXd& v, const WeightState& layout) {
  WeightState w;
  w.w_O = v.head(layout.w_O.size());
  w.w_E = v.tail(layout.w_E.size());
  w.t = layout.t;
  return w;
}

}  // namespace

double mmp_objective(const MmpState& state, const WeightState& w) {
  return objective(state.examples, state.lambda, stack(w));
}

MmpState mmp_observe_and_train(MmpState state, const FeatureVector& feedback,
                               std::span<const FeatureVector> candidates) {
  if (feedback.phi_O.size() != state.weights.w_O.size() || feedback.phi_E.size() != state.weights.w_E.size())
    throw std::domain_error("feedback layout does not match MMP weights");
  state.examples.push_back(make_example(feedback, candidates));

  const Eigen::Index d = state.weights.w_O.size() + state.weights.w_E.size();
  const double lambda = state.lambda;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd best_w = Eigen::VectorXd::Zero(d);
  double best_obj = objective(state.examples, lambda, best_w);
  std::vector<std::size_t> order(state.examples.size());
  std::iota(order.begin(), order.end(), 0);
  state.objective_trace.clear();
  std::size_t k = 0;

  for (std::size_t pass = 0; pass < state.passes; ++pass) {
    Rng rng(derive_seed(state.seed, pass, state.examples.size()));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t idx : order) {
      ++k;
      const double eta = 1.0 / (lambda * static_cast<double>(k));
      const MmpExample& ex = state.examples[idx];
      const auto [loss, row] = violation(ex, w);
      w *= 1.0 - eta * lambda;
      if (row >= 0 && loss > 0.0) {
        for (std::size_t c = 0; c < ex.columns.size(); ++c)
          w[ex.columns[c]] -= eta * ex.diff(row, static_cast<Eigen::Index>(c));
      }
      sum += w;
    }
    const Eigen::VectorXd avg = sum / static_cast<double>(k);
    const double obj = objective(state.examples, lambda, avg);
    if (obj <= best_obj) {
      best_obj = obj;
      best_w = avg;
    }
    state.objective_trace.push_back(best_obj);
  }

  const std::size_t t = state.weights.t + 1;
  state.weights = unstack(best_w, state.weights);
  state.weights.t = t;
  return state;
}

Trajectory geometric_plan(const Scene& scene) {
  auto plan = rrt_plan(scene, {}, 0.3, 0);
  if (!plan) throw SamplerError("geometric planner found no path");
  return *plan;
}

std::vector<std::size_t> geometric_rank(std::span<const Trajectory> candidates) {
  if (candidates.empty()) throw std::domain_error("cannot rank an empty candidate set");
  std::vector<double> length;
  for (const auto& t : candidates) {
    double l = 0.0;
    for (std::size_t j = 1; j < t.size(); ++j) l += (t.waypoints[j].q - t.waypoints[j - 1].q).norm();
    length.push_back(l);
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return length[a] < length[b]; });
  return order;
}

WeightState manual_weights(std::size_t attributes) {
  WeightState w = WeightState::zero(object_object_size(attributes));
  for (Eigen::Index part = 0; part < 3; ++part) {
    w.w_E[static_cast<Eigen::Index>(kObjectEnvOffset) + 4 * part] = 1.0;  // vertical gap minimum
    w.w_E[static_cast<Eigen::Index>(kObjectOffset) + 9 * part] = 1.0;     // cos of deviation
  }
  w.w_E[static_cast<Eigen::Index>(kObjectOffset) + 27] = -1.0;  // whole-trajectory deviation
  return w;
}

std::vector<std::size_t> manual_rank(std::span<const FeatureVector> candidates) {
  if (candidates.empty()) throw std::domain_error("cannot rank an empty candidate set");
  const auto attributes = static_cast<std::size_t>(std::lround(std::sqrt(
      static_cast<double>(candidates.front().phi_O.size()) / static_cast<double>(kEdgeFeatures))));
  return rank(manual_weights(attributes), candidates);
}

}  // namespace tpp
