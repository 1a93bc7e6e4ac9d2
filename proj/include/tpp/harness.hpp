#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tpp/baselines.hpp"
#include "tpp/features.hpp"
#include "tpp/learner.hpp"
#include "tpp/oracle.hpp"
#include "tpp/sampler.hpp"
#include "tpp/scenario.hpp"

namespace tpp {

enum class Algorithm { Tpp, Mmp, Geometric, Manual, SupervisedReference };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

enum class GeneralizationMode { Same, NewObject, NewEnvironment, NewBoth };
std::string to_string(GeneralizationMode m);
GeneralizationMode parse_mode(const std::string& name);
/// Generator pools used for the held-out tasks of a mode.
ScenarioVariant held_out_variant(GeneralizationMode m);

struct ExperimentConfig {
  /// Task i uses families[i % size].
  std::vector<Family> families{Family::ManipulationCentric};
  std::size_t tasks = 10;
  std::size_t iterations = 200;
  std::size_t candidates = 50;
  Mechanism feedback = Mechanism::OneFromK;
  /// Shown list length for one-from-k; 0 means the whole candidate set.
  std::size_t k = 5;
  double alpha = 1.0;
  /// Noisy-click probability and list length; epsilon 0 disables it.
  double noise = 0.0;
  std::size_t noise_k = 5;
  std::uint64_t seed = 0;
  Algorithm algo = Algorithm::Tpp;
  GeneralizationMode mode = GeneralizationMode::Same;
  std::size_t attributes = 6;

  std::size_t pretrain_iterations = 100;
  std::size_t test_iterations = 20;
  std::size_t test_tasks = 10;

  std::vector<double> mmp_lambdas{0.01, 0.1, 1.0, 10.0};
  std::size_t mmp_passes = 200;

  std::size_t supervised_tasks = 20;
  std::size_t supervised_passes = 50;

  FeatureOptions features;
  SamplerConfig sampler;

  /// Throws std::invalid_argument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
  /// key=value lines, one per field; parse(to_text()) round-trips.
  std::string to_text() const;
  std::map<std::string, std::string> to_map() const;

  /// '#' starts a comment; blank lines are ignored.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  AttributeSet attribute_set() const;
  std::size_t shown_k() const { return k == 0 ? candidates : k; }
};

/// One context x_t: a scene and its sampled candidate set.
struct Task {
  std::size_t index = 0;  // scene index within its stream
  Family family = Family::ManipulationCentric;
  ScenarioVariant variant;
  std::uint64_t scene_seed = 0;
  std::uint64_t candidate_seed = 0;
  Scene scene;
  std::vector<Trajectory> trajectories;
  std::vector<FeatureVector> features;
};

Task build_task(const ExperimentConfig& cfg, std::size_t index, Family family, ScenarioVariant variant,
                std::uint64_t scene_seed, std::uint64_t candidate_seed);

/// Named seed streams so that independent parts of an experiment never share
/// random numbers.
enum class Stream : std::uint64_t { Train = 1, Test = 2, Supervised = 3 };

/// Lazily built, cached task sequence. Iteration t (1-based) visits scene
/// (t - 1) % scenes with a fresh candidate seed, so runs that share a stream
/// see identical contexts.
class TaskStream {
 public:
  TaskStream(const ExperimentConfig& cfg, Stream stream, std::size_t scenes, ScenarioVariant variant = {},
             std::uint64_t salt = 0);
  const Task& at(std::size_t t);
  /// Builds iterations 1..T so that later at() calls are read-only and may
  /// run concurrently.
  void prefetch(std::size_t T);
  std::size_t scenes() const { return scenes_; }

 private:
  ExperimentConfig cfg_;
  Stream stream_;
  std::size_t scenes_;
  ScenarioVariant variant_;
  std::uint64_t salt_;
  std::map<std::size_t, Task> cache_;
};

/// The simulated user of an experiment seed.
HiddenUtility user_for(const ExperimentConfig& cfg);

class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::vector<std::size_t> rank(const Task& task) const = 0;
  virtual void observe(const Task& task, const FeatureVector& predicted, const FeatureVector& feedback) = 0;
  virtual const WeightState& weights() const = 0;
  /// True when weights change only through tpp_update.
  virtual bool perceptron() const { return false; }
};

std::unique_ptr<Ranker> make_tpp(WeightState initial);
std::unique_ptr<Ranker> make_mmp(std::size_t attributes, double lambda, std::size_t passes, std::uint64_t seed);
std::unique_ptr<Ranker> make_fixed(WeightState weights);
std::unique_ptr<Ranker> make_geometric(std::size_t attributes);

/// Pairwise ranking hinge fit: for every pair with label_i > label_j,
/// max(0, 1 - w . (phi_i - phi_j)), averaged subgradient with step 1/sqrt(k).
WeightState fit_pairwise(const std::vector<std::vector<FeatureVector>>& sets,
                         const std::vector<std::vector<double>>& labels, std::size_t passes, std::uint64_t seed);

/// Fits on Likert labels of supervised_tasks training tasks drawn from the
/// supervised stream; the result is used frozen.
WeightState supervised_reference(const ExperimentConfig& cfg, const HiddenUtility& user);

struct MetricsRow {
  std::size_t t = 0;
  double regret = 0.0;
  double bound = 0.0;
  double ndcg1 = 0.0;
  double ndcg3 = 0.0;
  double alpha = 0.0;
  double xi = 0.0;
};

/// What a metrics row is computed from; all of it is stored in the event log.
struct IterationTrace {
  FeedbackRecord record;
  std::vector<int> ranked_labels;
  double feature_norm_max = 0.0;
};

/// Prefix regret, bound with the running feature-norm maximum, nDCG@1/@3 of
/// the presented ranking.
std::vector<MetricsRow> compute_metrics(const std::vector<IterationTrace>& trace, double target_alpha,
                                        double utility_norm);
std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct SessionResult {
  std::vector<IterationTrace> trace;
  std::vector<MetricsRow> metrics;
  WeightState weights;
  double utility_norm = 0.0;
  std::optional<double> mmp_lambda;

  double final_regret() const { return metrics.empty() ? 0.0 : metrics.back().regret; }
};

/// Algorithm 1 outer loop with the configured learner and oracle. Writes one
/// JSON line per event to `log` when given. MMP with several lambdas runs
/// the whole grid and keeps the run with the lowest final regret.
SessionResult run_session(const ExperimentConfig& cfg, TaskStream& stream, std::ostream* log = nullptr);
SessionResult run_session(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Same loop for an explicit ranker; used by run_session and the
/// generalization study.
SessionResult run_with_ranker(const ExperimentConfig& cfg, TaskStream& stream, Ranker& ranker,
                              const HiddenUtility& user, std::size_t iterations, std::ostream* log,
                              std::optional<double> mmp_lambda = std::nullopt);

struct ReplayReport {
  std::size_t iterations = 0;
  /// Weight snapshots re-derived from logged feature vectors; zero for MMP.
  std::size_t hashes_checked = 0;
  bool telescoping_exact = false;
  std::string metrics;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

/// Rebuilds every weight snapshot and the metrics CSV from a session log
/// without planning. With `rerun`, the session is executed again from the
/// logged config and the two logs must match byte for byte.
ReplayReport replay(const std::string& log_text, bool rerun = false);

struct GeneralizationRow {
  GeneralizationMode mode = GeneralizationMode::Same;
  std::size_t t = 0;
  double pretrained_ndcg1 = 0.0;
  double pretrained_ndcg3 = 0.0;
  double untrained_ndcg1 = 0.0;
  double untrained_ndcg3 = 0.0;
};

struct GeneralizationResult {
  std::vector<GeneralizationRow> rows;
  /// t = 0 rows: nDCG of the initial weights averaged over every held-out task.
  std::map<GeneralizationMode, GeneralizationRow> first;
};

/// Pre-trains TPP for pretrain_iterations on the training distribution, then
/// runs test_iterations on held-out tasks of each mode twice: continuing from
/// the pre-trained weights and from zero.
GeneralizationResult run_generalization(const ExperimentConfig& cfg, const std::vector<GeneralizationMode>& modes);
std::string generalization_csv(const GeneralizationResult& r);

/// Runs fn(0..n-1) on up to `workers` threads (hardware concurrency when 0).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers = 0);

}  // namespace tpp
