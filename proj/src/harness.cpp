#include "tpp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tpp/io.hpp"
#include "tpp/metrics.hpp"
#include "tpp/random.hpp"

namespace tpp {

namespace {

// Seed stream tags.
constexpr std::uint64_t kUserTag = 0x05e4;
constexpr std::uint64_t kSceneTag = 0x5ce7e;
constexpr std::uint64_t kCandidateTag = 0xca7d;
constexpr std::uint64_t kFeedbackTag = 0xfeed;
constexpr std::uint64_t kNoiseTag = 0x4015e;
constexpr std::uint64_t kMmpTag = 0x3390;
constexpr std::uint64_t kFitTag = 0xf17;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
    throw std::invalid_argument("config " + key + ": not a number: " + v);
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw std::invalid_argument("config " + key + ": not a non-negative integer: " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config " + key + ": not a boolean: " + v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Tpp: return "tpp";
    case Algorithm::Mmp: return "mmp";
    case Algorithm::Geometric: return "geometric";
    case Algorithm::Manual: return "manual";
    case Algorithm::SupervisedReference: return "supervised-reference";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "tpp") return Algorithm::Tpp;
  if (name == "mmp" || name == "mmp-online") return Algorithm::Mmp;
  if (name == "geometric") return Algorithm::Geometric;
  if (name == "manual") return Algorithm::Manual;
  if (name == "supervised-reference" || name == "supervised") return Algorithm::SupervisedReference;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(GeneralizationMode m) {
  switch (m) {
    case GeneralizationMode::Same: return "same";
    case GeneralizationMode::NewObject: return "new-object";
    case GeneralizationMode::NewEnvironment: return "new-environment";
    case GeneralizationMode::NewBoth: return "new-both";
  }
  return "unknown";
}

GeneralizationMode parse_mode(const std::string& name) {
  if (name == "same") return GeneralizationMode::Same;
  if (name == "new-object") return GeneralizationMode::NewObject;
  if (name == "new-environment") return GeneralizationMode::NewEnvironment;
  if (name == "new-both") return GeneralizationMode::NewBoth;
  throw std::invalid_argument("unknown generalization mode: " + name);
}

ScenarioVariant held_out_variant(GeneralizationMode m) {
  switch (m) {
    case GeneralizationMode::Same: return {0, 0};
    case GeneralizationMode::NewObject: return {1, 0};
    case GeneralizationMode::NewEnvironment: return {0, 1};
    case GeneralizationMode::NewBoth: return {1, 1};
  }
  return {};
}

// ---------------------------------------------------------------------------
// ExperimentConfig

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "family") {
    families.clear();
    if (v == "all" || v == "mixed") {
      families = {Family::ManipulationCentric, Family::EnvironmentCentric, Family::HumanCentric};
    } else {
      for (const auto& f : split(v, ',')) families.push_back(parse_family(f));
    }
  } else if (key == "tasks") {
    tasks = parse_u64(key, v);
  } else if (key == "iterations") {
    iterations = parse_u64(key, v);
  } else if (key == "candidates") {
    candidates = parse_u64(key, v);
  } else if (key == "feedback") {
    feedback = parse_mechanism(v);
    if (v == "one-from-n") k = 0;
    if (v == "one-from-5") k = 5;
  } else if (key == "k") {
    k = v == "n" ? 0 : parse_u64(key, v);
  } else if (key == "alpha") {
    alpha = parse_double(key, v);
  } else if (key == "noise") {
    noise = parse_double(key, v);
  } else if (key == "noise_k") {
    noise_k = parse_u64(key, v);
  } else if (key == "seed") {
    seed = parse_u64(key, v);
  } else if (key == "algo") {
    algo = parse_algorithm(v);
  } else if (key == "mode") {
    mode = parse_mode(v);
  } else if (key == "attributes") {
    attributes = parse_u64(key, v);
  } else if (key == "pretrain_iterations") {
    pretrain_iterations = parse_u64(key, v);
  } else if (key == "test_iterations") {
    test_iterations = parse_u64(key, v);
  } else if (key == "test_tasks") {
    test_tasks = parse_u64(key, v);
  } else if (key == "mmp_lambdas") {
    mmp_lambdas.clear();
    for (const auto& l : split(v, ',')) mmp_lambdas.push_back(parse_double(key, l));
  } else if (key == "mmp_passes") {
    mmp_passes = parse_u64(key, v);
  } else if (key == "supervised_tasks") {
    supervised_tasks = parse_u64(key, v);
  } else if (key == "supervised_passes") {
    supervised_passes = parse_u64(key, v);
  } else if (key == "tau") {
    features.tau = parse_double(key, v);
  } else if (key == "horizontal_cap") {
    features.horizontal_cap = parse_double(key, v);
  } else if (key == "rrt_step") {
    sampler.rrt_step = parse_double(key, v);
  } else if (key == "goal_bias_lo") {
    sampler.goal_bias_lo = parse_double(key, v);
  } else if (key == "goal_bias_hi") {
    sampler.goal_bias_hi = parse_double(key, v);
  } else if (key == "max_rrt_nodes") {
    sampler.max_rrt_nodes = parse_u64(key, v);
  } else if (key == "blocking_radius") {
    sampler.blocking_radius = parse_double(key, v);
  } else if (key == "blocking") {
    sampler.blocking = parse_bool(key, v);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

void ExperimentConfig::validate() const {
  if (families.empty()) throw std::invalid_argument("at least one scenario family is required");
  if (tasks < 1) throw std::invalid_argument("tasks must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations T must be >= 1");
  if (candidates < 2) throw std::invalid_argument("candidates n must be >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("noise must lie in [0, 1]");
  if (noise_k < 1) throw std::invalid_argument("noise_k must be >= 1");
  if (attributes != 6 && attributes != 7) throw std::invalid_argument("attributes must be 6 or 7");
  if (test_tasks < 1) throw std::invalid_argument("test_tasks must be >= 1");
  if (mmp_lambdas.empty()) throw std::invalid_argument("mmp_lambdas must not be empty");
  for (double l : mmp_lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("mmp lambdas must be positive");
  if (!(features.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  SamplerConfig s = sampler;
  s.n_candidates = candidates;
  s.validate();
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> m;
  std::string fam;
  for (std::size_t i = 0; i < families.size(); ++i) fam += (i ? "," : "") + to_string(families[i]);
  std::string lambdas;
  for (std::size_t i = 0; i < mmp_lambdas.size(); ++i) lambdas += (i ? "," : "") + format_double(mmp_lambdas[i]);
  m["family"] = fam;
  m["tasks"] = std::to_string(tasks);
  m["iterations"] = std::to_string(iterations);
  m["candidates"] = std::to_string(candidates);
  m["feedback"] = to_string(feedback);
  m["k"] = std::to_string(k);
  m["alpha"] = format_double(alpha);
  m["noise"] = format_double(noise);
  m["noise_k"] = std::to_string(noise_k);
  m["seed"] = std::to_string(seed);
  m["algo"] = to_string(algo);
  m["mode"] = to_string(mode);
  m["attributes"] = std::to_string(attributes);
  m["pretrain_iterations"] = std::to_string(pretrain_iterations);
  m["test_iterations"] = std::to_string(test_iterations);
  m["test_tasks"] = std::to_string(test_tasks);
  m["mmp_lambdas"] = lambdas;
  m["mmp_passes"] = std::to_string(mmp_passes);
  m["supervised_tasks"] = std::to_string(supervised_tasks);
  m["supervised_passes"] = std::to_string(supervised_passes);
  m["tau"] = format_double(features.tau);
  m["horizontal_cap"] = format_double(features.horizontal_cap);
  m["rrt_step"] = format_double(sampler.rrt_step);
  m["goal_bias_lo"] = format_double(sampler.goal_bias_lo);
  m["goal_bias_hi"] = format_double(sampler.goal_bias_hi);
  m["max_rrt_nodes"] = std::to_string(sampler.max_rrt_nodes);
  m["blocking_radius"] = format_double(sampler.blocking_radius);
  m["blocking"] = sampler.blocking ? "true" : "false";
  return m;
}

std::string ExperimentConfig::to_text() const {
  // "feedback" must precede "k": the one-from-n alias resets k. std::map
  // order guarantees it.
  std::string out;
  for (const auto& [k, v] : to_map()) out += k + "=" + v + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(read_file(path)); }

AttributeSet ExperimentConfig::attribute_set() const {
  return attributes == 7 ? AttributeSet::with_human() : AttributeSet::defaults();
}

// ---------------------------------------------------------------------------
// Tasks

Task build_task(const ExperimentConfig& cfg, std::size_t index, Family family, ScenarioVariant variant,
                std::uint64_t scene_seed, std::uint64_t candidate_seed) {
  Task task;
  task.index = index;
  task.family = family;
  task.variant = variant;
  task.scene_seed = scene_seed;
  task.candidate_seed = candidate_seed;
  task.scene = generate_scenario(family, scene_seed, variant, cfg.attribute_set());
  SamplerConfig sc = cfg.sampler;
  sc.n_candidates = cfg.candidates;
  sc.rng_seed = candidate_seed;
  task.trajectories = sample_diverse(task.scene, sc);
  task.features.reserve(task.trajectories.size());
  for (const auto& t : task.trajectories) task.features.push_back(extract(task.scene, t, cfg.features));
  return task;
}

TaskStream::TaskStream(const ExperimentConfig& cfg, Stream stream, std::size_t scenes, ScenarioVariant variant,
                       std::uint64_t salt)
    : cfg_(cfg), stream_(stream), scenes_(scenes), variant_(variant), salt_(salt) {
  if (scenes_ < 1) throw std::invalid_argument("a task stream needs at least one scene");
}

const Task& TaskStream::at(std::size_t t) {
  if (t < 1) throw std::out_of_range("iterations are numbered from 1");
  if (auto it = cache_.find(t); it != cache_.end()) return it->second;
  const std::size_t index = (t - 1) % scenes_;
  const std::uint64_t base = derive_seed(cfg_.seed, static_cast<std::uint64_t>(stream_), salt_);
  const Family family = cfg_.families[index % cfg_.families.size()];
  Task task = build_task(cfg_, index, family, variant_, derive_seed(base, kSceneTag, index),
                         derive_seed(base, kCandidateTag, t));
  return cache_.emplace(t, std::move(task)).first->second;
}

void TaskStream::prefetch(std::size_t T) {
  for (std::size_t t = 1; t <= T; ++t) at(t);
}

HiddenUtility user_for(const ExperimentConfig& cfg) {
  return HiddenUtility::random(object_object_size(cfg.attributes), kEnvFeatures, derive_seed(cfg.seed, kUserTag));
}

// ---------------------------------------------------------------------------
// Rankers

namespace {

class TppRanker final : public Ranker {
 public:
  explicit TppRanker(WeightState w) : w_(std::move(w)) {}
  std::vector<std::size_t> rank(const Task& task) const override { return tpp::rank(w_, task.features); }
  void observe(const Task&, const FeatureVector& predicted, const FeatureVector& feedback) override {
    w_ = tpp_update(w_, predicted, feedback);
  }
  const WeightState& weights() const override { return w_; }
  bool perceptron() const override { return true; }

 private:
  WeightState w_;
};

class MmpRanker final : public Ranker {
 public:
  MmpRanker(std::size_t attributes, double lambda, std::size_t passes, std::uint64_t seed)
      : state_(MmpState::create(object_object_size(attributes), lambda, passes, seed)) {}
  std::vector<std::size_t> rank(const Task& task) const override { return tpp::rank(state_.weights, task.features); }
  void observe(const Task& task, const FeatureVector&, const FeatureVector& feedback) override {
    state_ = mmp_observe_and_train(std::move(state_), feedback, task.features);
  }
  const WeightState& weights() const override { return state_.weights; }

 private:
  MmpState state_;
};

class FixedRanker final : public Ranker {
 public:
  explicit FixedRanker(WeightState w) : w_(std::move(w)) {}
  std::vector<std::size_t> rank(const Task& task) const override { return tpp::rank(w_, task.features); }
  void observe(const Task&, const FeatureVector&, const FeatureVector&) override {}
  const WeightState& weights() const override { return w_; }

 private:
  WeightState w_;
};

class GeometricRanker final : public Ranker {
 public:
  explicit GeometricRanker(std::size_t attributes) : w_(WeightState::zero(object_object_size(attributes))) {}
  std::vector<std::size_t> rank(const Task& task) const override { return geometric_rank(task.trajectories); }
  void observe(const Task&, const FeatureVector&, const FeatureVector&) override {}
  const WeightState& weights() const override { return w_; }

 private:
  WeightState w_;
};

}  // namespace

std::unique_ptr<Ranker> make_tpp(WeightState initial) { return std::make_unique<TppRanker>(std::move(initial)); }
std::unique_ptr<Ranker> make_mmp(std::size_t attributes, double lambda, std::size_t passes, std::uint64_t seed) {
  return std::make_unique<MmpRanker>(attributes, lambda, passes, seed);
}
std::unique_ptr<Ranker> make_fixed(WeightState weights) { return std::make_unique<FixedRanker>(std::move(weights)); }
std::unique_ptr<Ranker> make_geometric(std::size_t attributes) { return std::make_unique<GeometricRanker>(attributes); }

WeightState fit_pairwise(const std::vector<std::vector<FeatureVector>>& sets,
                         const std::vector<std::vector<double>>& labels, std::size_t passes, std::uint64_t seed) {
  if (sets.size() != labels.size()) throw std::invalid_argument("one label list per candidate set is required");
  if (sets.empty() || sets.front().empty()) throw std::invalid_argument("no training candidates");
  const FeatureVector& layout = sets.front().front();
  std::vector<Eigen::VectorXd> diffs;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (sets[s].size() != labels[s].size()) throw std::invalid_argument("label count does not match candidates");
    for (std::size_t i = 0; i < sets[s].size(); ++i)
      for (std::size_t j = 0; j < sets[s].size(); ++j)
        if (labels[s][i] > labels[s][j]) diffs.push_back(sets[s][i].stacked() - sets[s][j].stacked());
  }
  const Eigen::Index d = layout.phi_O.size() + layout.phi_E.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t k = 0;
  for (std::size_t pass = 0; pass < passes; ++pass) {
    Rng rng(derive_seed(seed, pass));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t idx : order) {
      ++k;
      if (w.dot(diffs[idx]) < 1.0) w += diffs[idx] / std::sqrt(static_cast<double>(k));
      sum += w;
    }
  }
  if (k > 0) w = sum / static_cast<double>(k);
  WeightState out = WeightState::zero_like(layout);
  out.w_O = w.head(layout.phi_O.size());
  out.w_E = w.tail(layout.phi_E.size());
  return out;
}

WeightState supervised_reference(const ExperimentConfig& cfg, const HiddenUtility& user) {
  TaskStream stream(cfg, Stream::Supervised, cfg.supervised_tasks);
  std::vector<std::vector<FeatureVector>> sets;
  std::vector<std::vector<double>> labels;
  for (std::size_t t = 1; t <= cfg.supervised_tasks; ++t) {
    const Task& task = stream.at(t);
    sets.push_back(task.features);
    const auto l = likert_labels(user, task.features);
    labels.emplace_back(l.begin(), l.end());
  }
  return fit_pairwise(sets, labels, cfg.supervised_passes, derive_seed(cfg.seed, kFitTag));
}

// ---------------------------------------------------------------------------
// Metrics

std::vector<MetricsRow> compute_metrics(const std::vector<IterationTrace>& trace, double target_alpha,
                                        double utility_norm) {
  std::vector<MetricsRow> rows;
  rows.reserve(trace.size());
  std::vector<double> xi;
  double gap_sum = 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const IterationTrace& it = trace[i];
    gap_sum += it.record.s_best - it.record.s_predicted;
    c = std::max(c, it.feature_norm_max);
    xi.push_back(it.record.xi);
    MetricsRow row;
    row.t = i + 1;
    row.regret = gap_sum / static_cast<double>(row.t);
    row.bound = regret_bound(c, utility_norm, target_alpha, xi, row.t);
    row.ndcg1 = ndcg_at_k(it.ranked_labels, 1);
    row.ndcg3 = ndcg_at_k(it.ranked_labels, std::min<std::size_t>(3, it.ranked_labels.size()));
    row.alpha = it.record.alpha;
    row.xi = it.record.xi;
    rows.push_back(row);
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,regret,bound,ndcg1,ndcg3,alpha_t,xi_t\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.regret << ',' << r.bound << ',' << r.ndcg1 << ',' << r.ndcg3 << ',' << r.alpha << ','
       << r.xi << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Sessions

namespace {

json record_to_json(const FeedbackRecord& r) {
  return {{"t", r.t},           {"mechanism", r.mechanism}, {"s_predicted", r.s_predicted},
          {"s_feedback", r.s_feedback}, {"s_best", r.s_best},   {"alpha", r.alpha},
          {"xi", r.xi}};
}

void emit(std::ostream* log, const json& event) {
  if (log) *log << event.dump() << '\n';
}

}  // namespace

SessionResult run_with_ranker(const ExperimentConfig& cfg, TaskStream& stream, Ranker& ranker,
                              const HiddenUtility& user, std::size_t iterations, std::ostream* log,
                              std::optional<double> mmp_lambda) {
  SessionResult result;
  result.utility_norm = user.norm();
  result.mmp_lambda = mmp_lambda;

  json config_event = {{"event", "config"},
                       {"version", 1},
                       {"config", cfg.to_map()},
                       {"iterations", iterations},
                       {"utility_norm", user.norm()},
                       {"attributes", cfg.attribute_set().labels()},
                       {"perceptron", ranker.perceptron()},
                       {"initial_weights", to_json(ranker.weights())}};
  config_event["mmp_lambda"] = mmp_lambda ? json(*mmp_lambda) : json(nullptr);
  emit(log, config_event);

  std::set<std::size_t> logged_scenes;
  for (std::size_t t = 1; t <= iterations; ++t) {
    const Task& task = stream.at(t);
    if (log && logged_scenes.insert(task.index).second) {
      emit(log, {{"event", "scene"},
                 {"task", task.index},
                 {"family", to_string(task.family)},
                 {"variant", {task.variant.object_pool, task.variant.environment_pool}},
                 {"scene_seed", task.scene_seed},
                 {"scene", to_json(task.scene)}});
    }

    const std::vector<std::size_t> order = ranker.rank(task);
    std::vector<FeatureVector> ranked;
    ranked.reserve(order.size());
    for (std::size_t i : order) ranked.push_back(task.features[i]);
    const std::vector<double> u = user.utilities(ranked);
    const std::vector<int> ranked_labels = likert_labels(u);

    IterationTrace it;
    it.ranked_labels = ranked_labels;
    it.feature_norm_max = feature_norm_bound(std::span<const FeatureVector>(task.features));

    FeatureVector fb_features;
    long position = -1;
    const std::uint64_t fb_seed = derive_seed(cfg.seed, kFeedbackTag, t);
    if (cfg.feedback == Mechanism::WaypointCorrection) {
      const double best = *std::max_element(u.begin(), u.end());
      WaypointFeedback wf = feedback_waypoint_correction(user, task.scene, task.trajectories[order[0]], ranked[0],
                                                         best, cfg.alpha, cfg.features);
      fb_features = wf.features;
      it.record = wf.record;
      it.feature_norm_max = std::max(it.feature_norm_max, fb_features.norm());
      if (!wf.waypoint) position = 0;
    } else {
      Feedback fb;
      switch (cfg.feedback) {
        case Mechanism::ReplaceTop: fb = feedback_replace_top(u, cfg.alpha); break;
        case Mechanism::OneFromK: fb = feedback_one_from_k(u, cfg.shown_k(), cfg.alpha); break;
        case Mechanism::ApproxArgmax: fb = feedback_approx_argmax(u, fb_seed, cfg.alpha); break;
        case Mechanism::WaypointCorrection: break;
      }
      if (cfg.noise > 0.0)
        fb = apply_noisy_click(fb, u, NoisyClick{cfg.noise, cfg.noise_k}, derive_seed(cfg.seed, kNoiseTag, t),
                               cfg.alpha);
      position = static_cast<long>(fb.position);
      fb_features = ranked[fb.position];
      it.record = fb.record;
    }
    it.record.t = t;

    ranker.observe(task, ranked[0], fb_features);

    if (log) {
      emit(log, {{"event", "iteration"},
                 {"t", t},
                 {"task", task.index},
                 {"candidate_seed", task.candidate_seed},
                 {"candidates", task.features.size()},
                 {"ranking", order},
                 {"labels", ranked_labels},
                 {"feature_norm_max", it.feature_norm_max},
                 {"feedback_position", position},
                 {"predicted", to_json(ranked[0])},
                 {"feedback", to_json(fb_features)},
                 {"record", record_to_json(it.record)},
                 {"weights_hash", weight_hash(ranker.weights())}});
    }
    result.trace.push_back(std::move(it));
  }

  result.metrics = compute_metrics(result.trace, cfg.alpha, user.norm());
  result.weights = ranker.weights();
  emit(log, {{"event", "end"},
             {"iterations", iterations},
             {"regret", result.final_regret()},
             {"weights", to_json(result.weights)}});
  return result;
}

SessionResult run_session(const ExperimentConfig& cfg, TaskStream& stream, std::ostream* log) {
  cfg.validate();
  const HiddenUtility user = user_for(cfg);
  switch (cfg.algo) {
    case Algorithm::Tpp: {
      auto r = make_tpp(WeightState::zero(object_object_size(cfg.attributes)));
      return run_with_ranker(cfg, stream, *r, user, cfg.iterations, log);
    }
    case Algorithm::Manual: {
      auto r = make_fixed(manual_weights(cfg.attributes));
      return run_with_ranker(cfg, stream, *r, user, cfg.iterations, log);
    }
    case Algorithm::Geometric: {
      auto r = make_geometric(cfg.attributes);
      return run_with_ranker(cfg, stream, *r, user, cfg.iterations, log);
    }
    case Algorithm::SupervisedReference: {
      auto r = make_fixed(supervised_reference(cfg, user));
      return run_with_ranker(cfg, stream, *r, user, cfg.iterations, log);
    }
    case Algorithm::Mmp: {
      // Hindsight choice of lambda: every grid value sees the same contexts
      // and clicks, the lowest final regret wins (first on ties).
      stream.prefetch(cfg.iterations);
      const std::size_t m = cfg.mmp_lambdas.size();
      std::vector<SessionResult> results(m);
      std::vector<std::string> logs(m);
      parallel_for(m, [&](std::size_t i) {
        auto r = make_mmp(cfg.attributes, cfg.mmp_lambdas[i], cfg.mmp_passes, derive_seed(cfg.seed, kMmpTag));
        std::ostringstream os;
        results[i] = run_with_ranker(cfg, stream, *r, user, cfg.iterations, log ? &os : nullptr,
                                     cfg.mmp_lambdas[i]);
        logs[i] = os.str();
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < m; ++i)
        if (results[i].final_regret() < results[best].final_regret()) best = i;
      if (log) *log << logs[best];
      return std::move(results[best]);
    }
  }
  throw std::logic_error("unreachable");
}

SessionResult run_session(const ExperimentConfig& cfg, std::ostream* log) {
  TaskStream stream(cfg, Stream::Train, cfg.tasks);
  return run_session(cfg, stream, log);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tpp
