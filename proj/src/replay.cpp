#include <iomanip>
#include <sstream>

#include "tpp/harness.hpp"
#include "tpp/io.hpp"
#include "tpp/metrics.hpp"

namespace tpp {

namespace {

FeedbackRecord record_from_json(const json& j) {
  FeedbackRecord r;
  r.t = j.at("t").get<std::size_t>();
  r.mechanism = j.at("mechanism").get<std::string>();
  r.s_predicted = j.at("s_predicted").get<double>();
  r.s_feedback = j.at("s_feedback").get<double>();
  r.s_best = j.at("s_best").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.xi = j.at("xi").get<double>();
  return r;
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

ReplayReport replay(const std::string& log_text, bool rerun) {
  ReplayReport report;
  std::istringstream in(log_text);
  std::string line;
  std::optional<ExperimentConfig> cfg;
  std::vector<IterationTrace> trace;
  double utility_norm = 0.0;
  bool perceptron = false;
  bool fixed = false;
  WeightState initial;
  WeightState w;
  Eigen::VectorXd sum_O;
  Eigen::VectorXd sum_E;
  std::string fixed_hash;
  bool ended = false;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json ev = json::parse(line);
    const std::string kind = ev.at("event").get<std::string>();
    if (kind == "config") {
      if (cfg) throw FormatError("log holds more than one session");
      ExperimentConfig c;
      for (const auto& [key, value] : ev.at("config").items()) c.set(key, value.get<std::string>());
      c.validate();
      cfg = c;
      utility_norm = ev.at("utility_norm").get<double>();
      perceptron = ev.at("perceptron").get<bool>();
      fixed = !perceptron && c.algo != Algorithm::Mmp;
      initial = weights_from_json(ev.at("initial_weights"));
      w = initial;
      sum_O = Eigen::VectorXd::Zero(w.w_O.size());
      sum_E = Eigen::VectorXd::Zero(w.w_E.size());
      fixed_hash = weight_hash(initial);
    } else if (kind == "scene") {
      if (!cfg) throw FormatError("scene event before config");
      scene_from_json(ev.at("scene"));
    } else if (kind == "iteration") {
      if (!cfg) throw FormatError("iteration event before config");
      IterationTrace it;
      it.record = record_from_json(ev.at("record"));
      it.ranked_labels = ev.at("labels").get<std::vector<int>>();
      it.feature_norm_max = ev.at("feature_norm_max").get<double>();
      const std::size_t t = ev.at("t").get<std::size_t>();
      if (t != trace.size() + 1) report.problems.push_back("iteration " + std::to_string(t) + " out of order");
      const std::string logged = ev.at("weights_hash").get<std::string>();
      if (perceptron) {
        const FeatureVector pred = features_from_json(ev.at("predicted"));
        const FeatureVector fb = features_from_json(ev.at("feedback"));
        w = tpp_update(w, pred, fb);
        sum_O += fb.phi_O - pred.phi_O;
        sum_E += fb.phi_E - pred.phi_E;
        if (weight_hash(w) != logged) report.problems.push_back("weight hash mismatch at t=" + std::to_string(t));
        ++report.hashes_checked;
      } else if (fixed) {
        if (fixed_hash != logged) report.problems.push_back("fixed weights changed at t=" + std::to_string(t));
        ++report.hashes_checked;
      }
      trace.push_back(std::move(it));
    } else if (kind == "end") {
      ended = true;
      const WeightState logged = weights_from_json(ev.at("weights"));
      const bool same = perceptron ? logged == w : !fixed || weight_hash(logged) == fixed_hash;
      if (!same) report.problems.push_back("final weights differ from the replayed ones");
    } else {
      throw FormatError("unknown event kind: " + kind);
    }
  }
  if (!cfg) throw FormatError("log has no config event");
  if (!ended) report.problems.push_back("log has no end event");

  report.iterations = trace.size();
  report.metrics = metrics_csv(compute_metrics(trace, cfg->alpha, utility_norm));
  if (perceptron) {
    report.telescoping_exact =
        bitwise_equal(w.w_O - initial.w_O, sum_O) && bitwise_equal(w.w_E - initial.w_E, sum_E);
    if (!report.telescoping_exact) report.problems.push_back("telescoping identity is not exact");
  }
  if (rerun) {
    std::ostringstream os;
    run_session(*cfg, &os);
    if (os.str() != log_text) report.problems.push_back("re-executed session log differs");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Generalization

namespace {

double mean_ndcg(const WeightState& w, const HiddenUtility& user, const Task& task, std::size_t k) {
  const auto order = rank(w, task.features);
  const auto labels = likert_labels(user, task.features);
  std::vector<int> ranked;
  for (std::size_t i : order) ranked.push_back(labels[i]);
  return ndcg_at_k(ranked, std::min(k, ranked.size()));
}

}  // namespace

GeneralizationResult run_generalization(const ExperimentConfig& cfg, const std::vector<GeneralizationMode>& modes) {
  cfg.validate();
  const HiddenUtility user = user_for(cfg);
  const std::size_t oo = object_object_size(cfg.attributes);

  TaskStream train(cfg, Stream::Train, cfg.tasks);
  auto pre = make_tpp(WeightState::zero(oo));
  run_with_ranker(cfg, train, *pre, user, cfg.pretrain_iterations, nullptr);
  const WeightState pretrained = pre->weights();
  const WeightState untrained = WeightState::zero(oo);

  GeneralizationResult out;
  for (GeneralizationMode mode : modes) {
    TaskStream test(cfg, Stream::Test, cfg.test_tasks, held_out_variant(mode));

    GeneralizationRow first;
    first.mode = mode;
    for (std::size_t i = 1; i <= cfg.test_tasks; ++i) {
      const Task& task = test.at(i);
      first.pretrained_ndcg1 += mean_ndcg(pretrained, user, task, 1);
      first.pretrained_ndcg3 += mean_ndcg(pretrained, user, task, 3);
      first.untrained_ndcg1 += mean_ndcg(untrained, user, task, 1);
      first.untrained_ndcg3 += mean_ndcg(untrained, user, task, 3);
    }
    const double n = static_cast<double>(cfg.test_tasks);
    first.pretrained_ndcg1 /= n;
    first.pretrained_ndcg3 /= n;
    first.untrained_ndcg1 /= n;
    first.untrained_ndcg3 /= n;
    out.first[mode] = first;
    out.rows.push_back(first);

    auto warm = make_tpp(pretrained);
    auto cold = make_tpp(untrained);
    const SessionResult a = run_with_ranker(cfg, test, *warm, user, cfg.test_iterations, nullptr);
    const SessionResult b = run_with_ranker(cfg, test, *cold, user, cfg.test_iterations, nullptr);
    for (std::size_t i = 0; i < cfg.test_iterations; ++i) {
      GeneralizationRow row;
      row.mode = mode;
      row.t = i + 1;
      row.pretrained_ndcg1 = a.metrics[i].ndcg1;
      row.pretrained_ndcg3 = a.metrics[i].ndcg3;
      row.untrained_ndcg1 = b.metrics[i].ndcg1;
      row.untrained_ndcg3 = b.metrics[i].ndcg3;
      out.rows.push_back(row);
    }
  }
  return out;
}

std::string generalization_csv(const GeneralizationResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "mode,t,pretrained_ndcg1,pretrained_ndcg3,untrained_ndcg1,untrained_ndcg3\n";
  for (const auto& row : r.rows)
    os << to_string(row.mode) << ',' << row.t << ',' << row.pretrained_ndcg1 << ',' << row.pretrained_ndcg3 << ','
       << row.untrained_ndcg1 << ',' << row.untrained_ndcg3 << '\n';
  return os.str();
}

}  // namespace tpp
