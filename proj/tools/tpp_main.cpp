// Command-line front end for the trajectory preference lab.
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "tpp/harness.hpp"
#include "tpp/io.hpp"
#include "tpp/scenario.hpp"
#include "tpp/service.hpp"

namespace fs = std::filesystem;
using namespace tpp;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> algo;
  std::optional<std::string> feedback;
  std::optional<double> alpha;
  std::optional<std::size_t> iters;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "key=value experiment file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "experiment seed");
  app->add_option("--out-dir", f.out_dir, "output directory");
  app->add_option("--algo", f.algo, "tpp | mmp | geometric | manual | supervised-reference");
  app->add_option("--feedback", f.feedback, "replace-top | one-from-5 | one-from-n | approx-argmax | waypoint");
  app->add_option("--alpha", f.alpha, "target alpha in (0, 1]");
  app->add_option("--iters", f.iters, "iterations T");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.algo) cfg.set("algo", *f.algo);
  if (f.feedback) cfg.set("feedback", *f.feedback);
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.iters) cfg.iterations = *f.iters;
  cfg.validate();
  return cfg;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

int cmd_run(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags);
  const fs::path out = ensure_dir(flags.out_dir);
  std::ofstream log(out / "session.jsonl", std::ios::binary);
  if (!log) throw std::runtime_error("cannot write " + (out / "session.jsonl").string());
  const SessionResult r = run_session(cfg, &log);
  log.close();
  write_file((out / "metrics.csv").string(), metrics_csv(r.metrics));
  write_file((out / "weights.json").string(), to_json(r.weights).dump(2) + "\n");
  write_file((out / "config.txt").string(), cfg.to_text());
  std::cout << "algo=" << to_string(cfg.algo) << " T=" << cfg.iterations << " REG_T=" << r.final_regret()
            << " bound=" << r.metrics.back().bound;
  if (r.mmp_lambda) std::cout << " lambda=" << *r.mmp_lambda;
  std::cout << "\nwrote " << (out / "session.jsonl").string() << ", metrics.csv, weights.json\n";
  return 0;
}

int cmd_generalize(const CommonFlags& flags, const std::vector<std::string>& mode_names) {
  const ExperimentConfig cfg = resolve(flags);
  std::vector<GeneralizationMode> modes;
  if (mode_names.empty()) {
    modes = {GeneralizationMode::Same, GeneralizationMode::NewObject, GeneralizationMode::NewEnvironment,
             GeneralizationMode::NewBoth};
  } else {
    for (const auto& m : mode_names) modes.push_back(parse_mode(m));
  }
  const GeneralizationResult r = run_generalization(cfg, modes);
  const fs::path out = ensure_dir(flags.out_dir);
  write_file((out / "generalization.csv").string(), generalization_csv(r));
  for (const auto& [mode, row] : r.first)
    std::cout << to_string(mode) << ": first nDCG@3 pretrained=" << row.pretrained_ndcg3
              << " untrained=" << row.untrained_ndcg3 << "\n";
  std::cout << "wrote " << (out / "generalization.csv").string() << "\n";
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& out_dir, const std::string& compare, bool rerun) {
  const ReplayReport rep = replay(read_file(log_path), rerun);
  const fs::path out = ensure_dir(out_dir);
  write_file((out / "metrics.replay.csv").string(), rep.metrics);
  std::cout << "iterations=" << rep.iterations << " hashes_checked=" << rep.hashes_checked
            << " telescoping=" << (rep.telescoping_exact ? "exact" : "n/a") << "\n";
  int status = rep.ok() ? 0 : 1;
  for (const auto& p : rep.problems) std::cerr << "replay: " << p << "\n";
  if (!compare.empty()) {
    if (read_file(compare) == rep.metrics) {
      std::cout << "metrics identical to " << compare << "\n";
    } else {
      std::cerr << "replay: metrics differ from " << compare << "\n";
      status = 1;
    }
  }
  return status;
}

HttpService* g_service = nullptr;

int cmd_serve(const std::string& host, int port, std::size_t candidates) {
  ServiceOptions opts;
  opts.candidates = candidates;
  SessionManager manager(opts);
  HttpService service(manager);
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::cout << "serving on http://" << host << ":" << port << std::endl;
  service.run(host, port);
  return 0;
}

int cmd_scenario(const std::string& family, std::uint64_t seed, const std::string& out_dir, std::size_t candidates,
                 int object_pool, int environment_pool) {
  const Scene scene = generate_scenario(parse_family(family), seed, ScenarioVariant{object_pool, environment_pool});
  const fs::path out = ensure_dir(out_dir);
  write_file((out / "scene.json").string(), to_json(scene).dump(2) + "\n");
  std::cout << "scene: " << scene.objects.size() << " objects, carried=" << scene.manipulated_id << "\n";
  if (candidates > 0) {
    SamplerConfig sc;
    sc.n_candidates = candidates;
    sc.rng_seed = seed;
    const auto trajectories = sample_diverse(scene, sc);
    json list = json::array();
    for (const auto& t : trajectories) list.push_back(trajectory_payload(scene, t));
    write_file((out / "trajectories.json").string(), list.dump() + "\n");
    std::ofstream csv(out / "trajectory0.csv");
    write_trajectory_csv(csv, scene, trajectories.front());
    std::cout << "candidates: " << trajectories.size() << ", mean pairwise distance "
              << mean_pairwise_distance(trajectories) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coactive trajectory preference learning lab"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run one learning session");
  add_common(run, run_flags);

  CommonFlags gen_flags;
  std::vector<std::string> modes;
  auto* gen = app.add_subcommand("generalize", "pre-trained vs untrained on held-out tasks");
  add_common(gen, gen_flags);
  gen->add_option("--mode", modes, "same | new-object | new-environment | new-both (repeatable)");

  std::string log_path;
  std::string replay_out = ".";
  std::string compare;
  bool rerun = false;
  auto* rep = app.add_subcommand("replay", "rebuild weights and metrics from a session log");
  rep->add_option("log", log_path, "session.jsonl")->required()->check(CLI::ExistingFile);
  rep->add_option("--out-dir", replay_out, "where metrics.replay.csv goes");
  rep->add_option("--compare", compare, "metrics CSV that must match byte for byte");
  rep->add_flag("--resample", rerun, "also re-execute the session and compare the logs");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t serve_candidates = 50;
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--candidates", serve_candidates);

  std::string family = "manipulation-centric";
  std::uint64_t scene_seed = 0;
  std::string scene_out = ".";
  std::size_t scene_candidates = 0;
  int object_pool = 0;
  int environment_pool = 0;
  auto* scen = app.add_subcommand("scenario", "generate a scene (and optionally candidates)");
  scen->add_option("--family", family);
  scen->add_option("--seed", scene_seed);
  scen->add_option("--out-dir", scene_out);
  scen->add_option("--candidates", scene_candidates, "also sample this many trajectories");
  scen->add_option("--object-pool", object_pool)->check(CLI::Range(0, 1));
  scen->add_option("--environment-pool", environment_pool)->check(CLI::Range(0, 1));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*gen) return cmd_generalize(gen_flags, modes);
    if (*rep) return cmd_replay(log_path, replay_out, compare, rerun);
    if (*serve) return cmd_serve(host, port, serve_candidates);
    if (*scen) return cmd_scenario(family, scene_seed, scene_out, scene_candidates, object_pool, environment_pool);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
