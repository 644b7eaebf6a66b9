#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridscout/mission.hpp"
#include "gridscout/training.hpp"

namespace {

using namespace gridscout;

struct MissionFlags {
  std::string kind = "indoor";
  std::string policy = "heuristic";
  std::string select = "greedy";
  std::string backend = "rule";
  std::string reasoner_mode = "live";
  MissionConfig config;
};

void add_mission_flags(CLI::App& cmd, MissionFlags& f) {
  cmd.add_option("--kind", f.kind, "Map kind: indoor|forest|warehouse")
      ->capture_default_str();
  cmd.add_option("--seed", f.config.map_seed, "Map seed")->capture_default_str();
  cmd.add_option("--width", f.config.map_width, "Map width in cells")
      ->capture_default_str();
  cmd.add_option("--height", f.config.map_height, "Map height in cells")
      ->capture_default_str();
  cmd.add_option("--resolution", f.config.map_resolution, "Meters per cell")
      ->capture_default_str();
  cmd.add_option("--node-resolution", f.config.node_resolution,
                 "Viewpoint lattice pitch in meters")
      ->capture_default_str();
  cmd.add_option("--sensing-range", f.config.sensing_range, "Sensor range (m)")
      ->capture_default_str();
  cmd.add_option("--rays", f.config.ray_count, "Rays per scan")
      ->capture_default_str();
  cmd.add_option("--knn", f.config.knn, "Graph neighbors per viewpoint")
      ->capture_default_str();
  cmd.add_option("--window", f.config.window_size, "Local window side (m)")
      ->capture_default_str();
  cmd.add_option("--k-top", f.config.k_top, "Communities kept after pruning")
      ->capture_default_str();
  cmd.add_option("--replan-interval", f.config.replan_interval,
                 "Steps between forced global replans")
      ->capture_default_str();
  cmd.add_option("--policy", f.policy, "heuristic|learned|greedy")
      ->capture_default_str();
  cmd.add_option("--select", f.select, "Waypoint selection: greedy|sample")
      ->capture_default_str();
  cmd.add_option("--checkpoint", f.config.checkpoint_path,
                 "Policy weights (learned mode)");
  cmd.add_option("--steps", f.config.step_cap, "Step cap")
      ->capture_default_str();
  cmd.add_option("--rng-seed", f.config.rng_seed, "Episode RNG seed")
      ->capture_default_str();
  cmd.add_option("--backend", f.backend, "Reasoner backend: rule|external")
      ->capture_default_str();
  cmd.add_option("--endpoint", f.config.reasoner.endpoint,
                 "External reasoner URL")
      ->envname("GRIDSCOUT_REASONER_ENDPOINT");
  cmd.add_option("--reasoner-timeout", f.config.reasoner.timeout_seconds,
                 "External reasoner timeout (s)")
      ->capture_default_str();
  cmd.add_option("--reasoner-mode", f.reasoner_mode, "live|record|replay")
      ->capture_default_str();
  cmd.add_option("--fixture", f.config.reasoner.fixture_path,
                 "Reasoner record/replay fixture (JSONL)");
}

MissionConfig resolve(MissionFlags& f) {
  f.config.map_kind = map_kind_from_string(f.kind);
  f.config.policy = policy_mode_from_string(f.policy);
  if (f.select == "greedy") {
    f.config.select = SelectMode::greedy;
  } else if (f.select == "sample") {
    f.config.select = SelectMode::sample;
  } else {
    throw CLI::ValidationError("--select must be greedy or sample");
  }
  f.config.reasoner.backend = f.backend;
  f.config.reasoner.mode = f.reasoner_mode;
  return f.config;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int cmd_run(MissionFlags& flags, const std::string& log_path,
            const std::string& svg_path) {
  const MissionConfig config = resolve(flags);
  const EpisodeLog log = run_episode(config);
  const std::string jsonl = episode_to_jsonl(log, config);
  if (log_path.empty()) {
    std::cout << jsonl;
  } else {
    write_file(log_path, jsonl);
  }
  if (!svg_path.empty()) {
    const GroundTruthMap truth =
        generate_map(config.map_kind, config.map_seed, config.map_width,
                     config.map_height, config.map_resolution);
    write_file(svg_path, render_trajectory_svg(truth, log));
  }
  std::cerr << "steps=" << log.step_count << " distance=" << log.distance
            << " coverage=" << log.coverage
            << " completed=" << (log.completed ? 1 : 0);
  if (log.aborted) std::cerr << " aborted=\"" << log.abort_reason << '"';
  std::cerr << '\n';
  return log.aborted ? 1 : 0;
}

int cmd_bench(MissionFlags& flags, const std::string& policies_csv, int reps,
              int workers, const std::string& csv_path) {
  MissionConfig base = resolve(flags);
  std::vector<BenchmarkConfig> configs;
  std::string token;
  std::stringstream ss(policies_csv);
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    BenchmarkConfig bc;
    bc.name = token;
    bc.mission = base;
    bc.mission.policy = policy_mode_from_string(token);
    configs.push_back(std::move(bc));
  }
  if (configs.empty()) throw CLI::ValidationError("--policies is empty");
  const BenchmarkResult result = run_benchmark(configs, reps, workers);
  if (csv_path.empty()) {
    std::cout << result.csv;
  } else {
    write_file(csv_path, result.csv);
  }
  return 0;
}

int cmd_train(MissionFlags& flags, TrainHyper& hyper,
              const std::string& out_path, const std::string& curve_path,
              unsigned long long train_seed) {
  const MissionConfig config = resolve(flags);
  const TrainResult result = train_policy(config, hyper, train_seed);
  if (!out_path.empty()) save_checkpoint(result.params, out_path);
  std::string curve = "iteration,mean_return,smoothed_return,mean_deviation,"
                      "mean_coverage\n";
  for (const TrainCurvePoint& p : result.curve) {
    curve += std::to_string(p.iteration) + ',' + std::to_string(p.mean_return) +
             ',' + std::to_string(p.smoothed_return) + ',' +
             std::to_string(p.mean_deviation) + ',' +
             std::to_string(p.mean_coverage) + '\n';
  }
  if (curve_path.empty()) {
    std::cout << curve;
  } else {
    write_file(curve_path, curve);
  }
  if (result.diverged) {
    std::cerr << "diverged: " << result.diagnostic << '\n';
    return 1;
  }
  return 0;
}

int cmd_render(MissionFlags& flags, const std::string& svg_path) {
  const MissionConfig config = resolve(flags);
  const EpisodeLog log = run_episode(config);
  const GroundTruthMap truth =
      generate_map(config.map_kind, config.map_seed, config.map_width,
                   config.map_height, config.map_resolution);
  const std::string svg = render_trajectory_svg(truth, log);
  if (svg_path.empty()) {
    std::cout << svg;
  } else {
    write_file(svg_path, svg);
  }
  return 0;
}

int cmd_maps(MissionFlags& flags, const std::string& out_path) {
  const MissionConfig config = resolve(flags);
  const GroundTruthMap truth =
      generate_map(config.map_kind, config.map_seed, config.map_width,
                   config.map_height, config.map_resolution);
  const std::string text = save_map(truth);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frontier exploration planner/simulator"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (INI format)");

  MissionFlags flags;
  std::string log_path, svg_path, csv_path, out_path, curve_path;
  std::string policies = "heuristic,greedy";
  int reps = 5, workers = 1;
  TrainHyper hyper;
  unsigned long long train_seed = 1;

  CLI::App* run = app.add_subcommand("run", "Run one exploration episode");
  add_mission_flags(*run, flags);
  run->add_option("--log", log_path, "Episode log output (JSONL)");
  run->add_option("--svg", svg_path, "Trajectory render output");

  CLI::App* bench = app.add_subcommand("bench", "Paired-seed benchmark");
  add_mission_flags(*bench, flags);
  bench->add_option("--policies", policies, "Comma-separated policy list")
      ->capture_default_str();
  bench->add_option("--reps", reps, "Seeds per config")->capture_default_str();
  bench->add_option("--workers", workers, "Worker threads")
      ->capture_default_str();
  bench->add_option("--csv", csv_path, "Summary CSV output");

  CLI::App* train = app.add_subcommand("train", "Train the waypoint policy");
  add_mission_flags(*train, flags);
  train->add_option("--iters", hyper.iterations, "Iterations")
      ->capture_default_str();
  train->add_option("--episodes", hyper.episodes_per_iter,
                    "Episodes per iteration")
      ->capture_default_str();
  train->add_option("--lr", hyper.lr, "Learning rate")->capture_default_str();
  train->add_option("--gamma", hyper.gamma, "Discount")->capture_default_str();
  train->add_option("--entropy-coef", hyper.entropy_coef, "Entropy bonus")
      ->capture_default_str();
  train->add_option("--value-coef", hyper.value_coef, "Value loss weight")
      ->capture_default_str();
  train->add_option("--feature-dim", hyper.feature_dim, "Embedding width")
      ->capture_default_str();
  train->add_option("--layers", hyper.layer_count, "Encoder layers")
      ->capture_default_str();
  train->add_option("--train-seed", train_seed, "Training RNG seed")
      ->capture_default_str();
  train->add_option("--out", out_path, "Checkpoint output path");
  train->add_option("--curve", curve_path, "Learning curve CSV");

  CLI::App* render = app.add_subcommand("render", "Re-run and render an episode");
  add_mission_flags(*render, flags);
  render->add_option("--svg", svg_path, "SVG output path");

  CLI::App* maps = app.add_subcommand("maps", "Generate a map and dump it");
  add_mission_flags(*maps, flags);
  maps->add_option("--out", out_path, "Map text output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(flags, log_path, svg_path);
    if (bench->parsed())
      return cmd_bench(flags, policies, reps, workers, csv_path);
    if (train->parsed())
      return cmd_train(flags, hyper, out_path, curve_path, train_seed);
    if (render->parsed()) return cmd_render(flags, svg_path);
    if (maps->parsed()) return cmd_maps(flags, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
