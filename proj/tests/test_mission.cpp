#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "gridscout/mission.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace gridscout;

namespace {

MissionConfig base_config(MapKind kind, unsigned long long seed) {
  MissionConfig cfg;
  cfg.map_kind = kind;
  cfg.map_seed = seed;
  cfg.map_width = 48;
  cfg.map_height = 48;
  cfg.step_cap = 600;
  return cfg;
}

}  // namespace

TEST_CASE("episodes are deterministic down to the serialized bytes") {
  const MissionConfig cfg = base_config(MapKind::Warehouse, 21);
  const EpisodeLog a = run_episode(cfg);
  const EpisodeLog b = run_episode(cfg);
  CHECK_FALSE(a.aborted);
  CHECK(episode_to_jsonl(a, cfg) == episode_to_jsonl(b, cfg));
  CHECK(a.distance == b.distance);
  CHECK(a.step_count == b.step_count);
}

TEST_CASE("logged distance is exactly the trajectory path length") {
  const MissionConfig cfg = base_config(MapKind::Indoor, 3);
  const EpisodeLog log = run_episode(cfg);
  REQUIRE(log.poses.size() >= 2);
  std::vector<Pose> traj;
  for (const Point& p : log.poses) traj.push_back({p});
  CHECK(log.distance == path_length(traj));  // bitwise, not approximate
  CHECK(log.step_count == static_cast<int>(log.steps.size()));
  CHECK(log.poses.size() == log.steps.size() + 1);
}

TEST_CASE("every executed move crosses only truly free ground") {
  // Graph edges are built over believed-free cells and sensing is truthful,
  // so every traversed segment must be obstacle-free in ground truth.
  const MissionConfig cfg = base_config(MapKind::Warehouse, 8);
  const EpisodeLog log = run_episode(cfg);
  const GroundTruthMap truth = generate_map(
      cfg.map_kind, cfg.map_seed, cfg.map_width, cfg.map_height,
      cfg.map_resolution);
  REQUIRE(log.poses.size() >= 2);
  for (size_t i = 0; i + 1 < log.poses.size(); ++i) {
    for (const CellIndex& c : oracles::supercover_oracle(
             log.poses[i], log.poses[i + 1], cfg.map_resolution)) {
      CAPTURE(i);
      REQUIRE(truth.in_bounds(c));
      CHECK(truth.at(c) == Cell::Free);
    }
  }
  // Poses land on node-lattice centers and match the logged node ids.
  const int lattice_w = static_cast<int>(
      std::ceil(cfg.map_width * cfg.map_resolution / cfg.node_resolution));
  for (size_t s = 0; s < log.steps.size(); ++s) {
    const int id = log.steps[s].chosen_node;
    const Point expect{(id % lattice_w + 0.5) * cfg.node_resolution,
                       (id / lattice_w + 0.5) * cfg.node_resolution};
    CHECK(log.steps[s].pose.x == doctest::Approx(expect.x).epsilon(1e-12));
    CHECK(log.steps[s].pose.y == doctest::Approx(expect.y).epsilon(1e-12));
    CHECK(log.poses[s + 1].x == log.steps[s].pose.x);
    CHECK(log.poses[s + 1].y == log.steps[s].pose.y);
  }
}

TEST_CASE("exploration terminates with full reachable coverage") {
  for (MapKind kind : {MapKind::Indoor, MapKind::Forest, MapKind::Warehouse}) {
    const MissionConfig cfg = base_config(kind, 14);
    const EpisodeLog log = run_episode(cfg);
    CAPTURE(to_string(kind));
    CHECK_FALSE(log.aborted);
    CHECK(log.completed);
    CHECK(log.coverage == doctest::Approx(1.0));
    CHECK(log.step_count < cfg.step_cap);
    REQUIRE(!log.paths.empty());
    // Every issued path starts at the robot's node at issue time.
    for (const IssuedPath& p : log.paths) {
      CHECK(!p.waypoints.empty());
      CHECK(!p.grounded.empty());
      CHECK(p.waypoints.front() == p.grounded.front());
      CHECK(p.reasoner == "rule");
    }
  }
}

TEST_CASE("a step cap of one yields exactly one move") {
  MissionConfig cfg = base_config(MapKind::Indoor, 4);
  cfg.step_cap = 1;
  const EpisodeLog log = run_episode(cfg);
  CHECK(log.step_count == 1);
  CHECK(log.steps.size() == 1);
  CHECK(log.poses.size() == 2);
  CHECK_FALSE(log.completed);
}

TEST_CASE("the greedy baseline explores without a slow loop") {
  MissionConfig cfg = base_config(MapKind::Indoor, 6);
  cfg.policy = PolicyMode::greedy_frontier;
  const EpisodeLog log = run_episode(cfg);
  CHECK_FALSE(log.aborted);
  CHECK(log.completed);
  CHECK(log.paths.empty());  // no global guidance issued
  for (const StepRecord& s : log.steps) CHECK_FALSE(s.guided_node.has_value());
}

TEST_CASE("guided runs follow the instruction closely on corridor maps") {
  for (unsigned long long seed : {1ull, 2ull, 3ull}) {
    MissionConfig cfg = base_config(MapKind::Indoor, seed);
    cfg.map_width = 64;
    cfg.map_height = 64;
    cfg.step_cap = 1200;
    const EpisodeLog log = run_episode(cfg);
    CAPTURE(seed);
    CHECK_FALSE(log.aborted);
    double dev_sum = 0.0;
    int dev_count = 0;
    for (const StepRecord& s : log.steps)
      if (s.guided_node.has_value() && !s.fallback_move) {
        dev_sum += s.deviation;
        ++dev_count;
      }
    REQUIRE(dev_count > 0);
    CHECK(dev_sum / dev_count < 0.5);
  }
}

TEST_CASE("episode logs serialize as meta, paths, then steps") {
  const MissionConfig cfg = base_config(MapKind::Warehouse, 21);
  const EpisodeLog log = run_episode(cfg);
  const std::string jsonl = episode_to_jsonl(log, cfg);

  std::istringstream in(jsonl);
  std::string line;
  size_t lines = 0;
  size_t meta = 0, paths = 0, steps = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string record = j.at("type").get<std::string>();
    if (record == "meta") {
      ++meta;
      CHECK(lines == 0);  // meta leads
      CHECK(j.at("map_kind") == "warehouse");
      CHECK(j.at("policy") == "guidepost_heuristic");
      CHECK(j.at("completed") == log.completed);
      CHECK(j.at("steps") == log.step_count);
    } else if (record == "path") {
      ++paths;
      CHECK(steps == 0);  // never after a step record
    } else {
      CHECK(record == "step");
      ++steps;
    }
    ++lines;
  }
  CHECK(meta == 1);
  CHECK(paths == log.paths.size());
  CHECK(steps == log.steps.size());
}

TEST_CASE("benchmark statistics are invariant to workers and ordering") {
  std::vector<BenchmarkConfig> configs;
  BenchmarkConfig guided{"guided", base_config(MapKind::Warehouse, 31)};
  guided.mission.step_cap = 400;
  BenchmarkConfig greedy{"greedy", base_config(MapKind::Warehouse, 31)};
  greedy.mission.policy = PolicyMode::greedy_frontier;
  greedy.mission.step_cap = 400;
  configs = {guided, greedy};

  const BenchmarkResult serial = run_benchmark(configs, 3, 1);
  const BenchmarkResult parallel = run_benchmark(configs, 3, 4);
  REQUIRE(serial.rows.size() == 6);
  REQUIRE(parallel.rows.size() == 6);
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].config_name == parallel.rows[i].config_name);
    CHECK(serial.rows[i].map_seed == parallel.rows[i].map_seed);
    CHECK(serial.rows[i].steps == parallel.rows[i].steps);
    CHECK(serial.rows[i].distance == parallel.rows[i].distance);
    CHECK(serial.rows[i].coverage == parallel.rows[i].coverage);
  }
  CHECK(serial.csv == parallel.csv);

  // Listing the configs in the other order permutes lines, nothing else.
  const BenchmarkResult flipped = run_benchmark({greedy, guided}, 3, 2);
  std::set<std::string> a, b;
  std::istringstream sa(serial.csv), sb(flipped.csv);
  std::string line;
  std::getline(sa, line);
  std::string header_a = line;
  std::getline(sb, line);
  CHECK(header_a == line);
  while (std::getline(sa, line)) a.insert(line);
  while (std::getline(sb, line)) b.insert(line);
  CHECK(a == b);

  // Paired seeds: both configs ran the same maps.
  for (int r = 0; r < 3; ++r) {
    CHECK(serial.rows[r].map_seed == serial.rows[3 + r].map_seed);
  }

  // A single repetition has zero sample deviation.
  const BenchmarkResult single = run_benchmark({guided}, 1, 1);
  CHECK(single.csv.find(",0.0000,") != std::string::npos);

  CHECK_THROWS_AS(run_benchmark({}, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_benchmark({guided}, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_benchmark({guided}, 1, 0), std::invalid_argument);
}

TEST_CASE("trajectory SVG has one polyline vertex per pose") {
  const MissionConfig cfg = base_config(MapKind::Indoor, 9);
  const EpisodeLog log = run_episode(cfg);
  const GroundTruthMap truth = generate_map(
      cfg.map_kind, cfg.map_seed, cfg.map_width, cfg.map_height,
      cfg.map_resolution);
  const std::string svg = render_trajectory_svg(truth, log);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  const auto start = svg.find("<polyline");
  REQUIRE(start != std::string::npos);
  const auto points_at = svg.find("points=\"", start);
  REQUIRE(points_at != std::string::npos);
  const auto points_end = svg.find('"', points_at + 8);
  const std::string points = svg.substr(points_at + 8, points_end - points_at - 8);
  size_t vertices = 1;
  for (char c : points)
    if (c == ' ') ++vertices;
  CHECK(vertices == log.poses.size());
  // Rendering the same episode twice is byte-identical.
  CHECK(render_trajectory_svg(truth, log) == svg);

  // A single-pose log renders a start marker and no polyline.
  EpisodeLog lone;
  lone.poses = {log.poses[0]};
  const std::string mark = render_trajectory_svg(truth, lone);
  CHECK(mark.find("<polyline") == std::string::npos);
  CHECK(mark.find("<circle") != std::string::npos);
}

TEST_CASE("configuration validation rejects unusable setups") {
  MissionConfig cfg = base_config(MapKind::Indoor, 1);
  cfg.map_width = 8;
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);
  cfg = base_config(MapKind::Indoor, 1);
  cfg.window_size = 2.0;  // must exceed twice the node pitch
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);
  cfg = base_config(MapKind::Indoor, 1);
  cfg.policy = PolicyMode::learned;  // no weights supplied
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);
  cfg = base_config(MapKind::Indoor, 1);
  cfg.ray_count = 4;
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  CHECK(policy_mode_from_string("learned") == PolicyMode::learned);
  CHECK(to_string(PolicyMode::greedy_frontier) == "greedy_frontier");
  CHECK_THROWS_AS(policy_mode_from_string("psychic"), std::invalid_argument);
}
