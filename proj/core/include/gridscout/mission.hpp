#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridscout/grid_map.hpp"
#include "gridscout/map_gen.hpp"
#include "gridscout/planner.hpp"
#include "gridscout/policy.hpp"
#include "gridscout/reasoner.hpp"

namespace gridscout {

/// How the per-step move is chosen.
///  - guidepost_heuristic: prefer guidepost-flagged neighbors nearest the
///    guided waypoint, fall back to the highest-utility neighbor.
///  - learned: attention policy network (checkpoint or in-memory weights).
///  - greedy_frontier: baseline; neighbor minimizing geodesic hop distance
///    to the nearest frontier. Skips the slow loop entirely.
enum class PolicyMode { guidepost_heuristic, learned, greedy_frontier };

PolicyMode policy_mode_from_string(const std::string& name);
std::string to_string(PolicyMode mode);

struct MissionConfig {
  MapKind map_kind = MapKind::Indoor;
  unsigned long long map_seed = 1;
  int map_width = 64;   // cells
  int map_height = 64;  // cells
  double map_resolution = 0.4;

  double node_resolution = 1.2;
  double sensing_range = 4.0;
  int ray_count = 360;
  int knn = 6;
  double window_size = 9.6;  // local window side, 8 * node_resolution
  int k_top = 12;            // communities kept after pruning
  int replan_interval = 15;  // steps between forced global replans

  ReasonerConfig reasoner;
  PlannerWeights planner_weights;
  RewardConfig reward;

  PolicyMode policy = PolicyMode::guidepost_heuristic;
  SelectMode select = SelectMode::greedy;
  std::string checkpoint_path;  // learned mode: weights file, unless...
  const PolicyParameters* policy_params = nullptr;  // ...given directly

  int step_cap = 2000;
  unsigned long long rng_seed = 7;
};

struct StepRecord {
  int step = 0;
  Point pose{};                    // after the move
  int chosen_node = -1;            // graph node moved to
  std::optional<int> guided_node;  // w_t*, when a global path is active
  double deviation_raw = 0.0;
  double deviation = 0.0;  // clamped to [0, 1]
  double reward = 0.0;
  int newly_revealed = 0;
  int community_count = 0;
  int retained_count = 0;
  int node_count = 0;
  bool fallback_move = false;  // recovery step, not the configured policy
};

struct IssuedPath {
  int step = 0;
  std::vector<int> waypoints;  // community representatives, robot first
  std::vector<int> grounded;   // node-level path realizing the waypoints
  int target_community = -1;
  bool used_fallback = false;  // reasoner output rejected, rule planner used
  std::string reasoner;
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  std::vector<IssuedPath> paths;
  std::vector<Point> poses;  // start pose plus one entry per step
  double distance = 0.0;     // meters travelled
  int step_count = 0;
  double coverage = 0.0;  // fraction of reachable free cells known Free
  bool completed = false;
  bool aborted = false;
  std::string abort_reason;
};

/// Training hook: invoked after each learned-policy step with the features
/// the network saw and the index of the action taken.
struct PolicyStepView {
  const InformativeGraph& graph;
  int action_index = -1;  // into the neighbor distribution
  double reward = 0.0;
  bool done = false;
};
using PolicyStepObserver = std::function<void(const PolicyStepView&)>;

/// Run one exploration episode. Every executed move traverses an edge of
/// that step's collision-free graph. Throws std::invalid_argument on
/// unusable configs; unrecoverable runtime situations set `aborted` with a
/// diagnostic instead of throwing.
EpisodeLog run_episode(const MissionConfig& config,
                       const PolicyStepObserver& observer = {});

/// Line-delimited JSON: one meta record, then path records, then step
/// records. Byte-identical for identical episodes.
std::string episode_to_jsonl(const EpisodeLog& log, const MissionConfig& config);

struct BenchmarkConfig {
  std::string name;
  MissionConfig mission;
};

struct BenchmarkRow {
  std::string config_name;
  unsigned long long map_seed = 0;
  int steps = 0;
  double distance = 0.0;
  double coverage = 0.0;
  bool completed = false;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;  // ordered by (config, seed)
  std::string csv;  // one summary line per config, mean and std columns
};

/// Paired evaluation: every config runs the same seed set
/// (mission.map_seed + 0 .. repetitions-1). Results are merged into a fixed
/// (config, seed) order, so the output is independent of `workers`.
BenchmarkResult run_benchmark(const std::vector<BenchmarkConfig>& configs,
                              int repetitions, int workers);

struct RenderOptions {
  double cell_px = 8.0;   // pixels per map cell
  int precision = 2;      // decimals for coordinates
};

/// Deterministic SVG: map cells, one trajectory polyline with exactly one
/// vertex per pose (a lone marker when only the start pose exists), per-step
/// deviation-colored markers, and issued-waypoint crosses.
std::string render_trajectory_svg(const GroundTruthMap& map,
                                  const EpisodeLog& log,
                                  const RenderOptions& options = {});

}  // namespace gridscout
