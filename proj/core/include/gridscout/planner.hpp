#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridscout/community.hpp"
#include "gridscout/strategy.hpp"

namespace gridscout {

/// What the slow loop remembers across replans within one episode.
/// Communities are identified by their representative viewpoint id: lattice
/// ids are stable across steps, while dense community numbers are not.
struct EpisodeMemory {
  std::map<int, int> visit_counts;             // representative id -> visits
  std::set<int> dead_ends;                     // subset of visited
  std::vector<std::vector<int>> issued_paths;  // waypoint id sequences
  long long step_index = 0;
  std::set<long long> applied_events;          // idempotence keys

  friend bool operator==(const EpisodeMemory&, const EpisodeMemory&) = default;
};

struct MemoryEvent {
  enum class Type { entered_community, dead_end_detected, path_issued, step_tick };

  Type type = Type::step_tick;
  long long event_id = 0;          // replaying the same id is a no-op
  int community = -1;              // representative id, for the two community events
  std::vector<int> waypoints;      // for path_issued
};

/// Fold one event into the memory (value semantics). A dead-end report for a
/// never-visited community counts as a first visit so the dead-end set stays
/// inside the visited set.
EpisodeMemory update_memory(EpisodeMemory memory, const MemoryEvent& event);

/// Memory summary used in reasoner prompts and logs.
std::string to_json_string(const EpisodeMemory& memory);

/// Waypoint guidance from the slow loop. `waypoints` starts at the robot's
/// current graph node and continues through representative viewpoints of
/// communities on the way to `target_community`; `grounded` realizes the
/// same route as a node path in the full graph (consecutive entries are
/// graph edges), which is what the fast loop measures deviation against.
struct GlobalPath {
  std::vector<int> waypoints;
  std::vector<int> grounded;
  int target_community = -1;
  int target_representative = -1;

  friend bool operator==(const GlobalPath&, const GlobalPath&) = default;
};

/// Everything a planning backend sees. Pointers are non-owning snapshots
/// valid for the duration of the call.
struct PlanRequest {
  const GlobalBeliefGraph* global = nullptr;
  const CollisionFreeGraph* full = nullptr;
  ExplorationStrategy strategy;
  EpisodeMemory memory;
  // Representative id -> aggregate utility of its community the last time the
  // robot arrived there and uncovered nothing. Such a community is skipped as
  // a target until its claim outgrows the recorded bar; a phantom claim
  // (frontier visible, unknown space behind it unobservable) stays flat while
  // genuinely new frontier raises it, so every skip self-retracts.
  std::map<int, int> barren_claims;
  int current_node = -1;
  double map_width_m = 0.0;
  double map_height_m = 0.0;
};

/// Scoring constants for the rule-based planner. The strategy modulates
/// them: conservative energy doubles lambda_dist (aggressive halves it);
/// revisit avoid doubles lambda_revisit, allow zeroes it. The boundary bonus
/// applies under boundary-first coverage to communities whose centroid lies
/// within hull_margin_fraction of the map edge.
struct PlannerWeights {
  double lambda_dist = 0.5;
  double lambda_revisit = 2.0;
  double lambda_boundary = 4.0;
  double hull_margin_fraction = 0.2;
};

struct PlanResult {
  std::optional<GlobalPath> path;
  bool exploration_complete = false;  // no community has utility left
};

/// Rule-based planning backend: pick the community maximizing
///   score = aggregate_utility - lambda_dist * dist - lambda_revisit * visits
///           + boundary bonus,
/// ties toward smaller community id, then route to it. dist is the shortest
/// path length through the full graph from the current node to the
/// community's representative; candidates unreachable in the full graph are
/// skipped. Throws std::invalid_argument on a malformed request (missing
/// graphs or current node).
PlanResult plan_rule(const PlanRequest& request,
                     const PlannerWeights& weights = {});

/// Per-candidate score table (community id -> score), exposed for tests.
std::map<int, double> plan_rule_scores(const PlanRequest& request,
                                       const PlannerWeights& weights = {});

/// Dijkstra over full-graph edges weighted by Euclidean length. Returns the
/// node sequence from `from` to `to` inclusive, or empty when unreachable.
/// Deterministic: equal-length alternatives resolve toward smaller ids.
std::vector<int> shortest_path_nodes(const CollisionFreeGraph& graph, int from,
                                     int to);
double path_length_over_graph(const CollisionFreeGraph& graph,
                              const std::vector<int>& nodes);

/// Validate and ground an externally proposed waypoint sequence against the
/// request. On success fills a GlobalPath; on any violation (wrong start,
/// unknown ids, disconnected hops, exhausted target) returns std::nullopt
/// and appends one message per violation to `errors`.
std::optional<GlobalPath> ground_waypoints(const PlanRequest& request,
                                           const std::vector<int>& waypoints,
                                           std::vector<std::string>* errors);

}  // namespace gridscout
