#include "gridscout/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace gridscout {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DijkstraResult {
  std::map<int, double> dist;
  std::map<int, int> parent;
};

DijkstraResult dijkstra(const CollisionFreeGraph& graph, int src) {
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (const GraphEdge& e : graph.edges) {
    const double w =
        distance(graph.find(e.a)->position, graph.find(e.b)->position);
    adj[e.a].emplace_back(e.b, w);
    adj[e.b].emplace_back(e.a, w);
  }
  DijkstraResult out;
  // (dist, id) keys make pop order, and therefore tie resolution,
  // deterministic.
  std::priority_queue<std::pair<double, int>,
                      std::vector<std::pair<double, int>>, std::greater<>>
      pq;
  out.dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > out.dist.at(u)) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      auto it = out.dist.find(v);
      if (it == out.dist.end() || nd < it->second) {
        out.dist[v] = nd;
        out.parent[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  return out;
}

std::vector<int> extract_path(const DijkstraResult& r, int src, int dst) {
  if (!r.dist.count(dst)) return {};
  std::vector<int> path{dst};
  int cur = dst;
  while (cur != src) {
    cur = r.parent.at(cur);
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Shortest community sequence through the global graph by edge weight.
std::vector<int> global_route(const GlobalBeliefGraph& global, int from,
                              int to) {
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (const GlobalEdge& e : global.edges) {
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  std::map<int, double> dist;
  std::map<int, int> parent;
  std::priority_queue<std::pair<double, int>,
                      std::vector<std::pair<double, int>>, std::greater<>>
      pq;
  dist[from] = 0.0;
  pq.emplace(0.0, from);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist.at(u)) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      auto it = dist.find(v);
      if (it == dist.end() || nd < it->second) {
        dist[v] = nd;
        parent[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  if (!dist.count(to)) return {};
  std::vector<int> path{to};
  int cur = to;
  while (cur != from) {
    cur = parent.at(cur);
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Concatenate full-graph shortest paths through the waypoint sequence.
// Empty result = some hop is unreachable.
std::vector<int> ground_sequence(const CollisionFreeGraph& full,
                                 const std::vector<int>& waypoints) {
  std::vector<int> grounded;
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const std::vector<int> seg =
        shortest_path_nodes(full, waypoints[i], waypoints[i + 1]);
    if (seg.empty()) return {};
    if (grounded.empty()) grounded = seg;
    else grounded.insert(grounded.end(), seg.begin() + 1, seg.end());
  }
  if (grounded.empty() && waypoints.size() == 1) grounded = waypoints;
  return grounded;
}

// Concatenated segments can retrace a corridor (out to a waypoint and back),
// and a second traversal of a node reveals nothing new. Cut every cycle by
// truncating back to the first occurrence of a repeated node; adjacency is
// preserved because the successor of the duplicate was adjacent to it.
void erase_loops(std::vector<int>& path) {
  std::vector<int> out;
  std::map<int, size_t> seen;
  for (int node : path) {
    const auto it = seen.find(node);
    if (it != seen.end()) {
      while (out.size() > it->second + 1) {
        seen.erase(out.back());
        out.pop_back();
      }
      continue;
    }
    seen[node] = out.size();
    out.push_back(node);
  }
  path = std::move(out);
}

// A representative is the member nearest the community centroid, which is
// often a long-sensed node with nothing left to observe. A path that stops
// there stalls the mission: the robot arrives, reveals nothing, and the
// community keeps its utility. Extend the grounded path from the terminal
// node to the nearest member that still observes frontiers (ties toward the
// smaller id). Returns false when no such member is reachable.
bool extend_to_utility(const CollisionFreeGraph& full, const GlobalNode& target,
                       std::vector<int>& grounded) {
  if (grounded.empty()) return false;
  const int terminal = grounded.back();
  const Viewpoint* t = full.find(terminal);
  if (t && t->utility > 0) {
    erase_loops(grounded);
    return true;
  }

  const DijkstraResult from_terminal = dijkstra(full, terminal);
  // Prefer the member promising the most observation; a low-utility member
  // often sees a handful of frontier cells from max range without uncovering
  // anything new, which would leave the community's utility standing.
  int best = -1;
  int best_utility = 0;
  double best_dist = kInf;
  for (int member : target.members) {
    const Viewpoint* v = full.find(member);
    if (!v || v->utility <= 0) continue;
    auto it = from_terminal.dist.find(member);
    if (it == from_terminal.dist.end()) continue;
    const bool better =
        v->utility > best_utility ||
        (v->utility == best_utility &&
         (it->second < best_dist ||
          (it->second == best_dist && member < best)));
    if (better) {
      best = member;
      best_utility = v->utility;
      best_dist = it->second;
    }
  }
  if (best < 0) return false;
  const std::vector<int> tail = extract_path(from_terminal, terminal, best);
  grounded.insert(grounded.end(), tail.begin() + 1, tail.end());
  erase_loops(grounded);
  return true;
}

void validate_request(const PlanRequest& request) {
  if (!request.global || !request.full)
    throw std::invalid_argument("plan: missing graph snapshots");
  if (request.global->nodes.empty())
    throw std::invalid_argument("plan: empty global graph");
  if (!request.full->find(request.current_node))
    throw std::invalid_argument("plan: current node not in graph");
}

const GlobalNode* community_of_node(const GlobalBeliefGraph& global, int node) {
  for (const GlobalNode& c : global.nodes)
    if (std::binary_search(c.members.begin(), c.members.end(), node)) return &c;
  return nullptr;
}

}  // namespace

EpisodeMemory update_memory(EpisodeMemory memory, const MemoryEvent& event) {
  if (!memory.applied_events.insert(event.event_id).second) return memory;
  switch (event.type) {
    case MemoryEvent::Type::entered_community:
      memory.visit_counts[event.community] += 1;
      break;
    case MemoryEvent::Type::dead_end_detected:
      // A dead-end report implies a visit, and repeats keep charging it so a
      // community that never pays out loses the score race eventually.
      memory.visit_counts[event.community] += 1;
      memory.dead_ends.insert(event.community);
      break;
    case MemoryEvent::Type::path_issued:
      memory.issued_paths.push_back(event.waypoints);
      break;
    case MemoryEvent::Type::step_tick:
      memory.step_index += 1;
      break;
  }
  return memory;
}

std::string to_json_string(const EpisodeMemory& memory) {
  nlohmann::json j;
  j["visits"] = nlohmann::json::object();
  for (const auto& [community, count] : memory.visit_counts)
    j["visits"][std::to_string(community)] = count;
  j["dead_ends"] = memory.dead_ends;
  j["issued_paths"] = memory.issued_paths;
  j["step"] = memory.step_index;
  return j.dump();
}

std::vector<int> shortest_path_nodes(const CollisionFreeGraph& graph, int from,
                                     int to) {
  if (!graph.find(from) || !graph.find(to))
    throw std::invalid_argument("shortest_path_nodes: unknown endpoint");
  if (from == to) return {from};
  return extract_path(dijkstra(graph, from), from, to);
}

double path_length_over_graph(const CollisionFreeGraph& graph,
                              const std::vector<int>& nodes) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Viewpoint* a = graph.find(nodes[i]);
    const Viewpoint* b = graph.find(nodes[i + 1]);
    if (!a || !b)
      throw std::invalid_argument("path_length_over_graph: unknown node");
    total += distance(a->position, b->position);
  }
  return total;
}

std::map<int, double> plan_rule_scores(const PlanRequest& request,
                                       const PlannerWeights& weights) {
  validate_request(request);
  double lambda_dist = weights.lambda_dist;
  double lambda_revisit = weights.lambda_revisit;
  switch (request.strategy.energy_policy) {
    case EnergyPolicy::conservative: lambda_dist *= 2.0; break;
    case EnergyPolicy::aggressive: lambda_dist *= 0.5; break;
    case EnergyPolicy::moderate: break;
  }
  switch (request.strategy.revisit_policy) {
    case RevisitPolicy::avoid: lambda_revisit *= 2.0; break;
    case RevisitPolicy::allow: lambda_revisit = 0.0; break;
    case RevisitPolicy::minimize: break;
  }
  const bool boundary_first =
      request.strategy.coverage_strategy == CoverageStrategy::boundary_first;
  const double hull_margin = weights.hull_margin_fraction *
                             std::min(request.map_width_m, request.map_height_m);

  const DijkstraResult from_cur = dijkstra(*request.full, request.current_node);
  std::map<int, double> scores;
  for (const GlobalNode& c : request.global->nodes) {
    auto dist_it = from_cur.dist.find(c.representative);
    if (dist_it == from_cur.dist.end()) {
      scores[c.community] = -kInf;  // unreachable through the graph
      continue;
    }
    double score = static_cast<double>(c.aggregate_utility);
    score -= lambda_dist * dist_it->second;
    auto visit_it = request.memory.visit_counts.find(c.representative);
    if (visit_it != request.memory.visit_counts.end())
      score -= lambda_revisit * visit_it->second;
    if (boundary_first) {
      const double hull_dist =
          std::min(std::min(c.centroid.x, request.map_width_m - c.centroid.x),
                   std::min(c.centroid.y, request.map_height_m - c.centroid.y));
      if (hull_dist <= hull_margin) score += weights.lambda_boundary;
    }
    scores[c.community] = score;
  }
  return scores;
}

PlanResult plan_rule(const PlanRequest& request, const PlannerWeights& weights) {
  const std::map<int, double> scores = plan_rule_scores(request, weights);

  std::vector<const GlobalNode*> candidates;
  for (const GlobalNode& c : request.global->nodes)
    if (c.aggregate_utility > 0) candidates.push_back(&c);
  if (candidates.empty()) return {std::nullopt, true};

  std::sort(candidates.begin(), candidates.end(),
            [&](const GlobalNode* a, const GlobalNode* b) {
              const double sa = scores.at(a->community);
              const double sb = scores.at(b->community);
              if (sa != sb) return sa > sb;
              return a->community < b->community;
            });

  const GlobalNode* robot_comm =
      community_of_node(*request.global, request.current_node);
  for (const GlobalNode* target : candidates) {
    if (scores.at(target->community) == -kInf) continue;
    // A barren community repeats the same empty trip until its claim grows.
    const auto bar = request.barren_claims.find(target->representative);
    if (bar != request.barren_claims.end() &&
        target->aggregate_utility <= bar->second)
      continue;

    std::vector<int> waypoints{request.current_node};
    if (robot_comm && robot_comm->community != target->community) {
      const std::vector<int> route =
          global_route(*request.global, robot_comm->community, target->community);
      // Skip the robot's own community; it is already standing in it.
      for (size_t i = 1; i < route.size(); ++i)
        waypoints.push_back(request.global->find(route[i])->representative);
    }
    if (waypoints.back() != target->representative)
      waypoints.push_back(target->representative);
    waypoints.erase(std::unique(waypoints.begin(), waypoints.end()),
                    waypoints.end());

    std::vector<int> grounded = ground_sequence(*request.full, waypoints);
    if (grounded.empty()) {
      // The community route may be severed in the full graph; try the
      // direct hop before giving up on this target.
      std::vector<int> direct{request.current_node, target->representative};
      direct.erase(std::unique(direct.begin(), direct.end()), direct.end());
      grounded = ground_sequence(*request.full, direct);
      if (grounded.empty()) continue;
      waypoints = std::move(direct);
    }
    if (!extend_to_utility(*request.full, *target, grounded)) continue;

    GlobalPath path;
    path.waypoints = std::move(waypoints);
    path.grounded = std::move(grounded);
    path.target_community = target->community;
    path.target_representative = target->representative;
    return {std::move(path), false};
  }
  // Utility exists somewhere but nothing is reachable; the caller decides
  // how to recover (this is not completion).
  return {std::nullopt, false};
}

std::optional<GlobalPath> ground_waypoints(const PlanRequest& request,
                                           const std::vector<int>& waypoints,
                                           std::vector<std::string>* errors) {
  validate_request(request);
  auto fail = [&](const std::string& msg) {
    if (errors) errors->push_back(msg);
  };
  if (waypoints.empty()) {
    fail("empty waypoint sequence");
    return std::nullopt;
  }
  if (waypoints.front() != request.current_node) {
    fail("path does not start at the current node");
    return std::nullopt;
  }
  bool ok = true;
  for (int id : waypoints)
    if (!request.full->find(id)) {
      fail("unknown waypoint id " + std::to_string(id));
      ok = false;
    }
  if (!ok) return std::nullopt;

  const int terminal = waypoints.back();
  const GlobalNode* target = nullptr;
  for (const GlobalNode& c : request.global->nodes)
    if (c.representative == terminal) target = &c;
  if (!target) target = community_of_node(*request.global, terminal);
  if (!target) {
    fail("terminal waypoint outside the global graph");
    return std::nullopt;
  }
  if (target->aggregate_utility <= 0) {
    fail("terminal community has no utility left");
    return std::nullopt;
  }
  std::vector<int> grounded = ground_sequence(*request.full, waypoints);
  if (grounded.empty()) {
    fail("waypoint sequence is disconnected");
    return std::nullopt;
  }
  if (!extend_to_utility(*request.full, *target, grounded)) {
    fail("no reachable frontier-observing node in the terminal community");
    return std::nullopt;
  }
  GlobalPath path;
  path.waypoints = waypoints;
  path.grounded = std::move(grounded);
  path.target_community = target->community;
  path.target_representative = target->representative;
  return path;
}

}  // namespace gridscout
