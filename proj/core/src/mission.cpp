#include "gridscout/mission.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gridscout/community.hpp"

namespace gridscout {
namespace {

std::string env_description(MapKind kind) {
  switch (kind) {
    case MapKind::Indoor:
      return "modern indoor office building with long corridors, meeting "
             "rooms, and cubicle areas";
    case MapKind::Forest:
      return "outdoor forest environment with natural obstacles, trees, and "
             "uneven terrain";
    case MapKind::Warehouse:
      return "indoor warehouse composed of densely arranged box stacks "
             "forming narrow aisles";
    case MapKind::Custom:
      break;
  }
  return "unspecified environment";
}

void validate_config(const MissionConfig& c) {
  if (c.map_width < 16 || c.map_height < 16)
    throw std::invalid_argument("mission: map too small");
  if (c.map_resolution <= 0.0 || c.node_resolution < c.map_resolution)
    throw std::invalid_argument("mission: bad resolutions");
  if (c.window_size <= 2.0 * c.node_resolution)
    throw std::invalid_argument("mission: window too small");
  if (c.sensing_range <= 0.0 || c.ray_count < 8)
    throw std::invalid_argument("mission: bad sensor");
  if (c.knn < 1 || c.k_top < 1 || c.replan_interval < 1 || c.step_cap < 1)
    throw std::invalid_argument("mission: bad loop constants");
}

int nearest_node(const CollisionFreeGraph& graph, Point p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Viewpoint& v : graph.nodes) {
    const double d = distance(v.position, p);
    if (d < best_d) {
      best_d = d;
      best = v.id;
    }
  }
  return best;
}

bool segment_free(const OccupancyBelief& belief, Point a, Point b) {
  for (CellIndex c : supercover_cells(a, b, belief.resolution)) {
    if (!belief.in_bounds(c) || belief.at(c) != Belief::Free) return false;
  }
  return true;
}

// Degenerate-geometry escape: when the robot's node lost every edge, attach
// the shortest collision-free edge so the move rule (edges only) still holds.
bool connect_isolated(CollisionFreeGraph& graph, int current_id,
                      const OccupancyBelief& belief) {
  const Viewpoint* cur = graph.find(current_id);
  if (!cur) return false;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Viewpoint& v : graph.nodes) {
    if (v.id == current_id) continue;
    const double d = distance(v.position, cur->position);
    if (d < best_d && segment_free(belief, cur->position, v.position)) {
      best_d = d;
      best = v.id;
    }
  }
  if (best < 0) return false;
  GraphEdge e{std::min(current_id, best), std::max(current_id, best)};
  graph.edges.insert(std::upper_bound(graph.edges.begin(), graph.edges.end(), e),
                     e);
  return true;
}

// Hop distance from every believed-free cell to the nearest frontier cell
// (8-connected breadth-first search). INT_MAX marks unreachable.
// Baseline move: one hop along the node graph toward the nearest node still
// promising observation. Gradient descent on a cell-space frontier distance
// field can strand the walk at the edge of the currently connected subgraph
// (the field happily routes through free cells no viewpoint can reach), so
// the walk targets only what the graph itself can deliver. A node visited
// without uncovering anything records its utility as a bar in `barren`; it is
// skipped until the claim outgrows the bar, which a phantom claim never does.
// Ties resolve toward earlier BFS discovery, i.e. fewer hops then smaller id.
int pick_greedy_frontier(const CollisionFreeGraph& graph, int current_id,
                         const std::map<int, int>& barren) {
  std::map<int, int> parent{{current_id, current_id}};
  std::deque<int> queue{current_id};
  int target = -1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u != current_id && graph.find(u)->utility > 0) {
      const auto bar = barren.find(u);
      if (bar == barren.end() || graph.find(u)->utility > bar->second) {
        target = u;
        break;
      }
    }
    for (int n : graph.neighbors(u))
      if (parent.emplace(n, u).second) queue.push_back(n);
  }
  if (target < 0) return -1;
  int step = target;
  while (parent.at(step) != current_id) step = parent.at(step);
  return step;
}

// Guidepost-first heuristic over the network's own features: follow a
// guidepost neighbor toward the guided waypoint, otherwise chase utility.
int pick_heuristic(const InformativeGraph& info) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int idx : info.neighbor_indices) {
    const InfoNode& n = info.nodes[idx];
    if (n.g != 1.0) continue;
    const double d = (n.x - info.guide_dx) * (n.x - info.guide_dx) +
                     (n.y - info.guide_dy) * (n.y - info.guide_dy);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  if (best >= 0) return best;
  double best_u = 0.0;
  for (int idx : info.neighbor_indices) {
    if (info.nodes[idx].u > best_u) {
      best_u = info.nodes[idx].u;
      best = idx;
    }
  }
  if (best >= 0) return best;
  best_d = std::numeric_limits<double>::infinity();
  for (int idx : info.neighbor_indices) {
    const InfoNode& n = info.nodes[idx];
    const double d = (n.x - info.guide_dx) * (n.x - info.guide_dx) +
                     (n.y - info.guide_dy) * (n.y - info.guide_dy);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  return best;
}

nlohmann::json point_json(Point p) {
  return nlohmann::json{{"x", p.x}, {"y", p.y}};
}

}  // namespace

PolicyMode policy_mode_from_string(const std::string& name) {
  if (name == "heuristic" || name == "guidepost_heuristic")
    return PolicyMode::guidepost_heuristic;
  if (name == "learned") return PolicyMode::learned;
  if (name == "greedy" || name == "greedy_frontier")
    return PolicyMode::greedy_frontier;
  throw std::invalid_argument("unknown policy mode '" + name + "'");
}

std::string to_string(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::guidepost_heuristic: return "guidepost_heuristic";
    case PolicyMode::learned: return "learned";
    case PolicyMode::greedy_frontier: return "greedy_frontier";
  }
  return "unknown";
}

EpisodeLog run_episode(const MissionConfig& config,
                       const PolicyStepObserver& observer) {
  validate_config(config);
  EpisodeLog log;

  const GroundTruthMap truth =
      generate_map(config.map_kind, config.map_seed, config.map_width,
                   config.map_height, config.map_resolution);
  const CellIndex start_cell = default_start_cell(truth);
  Point pose = truth.cell_center(start_cell);

  OccupancyBelief belief = OccupancyBelief::unknown_like(truth);
  Rng rng(mix_seed(config.rng_seed, 0x6d697373u));
  GraphBuilder builder(config.node_resolution, config.knn, config.sensing_range);

  PolicyParameters loaded_params;
  const PolicyParameters* params = config.policy_params;
  if (config.policy == PolicyMode::learned && !params) {
    if (config.checkpoint_path.empty())
      throw std::invalid_argument("learned policy needs weights");
    loaded_params = load_checkpoint(config.checkpoint_path);
    params = &loaded_params;
  }

  const bool slow_loop = config.policy != PolicyMode::greedy_frontier;
  std::unique_ptr<Reasoner> reasoner;
  ExplorationStrategy strategy;
  if (slow_loop) {
    reasoner = make_reasoner(config.reasoner, config.planner_weights);
    const std::string description = env_description(config.map_kind);
    CharacterizeOutcome co = characterize(description, *reasoner);
    strategy = derive_strategy(co.characterization, description);
  }

  SenseResult sensed = sense_and_update(belief, truth, {pose},
                                        config.sensing_range, config.ray_count);
  FrontierSet frontiers = detect_frontiers(belief);

  {
    const CollisionFreeGraph& g0 =
        builder.update(belief, frontiers, sensed.revealed);
    const int snap = nearest_node(g0, pose);
    if (snap < 0 ||
        distance(g0.find(snap)->position, pose) > config.window_size / 2.0) {
      log.aborted = true;
      log.abort_reason = "no viewpoint near start";
      log.coverage = reachable_coverage(belief, truth, start_cell);
      return log;
    }
    pose = g0.find(snap)->position;
    sensed = sense_and_update(belief, truth, {pose}, config.sensing_range,
                              config.ray_count);
    frontiers = detect_frontiers(belief);
  }
  log.poses.push_back(pose);

  EpisodeMemory memory;
  long long next_event = 0;
  std::optional<GlobalPath> path;
  size_t cursor = 0;  // next grounded waypoint to reach
  // Node id -> utility when it was visited without uncovering anything; the
  // greedy walk skips such nodes until the claim grows past the bar.
  std::map<int, int> barren_nodes;
  // Same idea one level up, keyed by community representative and consumed
  // by the rule planner's target selection.
  std::map<int, int> barren_communities;
  int steps_since_plan = config.replan_interval;  // force an initial plan
  Partition partition;
  std::map<int, int> rep_of_community;
  int last_entered_rep = -1;
  double running_max_utility = 0.0;
  std::optional<Point> prev_pose;

  for (int step = 0; step < config.step_cap; ++step) {
    if (is_complete(belief, truth, start_cell)) {
      log.completed = true;
      break;
    }

    CollisionFreeGraph graph = builder.update(belief, frontiers, sensed.revealed);
    if (graph.nodes.empty()) {
      log.aborted = true;
      log.abort_reason = "viewpoint graph vanished";
      break;
    }
    const int current_id = nearest_node(graph, pose);
    if (graph.neighbors(current_id).empty() &&
        !connect_isolated(graph, current_id, belief)) {
      log.aborted = true;
      log.abort_reason = "current node isolated";
      break;
    }
    for (const Viewpoint& v : graph.nodes)
      running_max_utility = std::max(running_max_utility,
                                     static_cast<double>(v.utility));

    int chosen_id = -1;
    int action_index = -1;
    bool fallback_move = false;
    std::optional<int> guided_id;
    std::optional<InformativeGraph> info;

    if (slow_loop) {
      auto node_pos = [&](int id) { return graph.find(id)->position; };
      // Half the lattice pitch: adjacent nodes sit exactly node_resolution
      // apart, so a wider radius would consume waypoints the robot is merely
      // next to and exhaust paths one node before their observation payoff.
      auto advance = [&]() {
        while (path && cursor < path->grounded.size() &&
               graph.find(path->grounded[cursor]) &&
               distance(node_pos(path->grounded[cursor]), pose) <
                   config.node_resolution * 0.5)
          ++cursor;
      };
      advance();

      bool target_exhausted = false;
      if (path) {
        int remaining = 0;
        for (const Viewpoint& v : graph.nodes) {
          auto it = partition.assignment.find(v.id);
          if (it != partition.assignment.end() &&
              it->second == path->target_community)
            remaining += v.utility;
        }
        target_exhausted = remaining == 0;
      }
      bool guide_outside = false;
      if (path && cursor < path->grounded.size()) {
        const Viewpoint* w = graph.find(path->grounded[cursor]);
        guide_outside =
            !w || std::abs(w->position.x - pose.x) > config.window_size / 2.0 ||
            std::abs(w->position.y - pose.y) > config.window_size / 2.0;
      }
      const bool need_replan = !path || cursor >= path->grounded.size() ||
                               target_exhausted || guide_outside ||
                               steps_since_plan >= config.replan_interval;

      if (need_replan) {
        partition = detect_communities(graph);
        const int k = std::min(config.k_top, partition.community_count());
        const std::vector<int> retained =
            prune_topk(graph, partition, k, current_id);
        const GlobalBeliefGraph global =
            build_global_graph(graph, partition, retained);
        rep_of_community.clear();
        for (const GlobalNode& n : global.nodes)
          rep_of_community[n.community] = n.representative;

        PlanRequest request;
        request.global = &global;
        request.full = &graph;
        request.strategy = strategy;
        request.memory = memory;
        request.barren_claims = barren_communities;
        request.current_node = current_id;
        request.map_width_m = truth.width_m();
        request.map_height_m = truth.height_m();
        PlanOutcome outcome =
            plan_global_path(*reasoner, request, config.planner_weights);
        steps_since_plan = 0;
        if (outcome.path) {
          path = std::move(outcome.path);
          cursor = 0;
          advance();
          IssuedPath issued;
          issued.step = step;
          issued.waypoints = path->waypoints;
          issued.grounded = path->grounded;
          issued.target_community = path->target_community;
          issued.used_fallback = outcome.used_fallback;
          issued.reasoner = reasoner->name();
          log.paths.push_back(issued);
          MemoryEvent ev;
          ev.type = MemoryEvent::Type::path_issued;
          ev.event_id = next_event++;
          ev.waypoints = path->waypoints;
          memory = update_memory(std::move(memory), ev);
        } else {
          path.reset();
        }
      }

      if (path) {
        const size_t at = std::min(cursor, path->grounded.size() - 1);
        guided_id = path->grounded[at];
      }

      LocalGraph local;
      try {
        local = extract_local(graph, {pose}, config.window_size);
      } catch (const std::invalid_argument&) {
        log.aborted = true;
        log.abort_reason = "no local graph around robot";
        break;
      }

      GuidanceContext guidance;
      guidance.node_resolution = config.node_resolution;
      guidance.previous_position = prev_pose;
      if (path) {
        for (int id : path->grounded)
          if (const Viewpoint* v = graph.find(id))
            guidance.path_positions.push_back(v->position);
        guidance.next_waypoint = node_pos(*guided_id);
      }
      info = build_informative_graph(local, guidance, running_max_utility);

      if (info->neighbor_indices.empty()) {
        // window clipped every incident edge; step along any full-graph edge
        const std::vector<int> nbrs = graph.neighbors(current_id);
        chosen_id = nbrs.front();
        fallback_move = true;
      } else if (!path) {
        // nothing plannable but frontiers remain: greedy recovery step
        chosen_id = pick_greedy_frontier(graph, current_id, barren_nodes);
        if (chosen_id < 0) chosen_id = graph.neighbors(current_id).front();
        fallback_move = true;
      } else if (config.policy == PolicyMode::learned) {
        try {
          const PolicyDistribution dist = policy_forward(*info, *params);
          chosen_id = select_waypoint(dist, config.select,
                                      config.select == SelectMode::sample
                                          ? &rng
                                          : nullptr);
          for (size_t j = 0; j < dist.node_ids.size(); ++j)
            if (dist.node_ids[j] == chosen_id)
              action_index = static_cast<int>(j);
        } catch (const IsolatedNodeError&) {
          chosen_id = graph.neighbors(current_id).front();
          fallback_move = true;
        }
      } else {
        const int idx = pick_heuristic(*info);
        chosen_id = info->nodes[idx].id;
      }
    } else {
      chosen_id = pick_greedy_frontier(graph, current_id, barren_nodes);
      if (chosen_id < 0) {
        chosen_id = graph.neighbors(current_id).front();
        fallback_move = true;
      }
    }

    const Point chosen_pos = graph.find(chosen_id)->position;
    log.distance += distance(pose, chosen_pos);
    prev_pose = pose;
    pose = chosen_pos;

    const OccupancyBelief prev_belief = belief;
    sensed = sense_and_update(belief, truth, {pose}, config.sensing_range,
                              config.ray_count);
    frontiers = detect_frontiers(belief);
    const bool done = is_complete(belief, truth, start_cell);

    if (sensed.revealed.empty()) {
      const Viewpoint* here = graph.find(chosen_id);
      barren_nodes[chosen_id] = here ? here->utility : 0;
    }

    Deviation dev{};
    if (guided_id) {
      dev = deviation(chosen_pos, graph.find(*guided_id)->position,
                      config.node_resolution);
    }
    const double reward =
        step_reward(prev_belief, belief, dev.clamped, done, config.reward);

    if (slow_loop) {
      MemoryEvent tick;
      tick.type = MemoryEvent::Type::step_tick;
      tick.event_id = next_event++;
      memory = update_memory(std::move(memory), tick);

      auto comm = partition.assignment.find(chosen_id);
      if (comm != partition.assignment.end()) {
        auto rep = rep_of_community.find(comm->second);
        if (rep != rep_of_community.end() && rep->second != last_entered_rep) {
          MemoryEvent ev;
          ev.type = MemoryEvent::Type::entered_community;
          ev.event_id = next_event++;
          ev.community = rep->second;
          memory = update_memory(std::move(memory), ev);
          last_entered_rep = rep->second;
        }
        if (graph.neighbors(chosen_id).size() == 1 &&
            graph.find(chosen_id)->utility == 0) {
          auto rep2 = rep_of_community.find(comm->second);
          if (rep2 != rep_of_community.end()) {
            MemoryEvent ev;
            ev.type = MemoryEvent::Type::dead_end_detected;
            ev.event_id = next_event++;
            ev.community = rep2->second;
            memory = update_memory(std::move(memory), ev);
          }
        }
      }
      // Reaching the plan terminal without uncovering a single cell means the
      // promised observation never materialized (frontier visible, unknown
      // space behind it out of range). Record the claim level so the planner
      // stops re-issuing the same barren goal until the claim grows.
      if (path && chosen_id == path->grounded.back() &&
          sensed.revealed.empty()) {
        int claim = 0;
        for (const Viewpoint& v : graph.nodes) {
          auto it = partition.assignment.find(v.id);
          if (it != partition.assignment.end() &&
              it->second == path->target_community)
            claim += v.utility;
        }
        barren_communities[path->target_representative] = claim;
        MemoryEvent ev;
        ev.type = MemoryEvent::Type::dead_end_detected;
        ev.event_id = next_event++;
        ev.community = path->target_representative;
        memory = update_memory(std::move(memory), ev);
      }
    }

    if (observer && action_index >= 0)
      observer(PolicyStepView{*info, action_index, reward, done});

    StepRecord record;
    record.step = step;
    record.pose = pose;
    record.chosen_node = chosen_id;
    record.guided_node = guided_id;
    record.deviation_raw = dev.raw;
    record.deviation = dev.clamped;
    record.reward = reward;
    record.newly_revealed = static_cast<int>(sensed.revealed.size());
    record.community_count = partition.community_count();
    record.retained_count = static_cast<int>(rep_of_community.size());
    record.node_count = static_cast<int>(graph.nodes.size());
    record.fallback_move = fallback_move;
    log.steps.push_back(record);
    log.poses.push_back(pose);
    ++steps_since_plan;

    if (done) {
      log.completed = true;
      break;
    }
  }

  log.step_count = static_cast<int>(log.steps.size());
  log.coverage = reachable_coverage(belief, truth, start_cell);
  return log;
}

std::string episode_to_jsonl(const EpisodeLog& log,
                             const MissionConfig& config) {
  std::string out;
  nlohmann::json meta{{"type", "meta"},
                      {"map_kind", to_string(config.map_kind)},
                      {"map_seed", config.map_seed},
                      {"width", config.map_width},
                      {"height", config.map_height},
                      {"resolution", config.map_resolution},
                      {"policy", to_string(config.policy)},
                      {"steps", log.step_count},
                      {"distance", log.distance},
                      {"coverage", log.coverage},
                      {"completed", log.completed},
                      {"aborted", log.aborted},
                      {"abort_reason", log.abort_reason},
                      {"start", log.poses.empty()
                                    ? nlohmann::json(nullptr)
                                    : point_json(log.poses.front())}};
  out += meta.dump();
  out += '\n';
  for (const IssuedPath& p : log.paths) {
    nlohmann::json j{{"type", "path"},
                     {"step", p.step},
                     {"waypoints", p.waypoints},
                     {"grounded", p.grounded},
                     {"target_community", p.target_community},
                     {"used_fallback", p.used_fallback},
                     {"reasoner", p.reasoner}};
    out += j.dump();
    out += '\n';
  }
  for (const StepRecord& s : log.steps) {
    nlohmann::json j{{"type", "step"},
                     {"step", s.step},
                     {"x", s.pose.x},
                     {"y", s.pose.y},
                     {"node", s.chosen_node},
                     {"guided", s.guided_node ? nlohmann::json(*s.guided_node)
                                              : nlohmann::json(nullptr)},
                     {"deviation_raw", s.deviation_raw},
                     {"deviation", s.deviation},
                     {"reward", s.reward},
                     {"revealed", s.newly_revealed},
                     {"communities", s.community_count},
                     {"retained", s.retained_count},
                     {"nodes", s.node_count},
                     {"fallback", s.fallback_move}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

BenchmarkResult run_benchmark(const std::vector<BenchmarkConfig>& configs,
                              int repetitions, int workers) {
  if (configs.empty())
    throw std::invalid_argument("benchmark: no configurations");
  if (repetitions < 1 || workers < 1)
    throw std::invalid_argument("benchmark: bad repetition or worker count");

  const size_t jobs = configs.size() * static_cast<size_t>(repetitions);
  std::vector<BenchmarkRow> rows(jobs);
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= jobs) return;
      const size_t ci = i / repetitions;
      const int rep = static_cast<int>(i % repetitions);
      MissionConfig cfg = configs[ci].mission;
      cfg.map_seed += static_cast<unsigned long long>(rep);
      BenchmarkRow& row = rows[i];
      row.config_name = configs[ci].name;
      row.map_seed = cfg.map_seed;
      try {
        const EpisodeLog log = run_episode(cfg);
        row.steps = log.step_count;
        row.distance = log.distance;
        row.coverage = log.coverage;
        row.completed = log.completed;
      } catch (const std::exception&) {
        // a failed run scores zero; never let it take the pool down
      }
    }
  };
  const size_t thread_count = std::min<size_t>(workers, jobs);
  std::vector<std::thread> pool;
  for (size_t t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  BenchmarkResult result;
  result.rows = std::move(rows);
  std::string csv =
      "config,runs,completed,steps_mean,steps_std,distance_mean,"
      "distance_std,coverage_mean\n";
  auto fixed = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  for (size_t ci = 0; ci < configs.size(); ++ci) {
    const BenchmarkRow* base = result.rows.data() + ci * repetitions;
    const int n = repetitions;
    double mean_steps = 0.0, mean_dist = 0.0, mean_cov = 0.0;
    int completed = 0;
    for (int r = 0; r < n; ++r) {
      mean_steps += base[r].steps;
      mean_dist += base[r].distance;
      mean_cov += base[r].coverage;
      completed += base[r].completed ? 1 : 0;
    }
    mean_steps /= n;
    mean_dist /= n;
    mean_cov /= n;
    double var_steps = 0.0, var_dist = 0.0;
    if (n > 1) {
      for (int r = 0; r < n; ++r) {
        var_steps += (base[r].steps - mean_steps) * (base[r].steps - mean_steps);
        var_dist +=
            (base[r].distance - mean_dist) * (base[r].distance - mean_dist);
      }
      var_steps /= n - 1;
      var_dist /= n - 1;
    }
    csv += configs[ci].name + ',' + std::to_string(n) + ',' +
           std::to_string(completed) + ',' + fixed(mean_steps) + ',' +
           fixed(std::sqrt(var_steps)) + ',' + fixed(mean_dist) + ',' +
           fixed(std::sqrt(var_dist)) + ',' + fixed(mean_cov) + '\n';
  }
  result.csv = std::move(csv);
  return result;
}

}  // namespace gridscout
