#include "gridscout/community.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace gridscout {
namespace {

constexpr double kGainTol = 1e-12;

// Working graph for the local-move/aggregate loop: contiguous indices,
// weighted adjacency (aggregation introduces weights and self-loops even
// though the input is unweighted).
struct WorkGraph {
  int n = 0;
  double total_weight = 0.0;  // m: each edge once, self-loops once
  std::vector<std::vector<std::pair<int, double>>> adj;  // excludes self-loops
  std::vector<double> self_loop;
  std::vector<double> degree;  // self-loops count twice

  void finish_degrees() {
    degree.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (const auto& [j, w] : adj[i]) degree[i] += w;
      degree[i] += 2.0 * self_loop[i];
    }
  }
};

// One sweep-to-convergence of single-node moves. Returns the community label
// per node (labels arbitrary, renumbered by the caller) and whether any move
// was accepted.
bool local_moves(const WorkGraph& g, std::vector<int>& comm) {
  std::vector<double> comm_tot(g.n, 0.0);
  int next_label = g.n;
  comm_tot.resize(2 * g.n + 1, 0.0);
  for (int i = 0; i < g.n; ++i) comm_tot[comm[i]] += g.degree[i];

  const double m = g.total_weight;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int i = 0; i < g.n; ++i) {
      const int old_c = comm[i];
      comm_tot[old_c] -= g.degree[i];

      // Weight from i into each candidate community.
      std::unordered_map<int, double> k_in;
      k_in[old_c];  // ensure the old community is a candidate
      for (const auto& [j, w] : g.adj[i]) k_in[comm[j]] += w;

      auto insert_gain = [&](int c, double kin) {
        return kin / m - comm_tot[c] * g.degree[i] / (2.0 * m * m);
      };
      const double stay_gain = insert_gain(old_c, k_in[old_c]);

      // Baseline candidate: a fresh singleton community (gain 0).
      double best_gain = 0.0;
      int best_c = -1;
      std::vector<std::pair<int, double>> cands(k_in.begin(), k_in.end());
      std::sort(cands.begin(), cands.end());
      for (const auto& [c, kin] : cands) {
        const double gain = insert_gain(c, kin);
        if (gain > best_gain + kGainTol) {
          best_gain = gain;
          best_c = c;
        }
      }

      int target = old_c;
      if (best_gain > stay_gain + kGainTol) {
        if (best_c == -1) {
          if (static_cast<size_t>(next_label) >= comm_tot.size())
            comm_tot.resize(next_label + 1, 0.0);
          target = next_label++;
        } else {
          target = best_c;
        }
      }
      comm[i] = target;
      comm_tot[target] += g.degree[i];
      if (target != old_c) {
        moved = true;
        any_move = true;
      }
    }
  }
  return any_move;
}

// Relabel communities 0.. in order of first appearance (node index order),
// so community 0 always contains the smallest node id.
void renumber_dense(std::vector<int>& comm) {
  std::map<int, int> remap;
  int next = 0;
  for (int c : comm)
    if (remap.emplace(c, next).second) ++next;
  for (int& c : comm) c = remap[c];
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<int>& comm,
                    int community_count) {
  WorkGraph out;
  out.n = community_count;
  out.adj.assign(out.n, {});
  out.self_loop.assign(out.n, 0.0);
  std::map<std::pair<int, int>, double> acc;
  for (int i = 0; i < g.n; ++i) {
    out.self_loop[comm[i]] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (j < i) continue;  // each undirected edge once
      const int a = comm[i];
      const int b = comm[j];
      if (a == b) out.self_loop[a] += w;
      else acc[{std::min(a, b), std::max(a, b)}] += w;
    }
  }
  for (const auto& [key, w] : acc) {
    out.adj[key.first].emplace_back(key.second, w);
    out.adj[key.second].emplace_back(key.first, w);
  }
  for (auto& nbrs : out.adj) std::sort(nbrs.begin(), nbrs.end());
  out.total_weight = g.total_weight;
  out.finish_degrees();
  return out;
}

std::vector<CommunityScore> all_scores(const CollisionFreeGraph& graph,
                                       const Partition& partition) {
  if (graph.edges.empty())
    throw std::invalid_argument("modularity: graph has no edges");
  for (const Viewpoint& v : graph.nodes)
    if (!partition.assignment.count(v.id))
      throw std::invalid_argument("modularity: partition not total");

  std::map<int, double> degree;
  for (const GraphEdge& e : graph.edges) {
    degree[e.a] += 1.0;
    degree[e.b] += 1.0;
  }
  const int m = static_cast<int>(graph.edges.size());
  std::map<int, CommunityScore> scores;
  for (const auto& [node, c] : partition.assignment) {
    CommunityScore& s = scores[c];
    s.community = c;
    s.edge_count = m;
    auto it = degree.find(node);
    if (it != degree.end()) s.sigma_tot += it->second;
  }
  for (const GraphEdge& e : graph.edges) {
    const int ca = partition.assignment.at(e.a);
    const int cb = partition.assignment.at(e.b);
    if (ca == cb) scores[ca].sigma_in += 2.0;
  }
  std::vector<CommunityScore> out;
  for (auto& [c, s] : scores) {
    s.q = s.sigma_in - s.sigma_tot * s.sigma_tot / (2.0 * m);
    out.push_back(s);
  }
  return out;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

int Partition::community_count() const {
  std::set<int> ids;
  for (const auto& [node, c] : assignment) ids.insert(c);
  return static_cast<int>(ids.size());
}

std::vector<int> Partition::community_ids() const {
  std::set<int> ids;
  for (const auto& [node, c] : assignment) ids.insert(c);
  return {ids.begin(), ids.end()};
}

std::vector<int> Partition::members(int community) const {
  std::vector<int> out;
  for (const auto& [node, c] : assignment)
    if (c == community) out.push_back(node);
  return out;
}

Partition detect_communities(const CollisionFreeGraph& graph) {
  if (graph.nodes.empty())
    throw std::invalid_argument("detect_communities: empty graph");

  const int n = static_cast<int>(graph.nodes.size());
  std::map<int, int> index_of_id;
  for (int i = 0; i < n; ++i) index_of_id[graph.nodes[i].id] = i;

  WorkGraph g;
  g.n = n;
  g.adj.assign(n, {});
  g.self_loop.assign(n, 0.0);
  for (const GraphEdge& e : graph.edges) {
    const int a = index_of_id.at(e.a);
    const int b = index_of_id.at(e.b);
    g.adj[a].emplace_back(b, 1.0);
    g.adj[b].emplace_back(a, 1.0);
    g.total_weight += 1.0;
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  g.finish_degrees();

  // node index -> community label at the finest level
  std::vector<int> node_comm(n);
  for (int i = 0; i < n; ++i) node_comm[i] = i;

  if (g.total_weight > 0.0) {
    WorkGraph level = g;
    std::vector<int> level_map(n);  // node -> super-node index
    for (int i = 0; i < n; ++i) level_map[i] = i;
    while (true) {
      std::vector<int> comm(level.n);
      for (int i = 0; i < level.n; ++i) comm[i] = i;
      const bool improved = local_moves(level, comm);
      if (!improved) break;
      renumber_dense(comm);
      int count = 0;
      for (int c : comm) count = std::max(count, c + 1);
      for (int i = 0; i < n; ++i) level_map[i] = comm[level_map[i]];
      if (count == level.n) break;
      level = aggregate(level, comm, count);
    }
    node_comm = level_map;
  }

  renumber_dense(node_comm);
  Partition p;
  for (int i = 0; i < n; ++i) p.assignment[graph.nodes[i].id] = node_comm[i];
  return p;
}

double modularity(const CollisionFreeGraph& graph, const Partition& partition) {
  const auto scores = all_scores(graph, partition);
  const double two_m = 2.0 * static_cast<double>(graph.edges.size());
  double q = 0.0;
  for (const CommunityScore& s : scores) q += s.q;
  return q / two_m;
}

CommunityScore community_modularity(const CollisionFreeGraph& graph,
                                    const Partition& partition, int community) {
  for (const CommunityScore& s : all_scores(graph, partition))
    if (s.community == community) return s;
  throw std::invalid_argument("community_modularity: unknown community id");
}

std::vector<int> prune_topk(const CollisionFreeGraph& graph,
                            const Partition& partition, int k_top,
                            int robot_node_id) {
  if (k_top < 1) throw std::invalid_argument("prune_topk: k_top must be >= 1");

  struct Entry {
    int community;
    double q;
    long long utility;
    bool forced;
  };
  std::map<int, long long> agg_utility;
  std::map<int, bool> has_frontier;
  for (const Viewpoint& v : graph.nodes) {
    const int c = partition.assignment.at(v.id);
    agg_utility[c] += v.utility;
    if (v.utility > 0) has_frontier[c] = true;
  }
  std::map<int, double> q_of;
  if (!graph.edges.empty())
    for (const CommunityScore& s : all_scores(graph, partition))
      q_of[s.community] = s.q;

  int robot_comm = -1;
  if (robot_node_id >= 0) {
    auto it = partition.assignment.find(robot_node_id);
    if (it != partition.assignment.end()) robot_comm = it->second;
  }

  std::vector<Entry> entries;
  for (int c : partition.community_ids()) {
    const bool forced = c == robot_comm || has_frontier.count(c);
    entries.push_back({c, q_of.count(c) ? q_of[c] : 0.0, agg_utility[c], forced});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.q != b.q) return a.q > b.q;
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.community < b.community;
  });

  std::set<int> retained;
  for (size_t i = 0; i < entries.size() && i < static_cast<size_t>(k_top); ++i)
    retained.insert(entries[i].community);
  for (const Entry& e : entries)
    if (e.forced) retained.insert(e.community);
  return {retained.begin(), retained.end()};
}

const GlobalNode* GlobalBeliefGraph::find(int community) const {
  for (const GlobalNode& n : nodes)
    if (n.community == community) return &n;
  return nullptr;
}

std::vector<int> GlobalBeliefGraph::neighbors(int community) const {
  std::vector<int> out;
  for (const GlobalEdge& e : edges) {
    if (e.a == community) out.push_back(e.b);
    else if (e.b == community) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GlobalBeliefGraph build_global_graph(const CollisionFreeGraph& graph,
                                     const Partition& partition,
                                     const std::vector<int>& retained) {
  if (retained.empty())
    throw std::invalid_argument("build_global_graph: no retained communities");
  std::set<int> keep(retained.begin(), retained.end());
  const auto known = partition.community_ids();
  for (int c : keep)
    if (!std::binary_search(known.begin(), known.end(), c))
      throw std::invalid_argument("build_global_graph: unknown community id");

  GlobalBeliefGraph out;
  for (int c : keep) {
    GlobalNode node;
    node.community = c;
    node.members = partition.members(c);
    Point sum{0.0, 0.0};
    for (int id : node.members) {
      const Viewpoint* v = graph.find(id);
      sum = sum + v->position;
      node.aggregate_utility += v->utility;
    }
    node.centroid = {sum.x / node.members.size(), sum.y / node.members.size()};
    double best = std::numeric_limits<double>::infinity();
    for (int id : node.members) {
      const double d = distance(graph.find(id)->position, node.centroid);
      if (d < best) {
        best = d;
        node.representative = id;
      }
    }
    out.nodes.push_back(std::move(node));
  }

  std::map<std::pair<int, int>, double> shortest;
  for (const GraphEdge& e : graph.edges) {
    int ca = partition.assignment.at(e.a);
    int cb = partition.assignment.at(e.b);
    if (ca == cb || !keep.count(ca) || !keep.count(cb)) continue;
    if (ca > cb) std::swap(ca, cb);
    const double len = distance(graph.find(e.a)->position,
                                graph.find(e.b)->position);
    auto [it, inserted] = shortest.emplace(std::pair{ca, cb}, len);
    if (!inserted && len < it->second) it->second = len;
  }
  for (const auto& [key, w] : shortest)
    out.edges.push_back({key.first, key.second, w});
  return out;
}

std::string dump_communities(const CollisionFreeGraph& graph,
                             const Partition& partition,
                             const std::vector<int>& retained) {
  std::set<int> keep(retained.begin(), retained.end());
  std::map<int, CommunityScore> scores;
  if (!graph.edges.empty())
    for (const CommunityScore& s : all_scores(graph, partition))
      scores[s.community] = s;
  std::string out;
  for (int c : partition.community_ids()) {
    const CommunityScore s = scores.count(c) ? scores[c] : CommunityScore{c, 0, 0, 0, 0};
    out += "community ";
    out += std::to_string(c);
    out += " sigma_in=";
    append_double(out, s.sigma_in);
    out += " sigma_tot=";
    append_double(out, s.sigma_tot);
    out += " q=";
    append_double(out, s.q);
    out += " members=";
    out += std::to_string(partition.members(c).size());
    out += " retained=";
    out += keep.count(c) ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace gridscout
