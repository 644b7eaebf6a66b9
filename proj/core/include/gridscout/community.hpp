#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridscout/viewpoint_graph.hpp"

namespace gridscout {

/// Total assignment of graph nodes to communities. Community ids are dense
/// from 0, numbered in ascending order of each community's smallest member.
struct Partition {
  std::map<int, int> assignment;  // node id -> community id

  int community_count() const;
  std::vector<int> community_ids() const;      // ascending
  std::vector<int> members(int community) const;  // ascending node ids
};

/// Per-community modularity bookkeeping. sigma_in sums A_ij over ordered
/// member pairs (twice the internal edge count), sigma_tot sums member
/// degrees, and q = sigma_in - sigma_tot^2 / (2m) where m = edge_count.
/// Summing q over all communities and dividing by 2m gives the graph
/// modularity.
struct CommunityScore {
  int community = -1;
  double sigma_in = 0.0;
  double sigma_tot = 0.0;
  double q = 0.0;
  int edge_count = 0;
};

/// One node per retained community.
struct GlobalNode {
  int community = -1;
  Point centroid{};            // mean of member positions
  int aggregate_utility = 0;   // sum of member utilities
  int representative = -1;     // member viewpoint nearest the centroid
  std::vector<int> members;    // ascending viewpoint ids
};

/// Communities are linked when any underlying graph edge crosses between
/// them; the weight is the length of the shortest such edge.
struct GlobalEdge {
  int a = -1;
  int b = -1;  // community ids, a < b
  double weight = 0.0;
};

struct GlobalBeliefGraph {
  std::vector<GlobalNode> nodes;  // ascending community id
  std::vector<GlobalEdge> edges;  // lexicographic

  const GlobalNode* find(int community) const;
  std::vector<int> neighbors(int community) const;  // ascending
};

/// Greedy local-move + aggregation community detection (unweighted input
/// edges). Moves are accepted only when they strictly increase modularity;
/// node visit order is ascending id, so the result is deterministic.
/// Isolated nodes end up as singletons. Throws std::invalid_argument on an
/// empty graph.
Partition detect_communities(const CollisionFreeGraph& graph);

/// Graph modularity for a total partition, computed by the per-community
/// sum route. Throws std::invalid_argument when the graph has no edges or
/// the partition does not cover every node.
double modularity(const CollisionFreeGraph& graph, const Partition& partition);

/// Score for one community. Throws std::invalid_argument for an unknown
/// community id or an edgeless graph.
CommunityScore community_modularity(const CollisionFreeGraph& graph,
                                    const Partition& partition, int community);

/// Ids of the k_top communities with largest q, ties broken by larger
/// aggregate utility then smaller id. Communities holding the robot's node
/// (when robot_node_id >= 0) or any frontier-observing member (utility > 0)
/// are always retained on top. Result is sorted ascending. Throws
/// std::invalid_argument when k_top < 1.
std::vector<int> prune_topk(const CollisionFreeGraph& graph,
                            const Partition& partition, int k_top,
                            int robot_node_id = -1);

/// Abstract the retained communities into the global graph. Throws
/// std::invalid_argument when `retained` is empty or names an unknown id.
GlobalBeliefGraph build_global_graph(const CollisionFreeGraph& graph,
                                     const Partition& partition,
                                     const std::vector<int>& retained);

/// One line per community: id, sigma_in, sigma_tot, q, member count, and
/// whether it survived pruning.
std::string dump_communities(const CollisionFreeGraph& graph,
                             const Partition& partition,
                             const std::vector<int>& retained);

}  // namespace gridscout
