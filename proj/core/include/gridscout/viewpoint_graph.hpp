#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridscout/grid_map.hpp"

namespace gridscout {

/// Candidate observation pose on the free-space lattice. `utility` is the
/// number of frontier cells observable from `position` (range- and
/// line-of-sight-gated) as of its last refresh.
struct Viewpoint {
  int id = -1;
  Point position{};
  int utility = 0;
};

/// Undirected edge, stored with a < b.
struct GraphEdge {
  int a = -1;
  int b = -1;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
  friend bool operator<(const GraphEdge& l, const GraphEdge& r) {
    return l.a != r.a ? l.a < r.a : l.b < r.b;
  }
};

/// k-NN graph over viewpoints whose edges cross only believed-free cells.
/// Nodes are kept sorted by id, edges sorted lexicographically, so equal
/// graphs compare equal structurally.
struct CollisionFreeGraph {
  std::vector<Viewpoint> nodes;
  std::vector<GraphEdge> edges;
  int k = 6;
  double node_resolution = 1.2;

  int index_of(int id) const;              // -1 when absent
  const Viewpoint* find(int id) const;     // nullptr when absent
  bool has_edge(int a, int b) const;
  std::vector<int> neighbors(int id) const;  // ascending ids
};

/// Axis-aligned square window subgraph around the robot.
struct LocalGraph {
  Pose window_center{};
  double window_size = 0.0;  // side length in meters
  CollisionFreeGraph graph;
  int current_node_id = -1;  // node nearest the robot, always inside
};

/// One candidate per lattice cell of pitch `node_resolution` whose center
/// lies in a Free belief cell. Ids are the lattice linear index, so a cell's
/// candidate keeps its id across incremental resampling. Utilities are left
/// at zero; callers refresh them separately.
std::vector<Viewpoint> sample_viewpoints(const OccupancyBelief& belief,
                                         double node_resolution);

/// Connect each viewpoint to its k nearest neighbors (Euclidean, ties toward
/// smaller id), symmetrize, then drop any edge whose segment touches a
/// non-Free cell. Throws std::invalid_argument when k < 1.
CollisionFreeGraph build_graph(std::vector<Viewpoint> viewpoints, int k,
                               const OccupancyBelief& belief,
                               double node_resolution);

/// Observable-frontier count: frontier cells within `sensing_range` of the
/// viewpoint whose connecting segment crosses only Free belief cells.
/// Throws std::invalid_argument when the viewpoint sits in a non-Free cell.
int compute_utility(const Viewpoint& viewpoint, const FrontierSet& frontiers,
                    const OccupancyBelief& belief, double sensing_range);

/// Induced subgraph of the window_size x window_size square centered on the
/// robot (closed bounds). Throws std::invalid_argument when window_size is
/// not greater than 2 * node_resolution or when no node falls inside.
LocalGraph extract_local(const CollisionFreeGraph& graph, const Pose& robot,
                         double window_size);

/// Text round-trip. Format:
///   graph k=<k> delta_node=<pitch>
///   node <id> <x> <y> <utility>
///   edge <a> <b>
std::string dump_graph(const CollisionFreeGraph& graph);
CollisionFreeGraph parse_graph(const std::string& text);

/// Incremental graph maintenance across an episode. Node identity is the
/// lattice index; utilities are cached and recomputed only for nodes within
/// sensing_range + 2 map cells of newly revealed cells (belief changes
/// beyond that distance cannot alter a node's visible-frontier count).
class GraphBuilder {
 public:
  GraphBuilder(double node_resolution, int k, double sensing_range);

  const CollisionFreeGraph& update(const OccupancyBelief& belief,
                                   const FrontierSet& frontiers,
                                   std::span<const CellIndex> newly_revealed);
  const CollisionFreeGraph& graph() const { return graph_; }

 private:
  double node_resolution_;
  double sensing_range_;
  int k_;
  bool first_update_ = true;
  CollisionFreeGraph graph_;
  std::map<int, int> utility_cache_;
};

}  // namespace gridscout
