#include "gridscout/viewpoint_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gridscout/geometry.hpp"

namespace gridscout {
namespace {

struct Lattice {
  int width = 0;
  int height = 0;
  double pitch = 0.0;

  Point center(int ix, int iy) const {
    return {(ix + 0.5) * pitch, (iy + 0.5) * pitch};
  }
  int linear(int ix, int iy) const { return iy * width + ix; }
};

Lattice lattice_for(const OccupancyBelief& belief, double pitch) {
  Lattice lat;
  lat.pitch = pitch;
  lat.width = static_cast<int>(std::ceil(belief.width * belief.resolution / pitch));
  lat.height = static_cast<int>(std::ceil(belief.height * belief.resolution / pitch));
  return lat;
}

bool segment_is_free(const Point& a, const Point& b,
                     const OccupancyBelief& belief) {
  // Conservative: every cell the segment touches (corner crossings include
  // both side cells) must be believed Free.
  for (const CellIndex& c : supercover_cells(a, b, belief.resolution)) {
    if (!belief.in_bounds(c) || belief.at(c) != Belief::Free) return false;
  }
  return true;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

int CollisionFreeGraph::index_of(int id) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), id,
      [](const Viewpoint& v, int key) { return v.id < key; });
  if (it == nodes.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

const Viewpoint* CollisionFreeGraph::find(int id) const {
  const int i = index_of(id);
  return i < 0 ? nullptr : &nodes[i];
}

bool CollisionFreeGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges.begin(), edges.end(), GraphEdge{a, b});
}

std::vector<int> CollisionFreeGraph::neighbors(int id) const {
  std::vector<int> out;
  for (const GraphEdge& e : edges) {
    if (e.a == id) out.push_back(e.b);
    else if (e.b == id) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Viewpoint> sample_viewpoints(const OccupancyBelief& belief,
                                         double node_resolution) {
  if (node_resolution < belief.resolution)
    throw std::invalid_argument(
        "sample_viewpoints: lattice pitch below map resolution");
  const Lattice lat = lattice_for(belief, node_resolution);
  std::vector<Viewpoint> out;
  for (int iy = 0; iy < lat.height; ++iy)
    for (int ix = 0; ix < lat.width; ++ix) {
      const Point p = lat.center(ix, iy);
      const CellIndex c = belief.cell_of(p);
      if (!belief.in_bounds(c) || belief.at(c) != Belief::Free) continue;
      out.push_back({lat.linear(ix, iy), p, 0});
    }
  return out;
}

CollisionFreeGraph build_graph(std::vector<Viewpoint> viewpoints, int k,
                               const OccupancyBelief& belief,
                               double node_resolution) {
  if (k < 1) throw std::invalid_argument("build_graph: k must be >= 1");
  CollisionFreeGraph g;
  g.k = k;
  g.node_resolution = node_resolution;
  g.nodes = std::move(viewpoints);
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const Viewpoint& a, const Viewpoint& b) { return a.id < b.id; });

  const int n = static_cast<int>(g.nodes.size());
  std::set<GraphEdge> accepted;
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      order.emplace_back(distance(g.nodes[i].position, g.nodes[j].position),
                         g.nodes[j].id);
    }
    const size_t keep = std::min<size_t>(k, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end());
    for (size_t t = 0; t < keep; ++t) {
      GraphEdge e{g.nodes[i].id, order[t].second};
      if (e.a > e.b) std::swap(e.a, e.b);
      if (accepted.count(e)) continue;
      const Viewpoint* va = g.find(e.a);
      const Viewpoint* vb = g.find(e.b);
      if (segment_is_free(va->position, vb->position, belief))
        accepted.insert(e);
    }
  }
  g.edges.assign(accepted.begin(), accepted.end());
  return g;
}

int compute_utility(const Viewpoint& viewpoint, const FrontierSet& frontiers,
                    const OccupancyBelief& belief, double sensing_range) {
  const CellIndex vc = belief.cell_of(viewpoint.position);
  if (!belief.in_bounds(vc) || belief.at(vc) != Belief::Free)
    throw std::invalid_argument("compute_utility: viewpoint not in free space");
  int count = 0;
  const double range_sq = sensing_range * sensing_range;
  for (size_t i = 0; i < frontiers.size(); ++i) {
    const Point f = frontiers.center(i);
    const Point d = f - viewpoint.position;
    if (d.x * d.x + d.y * d.y > range_sq) continue;
    // Same conservative traversal as graph edges: a corner squeeze that no
    // scan ray can pass must not count as observable, or the planner chases
    // utility the sensor can never deliver.
    if (segment_is_free(viewpoint.position, f, belief)) ++count;
  }
  return count;
}

LocalGraph extract_local(const CollisionFreeGraph& graph, const Pose& robot,
                         double window_size) {
  if (window_size <= 2.0 * graph.node_resolution)
    throw std::invalid_argument(
        "extract_local: window must exceed twice the lattice pitch");
  const double half = window_size / 2.0;
  LocalGraph local;
  local.window_center = robot;
  local.window_size = window_size;
  local.graph.k = graph.k;
  local.graph.node_resolution = graph.node_resolution;

  double best = std::numeric_limits<double>::infinity();
  for (const Viewpoint& v : graph.nodes) {
    if (std::abs(v.position.x - robot.position.x) > half) continue;
    if (std::abs(v.position.y - robot.position.y) > half) continue;
    local.graph.nodes.push_back(v);
    const double dist = distance(v.position, robot.position);
    if (dist < best) {
      best = dist;
      local.current_node_id = v.id;
    }
  }
  if (local.graph.nodes.empty())
    throw std::invalid_argument(
        "extract_local: no graph node inside the window");
  for (const GraphEdge& e : graph.edges)
    if (local.graph.index_of(e.a) >= 0 && local.graph.index_of(e.b) >= 0)
      local.graph.edges.push_back(e);
  return local;
}

std::string dump_graph(const CollisionFreeGraph& graph) {
  std::string out = "graph k=";
  out += std::to_string(graph.k);
  out += " delta_node=";
  append_double(out, graph.node_resolution);
  out += '\n';
  for (const Viewpoint& v : graph.nodes) {
    out += "node ";
    out += std::to_string(v.id);
    out += ' ';
    append_double(out, v.position.x);
    out += ' ';
    append_double(out, v.position.y);
    out += ' ';
    out += std::to_string(v.utility);
    out += '\n';
  }
  for (const GraphEdge& e : graph.edges) {
    out += "edge ";
    out += std::to_string(e.a);
    out += ' ';
    out += std::to_string(e.b);
    out += '\n';
  }
  return out;
}

CollisionFreeGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CollisionFreeGraph g;
  bool have_header = false;
  std::set<int> ids;
  std::set<GraphEdge> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "graph") {
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("parse_graph: malformed header field");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "k") g.k = std::stoi(val);
        else if (key == "delta_node") g.node_resolution = std::stod(val);
        else throw std::invalid_argument("parse_graph: unknown header key " + key);
      }
      have_header = true;
    } else if (tag == "node") {
      Viewpoint v;
      if (!(ls >> v.id >> v.position.x >> v.position.y >> v.utility))
        throw std::invalid_argument("parse_graph: malformed node line");
      if (!ids.insert(v.id).second)
        throw std::invalid_argument("parse_graph: duplicate node id");
      g.nodes.push_back(v);
    } else if (tag == "edge") {
      GraphEdge e;
      if (!(ls >> e.a >> e.b))
        throw std::invalid_argument("parse_graph: malformed edge line");
      if (e.a == e.b) throw std::invalid_argument("parse_graph: self-loop");
      if (e.a > e.b) std::swap(e.a, e.b);
      if (!edges.insert(e).second)
        throw std::invalid_argument("parse_graph: duplicate edge");
    } else {
      throw std::invalid_argument("parse_graph: unknown line tag " + tag);
    }
  }
  if (!have_header) throw std::invalid_argument("parse_graph: missing header");
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const Viewpoint& a, const Viewpoint& b) { return a.id < b.id; });
  for (const GraphEdge& e : edges)
    if (!ids.count(e.a) || !ids.count(e.b))
      throw std::invalid_argument("parse_graph: edge endpoint missing");
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

GraphBuilder::GraphBuilder(double node_resolution, int k, double sensing_range)
    : node_resolution_(node_resolution),
      sensing_range_(sensing_range),
      k_(k) {
  if (node_resolution <= 0.0 || sensing_range <= 0.0 || k < 1)
    throw std::invalid_argument("GraphBuilder: nonpositive parameter");
}

const CollisionFreeGraph& GraphBuilder::update(
    const OccupancyBelief& belief, const FrontierSet& frontiers,
    std::span<const CellIndex> newly_revealed) {
  std::vector<Viewpoint> nodes = sample_viewpoints(belief, node_resolution_);

  // A node's utility can only change when the belief changes within its
  // sensing disc (frontier birth/death and line-of-sight changes both happen
  // at revealed cells). Two map cells of slack cover center-vs-area offsets.
  const double dirty_radius = sensing_range_ + 2.0 * belief.resolution;
  const double dirty_sq = dirty_radius * dirty_radius;
  for (Viewpoint& v : nodes) {
    auto cached = utility_cache_.find(v.id);
    bool dirty = first_update_ || cached == utility_cache_.end();
    if (!dirty) {
      for (const CellIndex& c : newly_revealed) {
        const Point p = belief.cell_center(c);
        const Point d = p - v.position;
        if (d.x * d.x + d.y * d.y <= dirty_sq) {
          dirty = true;
          break;
        }
      }
    }
    if (dirty) {
      v.utility = compute_utility(v, frontiers, belief, sensing_range_);
      utility_cache_[v.id] = v.utility;
    } else {
      v.utility = cached->second;
    }
  }
  first_update_ = false;
  graph_ = build_graph(std::move(nodes), k_, belief, node_resolution_);
  return graph_;
}

}  // namespace gridscout
