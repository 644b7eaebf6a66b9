#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "gridscout/map_gen.hpp"
#include "gridscout/viewpoint_graph.hpp"
#include "oracles.hpp"

using namespace gridscout;

namespace {

OccupancyBelief free_belief(int w, int h, double res) {
  OccupancyBelief b;
  b.width = w;
  b.height = h;
  b.resolution = res;
  b.cells.assign(static_cast<size_t>(w) * h, Belief::Free);
  return b;
}

}  // namespace

TEST_CASE("viewpoints sit on free lattice centers with lattice-index ids") {
  OccupancyBelief belief = free_belief(10, 10, 0.5);  // 5m x 5m
  belief.set({3, 3}, Belief::Occupied);               // kills center (1.5, 1.5)
  belief.set({7, 1}, Belief::Unknown);                // kills center (3.5, 0.5)
  const auto vps = sample_viewpoints(belief, 1.0);  // 5x5 lattice
  std::set<int> ids;
  for (const Viewpoint& v : vps) {
    const int ix = v.id % 5, iy = v.id / 5;
    CHECK(v.position.x == doctest::Approx((ix + 0.5) * 1.0));
    CHECK(v.position.y == doctest::Approx((iy + 0.5) * 1.0));
    CHECK(v.utility == 0);
    ids.insert(v.id);
  }
  CHECK(ids.size() == vps.size());
  CHECK(ids.count(1 * 5 + 1) == 0);  // occupied center
  CHECK(ids.count(0 * 5 + 3) == 0);  // unknown center
  CHECK(ids.count(0) == 1);
  CHECK(ids.size() == 23);

  CHECK_THROWS_AS(sample_viewpoints(belief, 0.4), std::invalid_argument);
}

TEST_CASE("graph edges cross only free space and ids stay sorted") {
  const GroundTruthMap truth = generate_map(MapKind::Indoor, 3, 48, 48, 0.4);
  OccupancyBelief belief = OccupancyBelief::unknown_like(truth);
  // Reveal everything so the graph spans the map.
  for (int y = 0; y < truth.height; ++y)
    for (int x = 0; x < truth.width; ++x)
      belief.set({x, y}, truth.at({x, y}) == Cell::Free ? Belief::Free
                                                        : Belief::Occupied);
  const auto vps = sample_viewpoints(belief, 1.2);
  REQUIRE(vps.size() > 20);
  const CollisionFreeGraph g = build_graph(vps, 6, belief, 1.2);

  for (size_t i = 1; i < g.nodes.size(); ++i)
    CHECK(g.nodes[i - 1].id < g.nodes[i].id);
  for (size_t i = 1; i < g.edges.size(); ++i)
    CHECK(g.edges[i - 1] < g.edges[i]);

  for (const GraphEdge& e : g.edges) {
    CHECK(e.a < e.b);
    CHECK(g.has_edge(e.a, e.b));
    CHECK(g.has_edge(e.b, e.a));
    const Viewpoint* va = g.find(e.a);
    const Viewpoint* vb = g.find(e.b);
    REQUIRE(va != nullptr);
    REQUIRE(vb != nullptr);
    // Independent conservative-cover oracle: every touched cell is Free.
    for (const CellIndex& c :
         oracles::supercover_oracle(va->position, vb->position, 0.4)) {
      CAPTURE(e.a);
      CAPTURE(e.b);
      REQUIRE(belief.in_bounds(c));
      CHECK(belief.at(c) == Belief::Free);
    }
  }

  // On open ground every node keeps at least one of its nearest neighbors.
  int isolated = 0;
  for (const Viewpoint& v : g.nodes)
    if (g.neighbors(v.id).empty()) ++isolated;
  CHECK(isolated < static_cast<int>(g.nodes.size()) / 10);

  CHECK_THROWS_AS(build_graph(vps, 0, belief, 1.2), std::invalid_argument);
}

TEST_CASE("nearest-neighbor ties resolve toward the smaller id") {
  const OccupancyBelief belief = free_belief(10, 10, 1.0);
  // C(20) is equidistant from A(3) and B(9); each side node has a private
  // closer partner so only the tie decides C's single link.
  std::vector<Viewpoint> vps{{3, {4.0, 5.0}, 0},
                             {4, {3.8, 5.0}, 0},
                             {9, {6.0, 5.0}, 0},
                             {10, {6.2, 5.0}, 0},
                             {20, {5.0, 5.0}, 0}};
  const CollisionFreeGraph g = build_graph(vps, 1, belief, 1.0);
  CHECK(g.has_edge(3, 20));
  CHECK_FALSE(g.has_edge(9, 20));
  CHECK(g.has_edge(3, 4));
  CHECK(g.has_edge(9, 10));
}

TEST_CASE("utility counts range- and sight-gated frontier cells") {
  OccupancyBelief belief = free_belief(11, 11, 1.0);
  belief.set({6, 6}, Belief::Occupied);
  FrontierSet fs;
  fs.resolution = 1.0;
  fs.cells = {{7, 5},    // center (7.5,5.5), dist 2.0: visible
              {9, 5},    // center (9.5,5.5), dist 4.0: out of range
              {7, 7},    // center (7.5,7.5), occluded by (6,6)
              {5, 7}};   // center (5.5,7.5), dist 2.0: visible
  const Viewpoint vp{0, {5.5, 5.5}, 0};
  CHECK(compute_utility(vp, fs, belief, 3.0) == 2);
  CHECK(compute_utility(vp, fs, belief, 10.0) == 3);
  CHECK(compute_utility(vp, fs, belief, 0.5) == 0);

  const Viewpoint bad{1, {6.5, 6.5}, 0};
  CHECK_THROWS_AS(compute_utility(bad, fs, belief, 3.0), std::invalid_argument);
}

TEST_CASE("local window keeps closed bounds and the nearest node") {
  const OccupancyBelief belief = free_belief(12, 12, 1.0);
  const auto vps = sample_viewpoints(belief, 1.0);  // centers (i+0.5, j+0.5)
  const CollisionFreeGraph g = build_graph(vps, 4, belief, 1.0);

  const Pose robot{{5.4, 5.4}};
  const LocalGraph local = extract_local(g, robot, 4.0);
  CHECK(local.window_size == 4.0);
  CHECK(local.current_node_id == g.find(local.current_node_id)->id);
  // nearest lattice center to (5.4,5.4) is (5.5,5.5) -> ix=5, iy=5
  CHECK(local.current_node_id == 5 * 12 + 5);
  for (const Viewpoint& v : local.graph.nodes) {
    CHECK(std::abs(v.position.x - 5.4) <= 2.0 + 1e-12);
    CHECK(std::abs(v.position.y - 5.4) <= 2.0 + 1e-12);
  }
  // Node at x = 3.5 sits 1.9 from center: inside. Node at 7.5 is 2.1: outside.
  CHECK(local.graph.find(5 * 12 + 3) != nullptr);
  CHECK(local.graph.find(5 * 12 + 7) == nullptr);
  // Exact-boundary inclusion: center (5.5,5.5), window 4 -> |dx| = 2 exactly.
  const LocalGraph exact = extract_local(g, {{5.5, 5.5}}, 4.0);
  CHECK(exact.graph.find(5 * 12 + 3) != nullptr);
  CHECK(exact.graph.find(5 * 12 + 7) != nullptr);
  // Local edges are exactly the induced ones.
  for (const GraphEdge& e : local.graph.edges) {
    CHECK(g.has_edge(e.a, e.b));
    CHECK(local.graph.find(e.a) != nullptr);
    CHECK(local.graph.find(e.b) != nullptr);
  }

  CHECK_THROWS_AS(extract_local(g, robot, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_local(g, {{100.0, 100.0}}, 4.0),
                  std::invalid_argument);
}

TEST_CASE("graph text round-trip and malformed inputs") {
  const OccupancyBelief belief = free_belief(8, 8, 1.0);
  auto vps = sample_viewpoints(belief, 1.3);
  vps[2].utility = 5;
  const CollisionFreeGraph g = build_graph(vps, 3, belief, 1.3);
  REQUIRE(!g.edges.empty());

  const std::string text = dump_graph(g);
  const CollisionFreeGraph back = parse_graph(text);
  CHECK(back.k == g.k);
  CHECK(back.node_resolution == g.node_resolution);
  REQUIRE(back.nodes.size() == g.nodes.size());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(back.nodes[i].id == g.nodes[i].id);
    CHECK(back.nodes[i].position.x == g.nodes[i].position.x);
    CHECK(back.nodes[i].position.y == g.nodes[i].position.y);
    CHECK(back.nodes[i].utility == g.nodes[i].utility);
  }
  CHECK(back.edges == g.edges);
  CHECK(dump_graph(back) == text);

  CHECK_THROWS_AS(parse_graph("gruph k=3 delta_node=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_graph("graph k=3 delta_node=1\nnode 1 0 0 0\nnode 1 1 1 0\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_graph("graph k=3 delta_node=1\nnode 1 0 0 0\nedge 1 1\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_graph("graph k=3 delta_node=1\nnode 1 0 0 0\nedge 1 2\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_graph("graph k=3 delta_node=1\nnode 1 0 0 0\n"
                              "node 2 1 1 0\nedge 1 2\nedge 1 2\n"),
                  std::invalid_argument);
}

TEST_CASE("incremental builder matches a from-scratch recompute") {
  const GroundTruthMap truth = generate_map(MapKind::Warehouse, 12, 64, 64, 0.4);
  OccupancyBelief belief = OccupancyBelief::unknown_like(truth);
  GraphBuilder builder(1.2, 6, 4.0);

  const CellIndex start = default_start_cell(truth);
  std::vector<Pose> scans{{truth.cell_center(start)}};
  // March the sensor along a free row to force several incremental updates.
  for (int step = 1; step <= 6; ++step) {
    const CellIndex c{start.x + 3 * step, start.y};
    if (truth.in_bounds(c) && truth.at(c) == Cell::Free)
      scans.push_back({truth.cell_center(c)});
  }
  REQUIRE(scans.size() >= 3);

  std::map<int, Point> seen_positions;
  for (const Pose& pose : scans) {
    const SenseResult sr = sense_and_update(belief, truth, pose, 4.0, 180);
    const FrontierSet fs = detect_frontiers(belief);
    const CollisionFreeGraph& g = builder.update(belief, fs, sr.revealed);

    // Cached utilities must equal a full recompute for every node.
    for (const Viewpoint& v : g.nodes) {
      CAPTURE(v.id);
      CHECK(v.utility == compute_utility(v, fs, belief, 4.0));
    }
    // Lattice ids are stable: a node never moves between updates.
    for (const Viewpoint& v : g.nodes) {
      auto [it, fresh] = seen_positions.try_emplace(v.id, v.position);
      if (!fresh) {
        CHECK(it->second.x == v.position.x);
        CHECK(it->second.y == v.position.y);
      }
    }
  }
}
