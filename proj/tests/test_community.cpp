#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <set>

#include "gridscout/community.hpp"
#include "gridscout/rng.hpp"
#include "oracles.hpp"

using namespace gridscout;

namespace {

CollisionFreeGraph graph_from(std::vector<Viewpoint> nodes,
                              std::vector<GraphEdge> edges) {
  CollisionFreeGraph g;
  g.nodes = std::move(nodes);
  for (GraphEdge e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

Partition partition_of(std::initializer_list<std::pair<int, int>> pairs) {
  Partition p;
  for (auto [node, comm] : pairs) p.assignment[node] = comm;
  return p;
}

/// Two disjoint triangles: the textbook Q = 1/2 partition.
CollisionFreeGraph two_triangles() {
  return graph_from({{0, {0, 0}, 0},
                     {1, {1, 0}, 0},
                     {2, {0, 1}, 0},
                     {3, {5, 0}, 0},
                     {4, {6, 0}, 0},
                     {5, {5, 1}, 0}},
                    {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

}  // namespace

TEST_CASE("modularity fixtures match hand-computed values") {
  const CollisionFreeGraph g = two_triangles();

  const Partition split = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  CHECK(modularity(g, split) == doctest::Approx(0.5).epsilon(1e-15));

  const Partition lumped = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
  CHECK(modularity(g, lumped) == doctest::Approx(0.0).epsilon(1e-15));

  // Triangle with every node alone: Q = -1/3.
  const CollisionFreeGraph tri = graph_from(
      {{0, {0, 0}, 0}, {1, {1, 0}, 0}, {2, {0, 1}, 0}},
      {{0, 1}, {1, 2}, {0, 2}});
  const Partition singletons = partition_of({{0, 0}, {1, 1}, {2, 2}});
  CHECK(modularity(tri, singletons) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));

  // Per-community terms of the split: each triangle has sigma_in = 6,
  // sigma_tot = 6, m = 6, so q = 6 - 36/12 = 3.
  for (int c : {0, 1}) {
    const CommunityScore s = community_modularity(g, split, c);
    CHECK(s.sigma_in == doctest::Approx(6.0));
    CHECK(s.sigma_tot == doctest::Approx(6.0));
    CHECK(s.q == doctest::Approx(3.0));
    CHECK(s.edge_count == 6);
  }
  // One singleton inside the triangle: sigma_in = 0, sigma_tot = 2, m = 3,
  // q = 0 - 4/6 = -2/3.
  const CommunityScore lone = community_modularity(tri, singletons, 1);
  CHECK(lone.sigma_in == doctest::Approx(0.0));
  CHECK(lone.sigma_tot == doctest::Approx(2.0));
  CHECK(lone.q == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("per-community sum equals the direct double sum on random graphs") {
  Rng rng(20260207);
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + rng.uniform_int(9);
    const double p = 0.3 + 0.4 * rng.uniform();
    const CollisionFreeGraph g = oracles::random_graph(rng, n, p);
    const Partition part = oracles::random_partition(rng, g, n);
    const double via_sum = modularity(g, part);
    const double direct = oracles::modularity_bruteforce(g, part);
    CAPTURE(trial);
    CHECK(std::abs(via_sum - direct) <= 1e-12);
  }
  const auto elapsed = std::chrono::steady_clock::now() - t0;
  CHECK(std::chrono::duration<double>(elapsed).count() < 1.0);
}

TEST_CASE("modularity input validation") {
  CollisionFreeGraph edgeless = graph_from({{0, {0, 0}, 0}, {1, {1, 0}, 0}}, {});
  const Partition p = partition_of({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(modularity(edgeless, p), std::invalid_argument);
  CHECK_THROWS_AS(community_modularity(edgeless, p, 0), std::invalid_argument);

  const CollisionFreeGraph g = two_triangles();
  const Partition partial = partition_of({{0, 0}, {1, 0}, {2, 0}});
  CHECK_THROWS_AS(modularity(g, partial), std::invalid_argument);
  const Partition full = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  CHECK_THROWS_AS(community_modularity(g, full, 9), std::invalid_argument);
}

TEST_CASE("detection recovers planted communities and never loses to trivia") {
  // Planted: two 6-cliques joined by one bridge edge.
  std::vector<Viewpoint> nodes;
  std::vector<GraphEdge> edges;
  for (int i = 0; i < 12; ++i)
    nodes.push_back({i, {static_cast<double>(i), 0.0}, 0});
  for (int base : {0, 6})
    for (int i = base; i < base + 6; ++i)
      for (int j = i + 1; j < base + 6; ++j) edges.push_back({i, j});
  edges.push_back({5, 6});
  const CollisionFreeGraph planted = graph_from(nodes, edges);

  const Partition found = detect_communities(planted);
  CHECK(found.community_count() == 2);
  const std::vector<int> left = found.members(found.assignment.at(0));
  const std::vector<int> right = found.members(found.assignment.at(6));
  CHECK(left == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(right == std::vector<int>{6, 7, 8, 9, 10, 11});

  // Louvain result at least matches all-singletons and all-in-one.
  Rng rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + rng.uniform_int(11);
    const CollisionFreeGraph g =
        oracles::random_graph(rng, n, 0.25 + 0.5 * rng.uniform());
    const Partition det = detect_communities(g);
    const double q_det = modularity(g, det);

    Partition singles, one;
    int next = 0;
    for (const Viewpoint& v : g.nodes) {
      singles.assignment[v.id] = next++;
      one.assignment[v.id] = 0;
    }
    CAPTURE(trial);
    CHECK(q_det >= modularity(g, singles) - 1e-12);
    CHECK(q_det >= modularity(g, one) - 1e-12);
  }
}

TEST_CASE("detection is deterministic and handles edge cases") {
  Rng rng(77);
  const CollisionFreeGraph g = oracles::random_graph(rng, 14, 0.3);
  const Partition a = detect_communities(g);
  const Partition b = detect_communities(g);
  CHECK(a.assignment == b.assignment);

  // No edges: every node is its own community.
  CollisionFreeGraph edgeless =
      graph_from({{2, {0, 0}, 0}, {5, {1, 0}, 0}, {9, {2, 0}, 0}}, {});
  const Partition singles = detect_communities(edgeless);
  CHECK(singles.community_count() == 3);
  for (auto [node, comm] : singles.assignment) {
    const auto mem = singles.members(comm);
    CHECK(mem == std::vector<int>{node});
  }

  CHECK_THROWS_AS(detect_communities(CollisionFreeGraph{}),
                  std::invalid_argument);
}

TEST_CASE("pruning matches the full-sort oracle") {
  Rng rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6 + rng.uniform_int(11);
    CollisionFreeGraph g = oracles::random_graph(rng, n, 0.35);
    // Utilities drawn small so zero/positive and exact q ties both occur.
    for (Viewpoint& v : g.nodes)
      v.utility = rng.uniform_int(4);
    // Few communities so exact q ties between singletons actually occur.
    const Partition part = oracles::random_partition(rng, g, 4);
    const int k_top = 1 + rng.uniform_int(5);
    const int robot = rng.uniform() < 0.7 ? g.nodes[0].id : -1;

    const std::vector<int> kept = prune_topk(g, part, k_top, robot);
    const std::vector<int> want = oracles::prune_oracle(g, part, k_top, robot);
    CAPTURE(trial);
    CHECK(kept == want);
    CHECK(std::is_sorted(kept.begin(), kept.end()));
  }
  const CollisionFreeGraph g = two_triangles();
  const Partition split = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  CHECK_THROWS_AS(prune_topk(g, split, 0, -1), std::invalid_argument);
}

TEST_CASE("pruning always retains the robot and frontier observers") {
  // Three components: big clique (high q), robot's lone pair, observer pair.
  std::vector<Viewpoint> nodes;
  std::vector<GraphEdge> edges;
  for (int i = 0; i < 5; ++i) {
    nodes.push_back({i, {static_cast<double>(i), 0.0}, 0});
    for (int j = 0; j < i; ++j) edges.push_back({j, i});
  }
  nodes.push_back({10, {0, 5}, 0});
  nodes.push_back({11, {1, 5}, 0});
  edges.push_back({10, 11});
  nodes.push_back({20, {5, 5}, 4});  // utility > 0: always kept
  nodes.push_back({21, {6, 5}, 0});
  edges.push_back({20, 21});
  const CollisionFreeGraph g = graph_from(nodes, edges);
  const Partition part = partition_of({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0},
                                       {10, 1}, {11, 1}, {20, 2}, {21, 2}});

  const std::vector<int> kept = prune_topk(g, part, 1, 10);
  // k_top = 1 picks the clique; the robot community and the observing
  // community ride along regardless.
  CHECK(kept == std::vector<int>{0, 1, 2});
}

TEST_CASE("global graph abstracts retained communities") {
  const CollisionFreeGraph g = two_triangles();
  const Partition split = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  CollisionFreeGraph withbridge = g;
  withbridge.edges.push_back({2, 3});
  withbridge.edges.push_back({1, 3});
  std::sort(withbridge.edges.begin(), withbridge.edges.end());
  withbridge.nodes[0].utility = 2;
  withbridge.nodes[4].utility = 7;

  const GlobalBeliefGraph global =
      build_global_graph(withbridge, split, {0, 1});
  REQUIRE(global.nodes.size() == 2);
  const GlobalNode* c0 = global.find(0);
  const GlobalNode* c1 = global.find(1);
  REQUIRE(c0 != nullptr);
  REQUIRE(c1 != nullptr);
  CHECK(c0->members == std::vector<int>{0, 1, 2});
  CHECK(c1->members == std::vector<int>{3, 4, 5});
  CHECK(c0->centroid.x == doctest::Approx(1.0 / 3.0));
  CHECK(c0->centroid.y == doctest::Approx(1.0 / 3.0));
  CHECK(c0->aggregate_utility == 2);
  CHECK(c1->aggregate_utility == 7);
  // Representative: member nearest the centroid.
  CHECK(c0->representative == 0);
  REQUIRE(global.edges.size() == 1);
  CHECK(global.edges[0].a == 0);
  CHECK(global.edges[0].b == 1);
  // Shortest crossing edge is 2-3: (0,1) to (5,0).
  const double d23 = distance(Point{0, 1}, Point{5, 0});
  const double d13 = distance(Point{1, 0}, Point{5, 0});
  CHECK(global.edges[0].weight == doctest::Approx(std::min(d23, d13)));

  CHECK_THROWS_AS(build_global_graph(withbridge, split, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_global_graph(withbridge, split, {0, 7}),
                  std::invalid_argument);
}

TEST_CASE("community dump lists every community with retention flags") {
  const CollisionFreeGraph g = two_triangles();
  const Partition split = partition_of(
      {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  const std::string text = dump_communities(g, split, {1});
  CHECK(text.find("community 0") != std::string::npos);
  CHECK(text.find("community 1") != std::string::npos);
  CHECK(text.find("retained=0") != std::string::npos);
  CHECK(text.find("retained=1") != std::string::npos);
}
