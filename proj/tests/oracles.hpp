#pragma once

// Independent reference implementations the library is checked against.
// Everything here is deliberately naive and self-contained: correctness
// over speed, no shared code with the implementations under test.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "gridscout/community.hpp"
#include "gridscout/policy.hpp"
#include "gridscout/rng.hpp"
#include "gridscout/viewpoint_graph.hpp"

namespace oracles {

// ---- set partitions -------------------------------------------------------

inline void rgs_recurse(std::vector<int>& a, size_t i, int max_used,
                        std::vector<std::vector<int>>& out) {
  if (i == a.size()) {
    out.push_back(a);
    return;
  }
  for (int c = 0; c <= max_used + 1; ++c) {
    a[i] = c;
    rgs_recurse(a, i + 1, std::max(max_used, c), out);
  }
}

// Every partition of {0..n-1}, as restricted growth strings.
inline std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  if (n == 0) return out;
  std::vector<int> a(static_cast<size_t>(n), 0);
  rgs_recurse(a, 1, 0, out);
  return out;
}

// ---- modularity by the double-sum definition ------------------------------

// Q = (1/2m) * sum over all ordered node pairs (i, j), i == j included, of
// (A_ij - k_i k_j / 2m) * [same community].
inline double modularity_bruteforce(const gridscout::CollisionFreeGraph& g,
                                    const gridscout::Partition& p) {
  const int n = static_cast<int>(g.nodes.size());
  std::map<int, int> idx;
  for (int i = 0; i < n; ++i) idx[g.nodes[i].id] = i;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const gridscout::GraphEdge& e : g.edges) {
    a[idx.at(e.a)][idx.at(e.b)] += 1.0;
    a[idx.at(e.b)][idx.at(e.a)] += 1.0;
  }
  std::vector<double> k(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k[i] += a[i][j];
  const double two_m = 2.0 * static_cast<double>(g.edges.size());
  double q = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (p.assignment.at(g.nodes[i].id) != p.assignment.at(g.nodes[j].id))
        continue;
      q += a[i][j] - k[i] * k[j] / two_m;
    }
  return q / two_m;
}

// Top-k retention by (Q(c) desc, aggregate utility desc, id asc) plus the
// robot-community and any community with an observing (utility > 0) member.
inline std::vector<int> prune_oracle(const gridscout::CollisionFreeGraph& g,
                                     const gridscout::Partition& p, int k_top,
                                     int robot_node_id) {
  struct Row {
    int community;
    double q;
    long long utility;
  };
  std::vector<Row> rows;
  for (int c : p.community_ids()) {
    Row r{c, 0.0, 0};
    if (!g.edges.empty()) r.q = gridscout::community_modularity(g, p, c).q;
    for (int id : p.members(c)) r.utility += g.find(id)->utility;
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.q != b.q) return a.q > b.q;
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.community < b.community;
  });
  std::set<int> keep;
  for (size_t i = 0; i < rows.size() && static_cast<int>(i) < k_top; ++i)
    keep.insert(rows[i].community);
  for (int c : p.community_ids()) {
    for (int id : p.members(c)) {
      if (id == robot_node_id || g.find(id)->utility > 0) {
        keep.insert(c);
        break;
      }
    }
  }
  return {keep.begin(), keep.end()};
}

// ---- supercover by rectangle overlap --------------------------------------

// Closed segment vs closed axis-aligned box (Liang-Barsky with inclusive
// bounds). Degenerate segments reduce to point-in-box.
inline bool segment_intersects_box(gridscout::Point a, gridscout::Point b,
                                   double x0, double y0, double x1, double y1) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  double t0 = 0.0, t1 = 1.0;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    const double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  return clip(-dx, a.x - x0) && clip(dx, x1 - a.x) && clip(-dy, a.y - y0) &&
         clip(dy, y1 - a.y);
}

// Every cell whose closed square the closed segment touches.
inline std::vector<gridscout::CellIndex> supercover_oracle(
    gridscout::Point a, gridscout::Point b, double resolution) {
  const int min_x =
      static_cast<int>(std::floor(std::min(a.x, b.x) / resolution)) - 1;
  const int max_x =
      static_cast<int>(std::floor(std::max(a.x, b.x) / resolution)) + 1;
  const int min_y =
      static_cast<int>(std::floor(std::min(a.y, b.y) / resolution)) - 1;
  const int max_y =
      static_cast<int>(std::floor(std::max(a.y, b.y) / resolution)) + 1;
  std::vector<gridscout::CellIndex> out;
  for (int y = min_y; y <= max_y; ++y)
    for (int x = min_x; x <= max_x; ++x)
      if (segment_intersects_box(a, b, x * resolution, y * resolution,
                                 (x + 1) * resolution, (y + 1) * resolution))
        out.push_back({x, y});
  return out;
}

// ---- attention in long double ---------------------------------------------

// Row-stochastic masked attention straight from the definition:
// w_ij = exp(u_ij) (1 - M_ij) / sum_l exp(u_il) (1 - M_il),
// u_ij = (W_q h_i) . (W_k h_j) / sqrt(d). No shift, no shared code.
inline std::vector<std::vector<long double>> attention_weights_reference(
    const gridscout::Mat& features, const gridscout::Mat& mask,
    const gridscout::AttentionLayerParams& params) {
  const int n = features.rows;
  const int d = features.cols;
  auto project = [&](const gridscout::Mat& w) {
    std::vector<std::vector<long double>> out(
        n, std::vector<long double>(d, 0.0L));
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          out[i][r] += static_cast<long double>(w.at(r, c)) * features.at(i, c);
    return out;
  };
  const auto q = project(params.wq);
  const auto k = project(params.wk);
  const long double scale = 1.0L / std::sqrt(static_cast<long double>(d));
  std::vector<std::vector<long double>> w(n,
                                          std::vector<long double>(n, 0.0L));
  for (int i = 0; i < n; ++i) {
    long double denom = 0.0L;
    for (int j = 0; j < n; ++j) {
      if (mask.at(i, j) != 0.0) continue;
      long double u = 0.0L;
      for (int c = 0; c < d; ++c) u += q[i][c] * k[j][c];
      w[i][j] = std::exp(u * scale);
      denom += w[i][j];
    }
    for (int j = 0; j < n; ++j) w[i][j] /= denom;
  }
  return w;
}

// Full encoder layer in long double: attention, residual, layer norm.
inline std::vector<std::vector<long double>> attention_layer_reference(
    const gridscout::Mat& features, const gridscout::Mat& mask,
    const gridscout::AttentionLayerParams& params) {
  const int n = features.rows;
  const int d = features.cols;
  const auto w = attention_weights_reference(features, mask, params);
  std::vector<std::vector<long double>> v(n, std::vector<long double>(d, 0.0L));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        v[i][r] += static_cast<long double>(params.wv.at(r, c)) * features.at(i, c);
  std::vector<std::vector<long double>> out(n, std::vector<long double>(d, 0.0L));
  for (int i = 0; i < n; ++i) {
    std::vector<long double> r(d, 0.0L);
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < d; ++c) r[c] += w[i][j] * v[j][c];
    for (int c = 0; c < d; ++c) r[c] += features.at(i, c);
    long double mean = 0.0L;
    for (int c = 0; c < d; ++c) mean += r[c];
    mean /= d;
    long double var = 0.0L;
    for (int c = 0; c < d; ++c) var += (r[c] - mean) * (r[c] - mean);
    var /= d;
    const long double istd = 1.0L / std::sqrt(var + 1e-5L);
    for (int c = 0; c < d; ++c)
      out[i][c] = params.ln_gain[c] * (r[c] - mean) * istd + params.ln_bias[c];
  }
  return out;
}

// ---- misc ------------------------------------------------------------------

// Random connected-ish test graph with non-contiguous node ids.
inline gridscout::CollisionFreeGraph random_graph(gridscout::Rng& rng, int n,
                                                  double edge_prob) {
  gridscout::CollisionFreeGraph g;
  for (int i = 0; i < n; ++i) {
    gridscout::Viewpoint v;
    v.id = 3 * i + 1;
    v.position = {rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    v.utility = static_cast<int>(rng.uniform_int(4));
    g.nodes.push_back(v);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob)
        g.edges.push_back({3 * i + 1, 3 * j + 1});
  if (g.edges.empty() && n >= 2) g.edges.push_back({1, 4});
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

inline gridscout::Partition random_partition(gridscout::Rng& rng,
                                             const gridscout::CollisionFreeGraph& g,
                                             int max_communities) {
  // Random assignment, then renumbered densely by smallest member like the
  // library's convention.
  std::map<int, int> raw;
  for (const gridscout::Viewpoint& v : g.nodes)
    raw[v.id] = static_cast<int>(rng.uniform_int(max_communities));
  std::map<int, int> remap;
  gridscout::Partition p;
  for (const gridscout::Viewpoint& v : g.nodes) {
    const int label = raw.at(v.id);
    if (!remap.count(label)) {
      const int next = static_cast<int>(remap.size());
      remap[label] = next;
    }
    p.assignment[v.id] = remap.at(label);
  }
  return p;
}

}  // namespace oracles
