#include "gridscout/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace gridscout {
namespace {

constexpr double kLnEps = 1e-5;

std::vector<int> natural_order(int n) {
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  return ord;
}

// rows(A) x rows(B) product A * B^T; both have the same column count.
Mat matmul_nt(const Mat& a, const Mat& b) {
  Mat out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (int c = 0; c < a.cols; ++c) acc += a.at(i, c) * b.at(j, c);
      out.at(i, j) = acc;
    }
  return out;
}

// Scaled-dot softmax restricted to unmasked entries, reduced in `ord` order.
Mat masked_softmax(const Mat& q, const Mat& k, const Mat& mask,
                   const std::vector<int>& ord) {
  const int n = q.rows;
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols));
  Mat w(n, n);
  std::vector<double> score(n);
  for (int i = 0; i < n; ++i) {
    double max_u = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int j : ord) {
      if (mask.at(i, j) != 0.0) continue;
      double u = 0.0;
      for (int c = 0; c < q.cols; ++c) u += q.at(i, c) * k.at(j, c);
      u *= scale;
      score[j] = u;
      max_u = std::max(max_u, u);
      any = true;
    }
    if (!any)
      throw std::invalid_argument("attention: row has no permitted entries");
    double denom = 0.0;
    for (int j : ord) {
      if (mask.at(i, j) != 0.0) continue;
      score[j] = std::exp(score[j] - max_u);
      denom += score[j];
    }
    for (int j : ord)
      if (mask.at(i, j) == 0.0) w.at(i, j) = score[j] / denom;
  }
  return w;
}

void check_layer_shapes(const AttentionLayerParams& p, int d) {
  if (p.wq.rows != d || p.wq.cols != d || p.wk.rows != d || p.wk.cols != d ||
      p.wv.rows != d || p.wv.cols != d ||
      static_cast<int>(p.ln_gain.size()) != d ||
      static_cast<int>(p.ln_bias.size()) != d)
    throw std::invalid_argument("attention layer parameter shape mismatch");
}

Mat xavier(int rows, int cols, Rng& rng) {
  Mat m(rows, cols);
  const double s = std::sqrt(6.0 / (rows + cols));
  for (double& v : m.data) v = rng.uniform(-s, s);
  return m;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw std::invalid_argument("checkpoint: bad number '" + token + "'");
  return v;
}

void write_tensor(std::string& out, const std::string& name, const Mat& m) {
  out += "tensor " + name + ' ' + std::to_string(m.rows) + ' ' +
         std::to_string(m.cols) + '\n';
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) out += ' ';
      append_double(out, m.at(r, c));
    }
    out += '\n';
  }
}

Mat read_tensor(std::istream& in, const std::string& expect_name) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("checkpoint: missing tensor " + expect_name);
  std::istringstream header(line);
  std::string tag, name;
  int rows = 0, cols = 0;
  if (!(header >> tag >> name >> rows >> cols) || tag != "tensor" ||
      name != expect_name || rows < 1 || cols < 1)
    throw std::invalid_argument("checkpoint: bad tensor header for " +
                                expect_name);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw std::invalid_argument("checkpoint: truncated tensor " + expect_name);
    std::istringstream row(line);
    std::string token;
    for (int c = 0; c < cols; ++c) {
      if (!(row >> token))
        throw std::invalid_argument("checkpoint: short row in " + expect_name);
      m.at(r, c) = parse_double(token);
    }
  }
  return m;
}

Mat row_mat(const std::vector<double>& v) {
  Mat m(1, static_cast<int>(v.size()));
  m.data = v;
  return m;
}

}  // namespace

PolicyParameters PolicyParameters::init(int feature_dim, int layer_count,
                                        Rng& rng) {
  if (feature_dim < 1 || layer_count < 1)
    throw std::invalid_argument("policy init: nonpositive dimensions");
  PolicyParameters p;
  p.feature_dim = feature_dim;
  p.layer_count = layer_count;
  p.embed_w = xavier(feature_dim, 4, rng);
  p.embed_b.assign(feature_dim, 0.0);
  for (int l = 0; l < layer_count; ++l) {
    AttentionLayerParams layer;
    layer.wq = xavier(feature_dim, feature_dim, rng);
    layer.wk = xavier(feature_dim, feature_dim, rng);
    layer.wv = xavier(feature_dim, feature_dim, rng);
    layer.ln_gain.assign(feature_dim, 1.0);
    layer.ln_bias.assign(feature_dim, 0.0);
    p.layers.push_back(std::move(layer));
  }
  p.dec_wq = xavier(feature_dim, 2 * feature_dim + 4, rng);
  p.dec_wk = xavier(feature_dim, feature_dim, rng);
  p.value_w.assign(2 * feature_dim, 0.0);
  for (double& v : p.value_w)
    v = rng.uniform(-1.0, 1.0) * std::sqrt(6.0 / (2 * feature_dim + 1));
  p.value_b = 0.0;
  return p;
}

bool PolicyParameters::all_finite() const {
  auto mat_ok = [](const Mat& m) {
    return std::all_of(m.data.begin(), m.data.end(),
                       [](double v) { return std::isfinite(v); });
  };
  auto vec_ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  if (!mat_ok(embed_w) || !vec_ok(embed_b) || !mat_ok(dec_wq) ||
      !mat_ok(dec_wk) || !vec_ok(value_w) || !std::isfinite(value_b))
    return false;
  for (const AttentionLayerParams& l : layers)
    if (!mat_ok(l.wq) || !mat_ok(l.wk) || !mat_ok(l.wv) || !vec_ok(l.ln_gain) ||
        !vec_ok(l.ln_bias))
      return false;
  return true;
}

void save_checkpoint(const PolicyParameters& params, const std::string& path) {
  std::string out = "gridscout-ckpt v1\n";
  out += "feature_dim " + std::to_string(params.feature_dim) + '\n';
  out += "layer_count " + std::to_string(params.layer_count) + '\n';
  write_tensor(out, "embed_w", params.embed_w);
  write_tensor(out, "embed_b", row_mat(params.embed_b));
  for (int l = 0; l < params.layer_count; ++l) {
    const std::string prefix = "layer" + std::to_string(l) + '.';
    write_tensor(out, prefix + "wq", params.layers[l].wq);
    write_tensor(out, prefix + "wk", params.layers[l].wk);
    write_tensor(out, prefix + "wv", params.layers[l].wv);
    write_tensor(out, prefix + "ln_gain", row_mat(params.layers[l].ln_gain));
    write_tensor(out, prefix + "ln_bias", row_mat(params.layers[l].ln_bias));
  }
  write_tensor(out, "dec_wq", params.dec_wq);
  write_tensor(out, "dec_wk", params.dec_wk);
  write_tensor(out, "value_w", row_mat(params.value_w));
  Mat vb(1, 1);
  vb.at(0, 0) = params.value_b;
  write_tensor(out, "value_b", vb);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write checkpoint " + path);
  f << out;
}

PolicyParameters load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read checkpoint " + path);
  std::string line;
  if (!std::getline(f, line) || line != "gridscout-ckpt v1")
    throw std::invalid_argument("checkpoint: unknown format marker");
  PolicyParameters p;
  std::string key;
  if (!(f >> key >> p.feature_dim) || key != "feature_dim")
    throw std::invalid_argument("checkpoint: missing feature_dim");
  if (!(f >> key >> p.layer_count) || key != "layer_count")
    throw std::invalid_argument("checkpoint: missing layer_count");
  std::getline(f, line);  // finish the header line
  if (p.feature_dim < 1 || p.layer_count < 1)
    throw std::invalid_argument("checkpoint: bad dimensions");

  const int d = p.feature_dim;
  p.embed_w = read_tensor(f, "embed_w");
  p.embed_b = read_tensor(f, "embed_b").data;
  for (int l = 0; l < p.layer_count; ++l) {
    const std::string prefix = "layer" + std::to_string(l) + '.';
    AttentionLayerParams layer;
    layer.wq = read_tensor(f, prefix + "wq");
    layer.wk = read_tensor(f, prefix + "wk");
    layer.wv = read_tensor(f, prefix + "wv");
    layer.ln_gain = read_tensor(f, prefix + "ln_gain").data;
    layer.ln_bias = read_tensor(f, prefix + "ln_bias").data;
    check_layer_shapes(layer, d);
    p.layers.push_back(std::move(layer));
  }
  p.dec_wq = read_tensor(f, "dec_wq");
  p.dec_wk = read_tensor(f, "dec_wk");
  p.value_w = read_tensor(f, "value_w").data;
  p.value_b = read_tensor(f, "value_b").at(0, 0);
  if (p.embed_w.rows != d || p.embed_w.cols != 4 ||
      static_cast<int>(p.embed_b.size()) != d || p.dec_wq.rows != d ||
      p.dec_wq.cols != 2 * d + 4 || p.dec_wk.rows != d || p.dec_wk.cols != d ||
      static_cast<int>(p.value_w.size()) != 2 * d)
    throw std::invalid_argument("checkpoint: tensor shapes inconsistent");
  return p;
}

InformativeGraph build_informative_graph(const LocalGraph& local,
                                         const GuidanceContext& guidance,
                                         double running_max_utility) {
  if (local.graph.nodes.empty())
    throw std::invalid_argument("build_informative_graph: empty local graph");
  const Point center = local.window_center.position;
  const double half = local.window_size / 2.0;
  const double inv = 1.0 / half;
  const double u_norm = std::max(1.0, running_max_utility);
  const double g_tol = guidance.node_resolution / 2.0;

  InformativeGraph out;
  std::map<int, int> index_of_id;
  for (const Viewpoint& v : local.graph.nodes) {
    InfoNode node;
    node.x = (v.position.x - center.x) * inv;
    node.y = (v.position.y - center.y) * inv;
    node.u = v.utility / u_norm;
    node.id = v.id;
    for (const Point& p : guidance.path_positions)
      if (distance(p, v.position) <= g_tol) {
        node.g = 1.0;
        break;
      }
    index_of_id[v.id] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(node);
  }
  for (const GraphEdge& e : local.graph.edges)
    out.edges.emplace_back(index_of_id.at(e.a), index_of_id.at(e.b));

  auto cur = index_of_id.find(local.current_node_id);
  if (cur == index_of_id.end())
    throw std::invalid_argument("build_informative_graph: current node missing");
  out.current_index = cur->second;
  for (const auto& [a, b] : out.edges) {
    if (a == out.current_index) out.neighbor_indices.push_back(b);
    else if (b == out.current_index) out.neighbor_indices.push_back(a);
  }
  std::sort(out.neighbor_indices.begin(), out.neighbor_indices.end());

  if (guidance.next_waypoint) {
    out.guide_dx =
        std::clamp((guidance.next_waypoint->x - center.x) * inv, -2.0, 2.0);
    out.guide_dy =
        std::clamp((guidance.next_waypoint->y - center.y) * inv, -2.0, 2.0);
  }
  if (guidance.previous_position) {
    out.prev_dx =
        std::clamp((center.x - guidance.previous_position->x) * inv, -2.0, 2.0);
    out.prev_dy =
        std::clamp((center.y - guidance.previous_position->y) * inv, -2.0, 2.0);
  }

  out.canonical_order = natural_order(static_cast<int>(out.nodes.size()));
  std::sort(out.canonical_order.begin(), out.canonical_order.end(),
            [&](int a, int b) {
              const InfoNode& na = out.nodes[a];
              const InfoNode& nb = out.nodes[b];
              return std::tie(na.x, na.y, na.u, na.g, na.id) <
                     std::tie(nb.x, nb.y, nb.u, nb.g, nb.id);
            });
  return out;
}

Mat adjacency_mask(const InformativeGraph& graph) {
  const int n = static_cast<int>(graph.nodes.size());
  Mat mask(n, n);
  for (double& v : mask.data) v = 1.0;
  for (int i = 0; i < n; ++i) mask.at(i, i) = 0.0;
  for (const auto& [a, b] : graph.edges) {
    mask.at(a, b) = 0.0;
    mask.at(b, a) = 0.0;
  }
  return mask;
}

Mat attention_weights(const Mat& features, const Mat& mask,
                      const AttentionLayerParams& params,
                      const std::vector<int>& order) {
  check_layer_shapes(params, features.cols);
  if (mask.rows != features.rows || mask.cols != features.rows)
    throw std::invalid_argument("attention: mask shape mismatch");
  const std::vector<int> ord =
      order.empty() ? natural_order(features.rows) : order;
  const Mat q = matmul_nt(features, params.wq);
  const Mat k = matmul_nt(features, params.wk);
  return masked_softmax(q, k, mask, ord);
}

Mat attention_layer(const Mat& features, const Mat& mask,
                    const AttentionLayerParams& params,
                    const std::vector<int>& order) {
  const std::vector<int> ord =
      order.empty() ? natural_order(features.rows) : order;
  const Mat w = attention_weights(features, mask, params, ord);
  const Mat v = matmul_nt(features, params.wv);
  const int n = features.rows;
  const int d = features.cols;

  Mat out(n, d);
  for (int i = 0; i < n; ++i) {
    std::vector<double> acc(d, 0.0);
    for (int j : ord) {
      if (mask.at(i, j) != 0.0) continue;
      const double wij = w.at(i, j);
      for (int c = 0; c < d; ++c) acc[c] += wij * v.at(j, c);
    }
    // residual then layer norm
    for (int c = 0; c < d; ++c) acc[c] += features.at(i, c);
    double mean = 0.0;
    for (int c = 0; c < d; ++c) mean += acc[c];
    mean /= d;
    double var = 0.0;
    for (int c = 0; c < d; ++c) var += (acc[c] - mean) * (acc[c] - mean);
    var /= d;
    const double istd = 1.0 / std::sqrt(var + kLnEps);
    for (int c = 0; c < d; ++c)
      out.at(i, c) =
          params.ln_gain[c] * (acc[c] - mean) * istd + params.ln_bias[c];
  }
  return out;
}

ForwardTrace policy_forward_traced(const InformativeGraph& graph,
                                   const PolicyParameters& params) {
  const int n = static_cast<int>(graph.nodes.size());
  const int d = params.feature_dim;
  if (n == 0) throw std::invalid_argument("policy_forward: empty graph");
  if (graph.current_index < 0 || graph.current_index >= n)
    throw std::invalid_argument("policy_forward: bad current index");
  if (static_cast<int>(params.layers.size()) != params.layer_count)
    throw std::invalid_argument("policy_forward: layer count mismatch");
  if (params.embed_w.rows != d || params.embed_w.cols != 4 ||
      static_cast<int>(params.embed_b.size()) != d ||
      params.dec_wq.rows != d || params.dec_wq.cols != 2 * d + 4 ||
      params.dec_wk.rows != d || params.dec_wk.cols != d ||
      static_cast<int>(params.value_w.size()) != 2 * d)
    throw std::invalid_argument("policy_forward: parameter shape mismatch");
  if (graph.neighbor_indices.empty())
    throw IsolatedNodeError("current node has no graph neighbors");

  const std::vector<int>& ord = graph.canonical_order.empty()
                                    ? natural_order(n)
                                    : graph.canonical_order;
  const Mat mask = adjacency_mask(graph);

  ForwardTrace t;
  t.x = Mat(n, 4);
  for (int i = 0; i < n; ++i) {
    t.x.at(i, 0) = graph.nodes[i].x;
    t.x.at(i, 1) = graph.nodes[i].y;
    t.x.at(i, 2) = graph.nodes[i].u;
    t.x.at(i, 3) = graph.nodes[i].g;
  }

  Mat h = matmul_nt(t.x, params.embed_w);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) h.at(i, c) += params.embed_b[c];

  for (int l = 0; l < params.layer_count; ++l) {
    const AttentionLayerParams& lp = params.layers[l];
    check_layer_shapes(lp, d);
    t.h_in.push_back(h);
    Mat q = matmul_nt(h, lp.wq);
    Mat k = matmul_nt(h, lp.wk);
    Mat v = matmul_nt(h, lp.wv);
    Mat w = masked_softmax(q, k, mask, ord);
    Mat attended(n, d);
    for (int i = 0; i < n; ++i)
      for (int j : ord) {
        if (mask.at(i, j) != 0.0) continue;
        const double wij = w.at(i, j);
        for (int c = 0; c < d; ++c) attended.at(i, c) += wij * v.at(j, c);
      }
    Mat resid(n, d);
    Mat xhat(n, d);
    Mat out(n, d);
    std::vector<double> istd(n);
    for (int i = 0; i < n; ++i) {
      double mean = 0.0;
      for (int c = 0; c < d; ++c) {
        resid.at(i, c) = h.at(i, c) + attended.at(i, c);
        mean += resid.at(i, c);
      }
      mean /= d;
      double var = 0.0;
      for (int c = 0; c < d; ++c) {
        const double dev = resid.at(i, c) - mean;
        var += dev * dev;
      }
      var /= d;
      istd[i] = 1.0 / std::sqrt(var + kLnEps);
      for (int c = 0; c < d; ++c) {
        xhat.at(i, c) = (resid.at(i, c) - mean) * istd[i];
        out.at(i, c) = lp.ln_gain[c] * xhat.at(i, c) + lp.ln_bias[c];
      }
    }
    t.q.push_back(std::move(q));
    t.k.push_back(std::move(k));
    t.v.push_back(std::move(v));
    t.weights.push_back(std::move(w));
    t.attended.push_back(std::move(attended));
    t.resid.push_back(std::move(resid));
    t.ln_xhat.push_back(std::move(xhat));
    t.ln_istd.push_back(std::move(istd));
    h = std::move(out);
  }
  t.h_final = h;

  t.h_mean.assign(d, 0.0);
  for (int i : ord)
    for (int c = 0; c < d; ++c) t.h_mean[c] += t.h_final.at(i, c);
  for (int c = 0; c < d; ++c) t.h_mean[c] /= n;

  t.context.resize(2 * d + 4);
  for (int c = 0; c < d; ++c) {
    t.context[c] = t.h_final.at(graph.current_index, c);
    t.context[d + c] = t.h_mean[c];
  }
  t.context[2 * d + 0] = graph.guide_dx;
  t.context[2 * d + 1] = graph.guide_dy;
  t.context[2 * d + 2] = graph.prev_dx;
  t.context[2 * d + 3] = graph.prev_dy;

  t.dec_q.assign(d, 0.0);
  for (int r = 0; r < d; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 2 * d + 4; ++c)
      acc += params.dec_wq.at(r, c) * t.context[c];
    t.dec_q[r] = acc;
  }

  const int m = static_cast<int>(graph.neighbor_indices.size());
  t.dec_k = Mat(m, d);
  t.scores.assign(m, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < m; ++j) {
    const int node = graph.neighbor_indices[j];
    for (int r = 0; r < d; ++r) {
      double acc = 0.0;
      for (int c = 0; c < d; ++c)
        acc += params.dec_wk.at(r, c) * t.h_final.at(node, c);
      t.dec_k.at(j, r) = acc;
    }
    double s = 0.0;
    for (int r = 0; r < d; ++r) s += t.dec_q[r] * t.dec_k.at(j, r);
    t.scores[j] = s * scale;
  }

  // Softmax over the neighbors, reduced in canonical node order so the
  // result is invariant to id relabeling.
  std::vector<int> nbr_rank(m);
  std::iota(nbr_rank.begin(), nbr_rank.end(), 0);
  std::vector<int> canon_pos(n, 0);
  for (int pos = 0; pos < n; ++pos) canon_pos[ord[pos]] = pos;
  std::sort(nbr_rank.begin(), nbr_rank.end(), [&](int a, int b) {
    return canon_pos[graph.neighbor_indices[a]] <
           canon_pos[graph.neighbor_indices[b]];
  });
  double max_s = -std::numeric_limits<double>::infinity();
  for (double s : t.scores) max_s = std::max(max_s, s);
  double denom = 0.0;
  std::vector<double> exps(m);
  for (int j : nbr_rank) {
    exps[j] = std::exp(t.scores[j] - max_s);
    denom += exps[j];
  }
  t.dist.node_ids.resize(m);
  t.dist.probs.resize(m);
  for (int j = 0; j < m; ++j) {
    t.dist.node_ids[j] = graph.nodes[graph.neighbor_indices[j]].id;
    t.dist.probs[j] = exps[j] / denom;
  }

  t.value_in.resize(2 * d);
  for (int c = 0; c < d; ++c) {
    t.value_in[c] = t.h_final.at(graph.current_index, c);
    t.value_in[d + c] = t.h_mean[c];
  }
  double v = params.value_b;
  for (int c = 0; c < 2 * d; ++c) v += params.value_w[c] * t.value_in[c];
  t.value = v;
  return t;
}

PolicyDistribution policy_forward(const InformativeGraph& graph,
                                  const PolicyParameters& params) {
  return policy_forward_traced(graph, params).dist;
}

double value_forward(const InformativeGraph& graph,
                     const PolicyParameters& params) {
  return policy_forward_traced(graph, params).value;
}

int select_waypoint(const PolicyDistribution& dist, SelectMode mode, Rng* rng) {
  if (dist.node_ids.empty() || dist.node_ids.size() != dist.probs.size())
    throw std::invalid_argument("select_waypoint: empty distribution");
  if (mode == SelectMode::greedy) {
    size_t best = 0;
    for (size_t j = 1; j < dist.probs.size(); ++j)
      if (dist.probs[j] > dist.probs[best]) best = j;
    return dist.node_ids[best];
  }
  if (!rng) throw std::invalid_argument("select_waypoint: sampling needs rng");
  const double u = rng->uniform();
  double cum = 0.0;
  for (size_t j = 0; j < dist.probs.size(); ++j) {
    cum += dist.probs[j];
    if (u < cum) return dist.node_ids[j];
  }
  return dist.node_ids.back();
}

Deviation deviation(const Point& chosen, const Point& guided,
                    double node_resolution) {
  if (node_resolution <= 0.0)
    throw std::invalid_argument("deviation: node resolution must be positive");
  Deviation d;
  d.raw = distance(chosen, guided) /
          (4.0 * node_resolution * std::sqrt(2.0));
  d.clamped = std::clamp(d.raw, 0.0, 1.0);
  return d;
}

double instruction_reward(double d_t) {
  if (d_t < 0.0 || d_t > 1.0)
    throw std::domain_error("instruction_reward: deviation outside [0, 1]");
  // The anchors are part of the contract; libm rounding of expm1 at the
  // endpoints must not leak into them.
  if (d_t == 0.0) return 0.0;
  if (d_t == 1.0) return -1.0;
  return -std::expm1(d_t) / std::expm1(1.0);
}

double step_reward(const OccupancyBelief& prev_belief,
                   const OccupancyBelief& new_belief, double d_t, bool done,
                   const RewardConfig& config) {
  if (prev_belief.width != new_belief.width ||
      prev_belief.height != new_belief.height ||
      prev_belief.resolution != new_belief.resolution)
    throw std::invalid_argument("step_reward: belief snapshots disagree");
  long long revealed = 0;
  for (size_t i = 0; i < prev_belief.cells.size(); ++i)
    if (prev_belief.cells[i] == Belief::Unknown &&
        new_belief.cells[i] != Belief::Unknown)
      ++revealed;
  const double cells_per_scan =
      std::numbers::pi *
      (config.sensing_range / new_belief.resolution) *
      (config.sensing_range / new_belief.resolution);
  double r = config.alpha_obs * (static_cast<double>(revealed) / cells_per_scan);
  r += config.alpha_dev * instruction_reward(d_t);
  if (done) r += config.completion_bonus;
  r -= config.step_cost;
  return r;
}

}  // namespace gridscout
