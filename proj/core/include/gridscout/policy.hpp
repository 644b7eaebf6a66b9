#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gridscout/rng.hpp"
#include "gridscout/viewpoint_graph.hpp"

namespace gridscout {

/// Dense row-major matrix. Deliberately minimal: the policy network is a few
/// hundred weights, not a linear-algebra workload.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  friend bool operator==(const Mat&, const Mat&) = default;
};

struct AttentionLayerParams {
  Mat wq, wk, wv;               // feature_dim x feature_dim
  std::vector<double> ln_gain;  // feature_dim
  std::vector<double> ln_bias;  // feature_dim
};

/// All learnable weights. The decoder query is built from the current node's
/// embedding, the mean-pooled graph embedding, and four context scalars (the
/// offsets of the guided waypoint and of the previous move), hence the
/// 2*feature_dim + 4 input width of dec_wq.
struct PolicyParameters {
  int feature_dim = 64;
  int layer_count = 3;
  Mat embed_w;                  // feature_dim x 4
  std::vector<double> embed_b;  // feature_dim
  std::vector<AttentionLayerParams> layers;
  Mat dec_wq;                   // feature_dim x (2*feature_dim + 4)
  Mat dec_wk;                   // feature_dim x feature_dim
  std::vector<double> value_w;  // 2*feature_dim
  double value_b = 0.0;

  static PolicyParameters init(int feature_dim, int layer_count, Rng& rng);
  bool all_finite() const;
};

/// Versioned text checkpoint with shape headers; numbers round-trip
/// bit-exactly. Throws std::invalid_argument on malformed files.
void save_checkpoint(const PolicyParameters& params, const std::string& path);
PolicyParameters load_checkpoint(const std::string& path);

/// Node feature record: position in the robot-centric window frame (scaled
/// by the window half-width), utility normalized by a running maximum, and
/// the binary guidepost flag.
struct InfoNode {
  double x = 0.0;
  double y = 0.0;
  double u = 0.0;
  double g = 0.0;
  int id = -1;  // viewpoint id, for mapping back to the graph
};

/// Slow-loop guidance handed to the feature builder. `path_positions` are
/// the world-frame positions of the grounded global-path nodes;
/// `next_waypoint` is w_t*, the first of them not yet reached.
struct GuidanceContext {
  std::vector<Point> path_positions;
  std::optional<Point> next_waypoint;
  std::optional<Point> previous_position;  // robot pose one step ago
  double node_resolution = 1.2;
};

/// Local graph plus guidance, flattened for the network. canonical_order
/// lists node indices sorted by feature tuple; every reduction in the
/// forward pass iterates in that order, which makes the policy output
/// exactly invariant under node-id relabeling (same floats, not just close).
struct InformativeGraph {
  std::vector<InfoNode> nodes;             // ascending viewpoint id
  std::vector<std::pair<int, int>> edges;  // index pairs into nodes
  int current_index = -1;
  std::vector<int> neighbor_indices;       // of the current node, ascending id
  double guide_dx = 0.0, guide_dy = 0.0;   // w_t* offset, window-normalized
  double prev_dx = 0.0, prev_dy = 0.0;     // last executed move, same frame
  std::vector<int> canonical_order;
};

/// Throws std::invalid_argument when the local graph is empty.
InformativeGraph build_informative_graph(const LocalGraph& local,
                                         const GuidanceContext& guidance,
                                         double running_max_utility);

/// Mask M with M(i,j) = 0 iff j == i or (i,j) is an edge; 1 otherwise
/// (masked). Self-edges are always permitted so no row is fully masked by
/// construction.
Mat adjacency_mask(const InformativeGraph& graph);

/// Row-stochastic attention weights: scaled dot-product scores, softmax over
/// unmasked entries only; masked entries are exactly zero. `order` fixes the
/// reduction order (empty = natural order). Throws std::invalid_argument on
/// a fully masked row.
Mat attention_weights(const Mat& features, const Mat& mask,
                      const AttentionLayerParams& params,
                      const std::vector<int>& order = {});

/// One encoder layer: masked attention, residual add, layer normalization.
Mat attention_layer(const Mat& features, const Mat& mask,
                    const AttentionLayerParams& params,
                    const std::vector<int>& order = {});

struct PolicyDistribution {
  std::vector<int> node_ids;   // neighbor viewpoint ids, ascending
  std::vector<double> probs;   // aligned with node_ids, sums to 1
};

/// Raised when the current node has no neighbor to move to; the mission
/// loop reacts by replanning rather than treating it as a bug.
class IsolatedNodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  Mat x;                       // n x 4 inputs
  std::vector<Mat> h_in;       // features entering layer l (h_in[0] = embedding)
  std::vector<Mat> q, k, v;    // per layer
  std::vector<Mat> weights;    // per layer attention weights
  std::vector<Mat> attended;   // per layer W * V
  std::vector<Mat> resid;      // per layer pre-normalization sum
  std::vector<Mat> ln_xhat;    // per layer normalized rows (pre gain/bias)
  std::vector<std::vector<double>> ln_istd;  // per layer, per row 1/sqrt(var+eps)
  Mat h_final;
  std::vector<double> h_mean;
  std::vector<double> context;  // [h_cur | h_mean | 4 scalars]
  std::vector<double> dec_q;
  Mat dec_k;                    // neighbors x feature_dim
  std::vector<double> scores;   // per neighbor
  PolicyDistribution dist;
  std::vector<double> value_in;  // [h_cur | h_mean]
  double value = 0.0;
};

/// Full forward pass with intermediates retained. Throws IsolatedNodeError
/// when the current node has no neighbors, std::invalid_argument on
/// shape mismatches.
ForwardTrace policy_forward_traced(const InformativeGraph& graph,
                                   const PolicyParameters& params);

/// Distribution over the current node's neighbors.
PolicyDistribution policy_forward(const InformativeGraph& graph,
                                  const PolicyParameters& params);

/// State-value estimate from the same trunk.
double value_forward(const InformativeGraph& graph,
                     const PolicyParameters& params);

enum class SelectMode { greedy, sample };

/// Greedy: argmax probability, ties toward the smaller node id. Sample:
/// draw from the distribution with the supplied generator (required).
int select_waypoint(const PolicyDistribution& dist, SelectMode mode,
                    Rng* rng = nullptr);

struct Deviation {
  double raw = 0.0;      // ||w_t - w_t*|| / (4 * node_resolution * sqrt(2))
  double clamped = 0.0;  // raw clamped to [0, 1], the reward-facing value
};

Deviation deviation(const Point& chosen, const Point& guided,
                    double node_resolution);

/// -(e^d - 1)/(e - 1); 0 at d = 0, -1 at d = 1, strictly decreasing.
/// Throws std::domain_error outside [0, 1] (clamp upstream).
double instruction_reward(double d_t);

struct RewardConfig {
  double alpha_obs = 1.0;
  double alpha_dev = 0.5;
  double completion_bonus = 20.0;
  double step_cost = 0.02;
  double sensing_range = 4.0;  // normalizer: cells one full scan can reveal
};

/// Composite step reward: normalized newly revealed cells, deviation
/// penalty, completion bonus, constant step cost.
double step_reward(const OccupancyBelief& prev_belief,
                   const OccupancyBelief& new_belief, double d_t, bool done,
                   const RewardConfig& config);

}  // namespace gridscout
