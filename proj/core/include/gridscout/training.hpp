#pragma once

#include <string>
#include <vector>

#include "gridscout/mission.hpp"
#include "gridscout/policy.hpp"

namespace gridscout {

struct TrainHyper {
  int iterations = 100;
  int episodes_per_iter = 4;
  double lr = 1e-3;
  double gamma = 0.98;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  int feature_dim = 32;
  int layer_count = 2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int smooth_window = 5;  // trailing mean used for the learning curve
};

/// One decision from a rollout. `advantage` is treated as a constant by the
/// loss (the baseline is not differentiated through).
struct TrainSample {
  InformativeGraph graph;
  int action_index = -1;  // into the neighbor distribution
  double advantage = 0.0;
  double return_to_go = 0.0;
};

/// Mean over samples of
///   -log pi(a) * advantage + value_coef * (V - R)^2 - entropy_coef * H.
double policy_loss(const PolicyParameters& params,
                   const std::vector<TrainSample>& samples,
                   const TrainHyper& hyper);

/// Analytic gradient of policy_loss with respect to every parameter;
/// returns the loss. `grads` must be zero-initialized with matching shapes
/// (make_zero_like). Backpropagates through the pointer softmax, decoder,
/// mean pooling, layer norms, residuals, masked attention, and embedding.
double policy_loss_grads(const PolicyParameters& params,
                         const std::vector<TrainSample>& samples,
                         const TrainHyper& hyper, PolicyParameters* grads);

PolicyParameters make_zero_like(const PolicyParameters& params);

/// Flat view over every scalar parameter, in a fixed order shared by
/// save_checkpoint. Lets the optimizer and finite-difference checks walk
/// parameters without knowing the structure.
std::vector<double*> parameter_view(PolicyParameters& params);

struct TrainCurvePoint {
  int iteration = 0;
  double mean_return = 0.0;
  double smoothed_return = 0.0;  // trailing smooth_window mean
  double mean_deviation = 0.0;
  double mean_coverage = 0.0;
};

struct TrainResult {
  PolicyParameters params;
  std::vector<TrainCurvePoint> curve;
  bool diverged = false;
  std::string diagnostic;  // set when diverged
};

/// REINFORCE with a learned value baseline and Adam. Rollouts come from
/// run_episode on `mission` with the current weights in sampling mode.
/// Deterministic for a fixed (mission, hyper, seed). A non-finite loss or
/// gradient aborts training at that iteration with `diverged` set and the
/// last finite parameters returned.
TrainResult train_policy(const MissionConfig& mission, const TrainHyper& hyper,
                         unsigned long long seed);

}  // namespace gridscout
