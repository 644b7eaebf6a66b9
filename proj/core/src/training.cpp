#include "gridscout/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gridscout {
namespace {

// Loss for one decision given its forward trace; gradient accumulation is
// optional. Derivatives follow the trace backwards: pointer softmax,
// decoder projections, value head, mean pooling, then per layer the layer
// norm, residual, attention mixture, masked softmax, and the q/k/v maps.
double sample_loss_and_grads(const PolicyParameters& p, const TrainSample& s,
                             const TrainHyper& hy, PolicyParameters* g) {
  const ForwardTrace t = policy_forward_traced(s.graph, p);
  const int n = static_cast<int>(s.graph.nodes.size());
  const int d = p.feature_dim;
  const int m = static_cast<int>(t.dist.probs.size());
  if (s.action_index < 0 || s.action_index >= m)
    throw std::invalid_argument("train sample: action index out of range");

  const std::vector<double>& probs = t.dist.probs;
  double entropy = 0.0;
  for (double q : probs) entropy -= q * std::log(q);
  const double log_pa = std::log(probs[s.action_index]);
  const double verr = t.value - s.return_to_go;
  const double loss = -log_pa * s.advantage + hy.value_coef * verr * verr -
                      hy.entropy_coef * entropy;
  if (!g) return loss;

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  // Pointer scores: d(-adv * log p_a)/ds_j = -adv * (1[j==a] - p_j);
  // d(-c_H * H)/ds_j = c_H * p_j * (log p_j + H).
  std::vector<double> ds(m);
  for (int j = 0; j < m; ++j) {
    ds[j] = -s.advantage * ((j == s.action_index ? 1.0 : 0.0) - probs[j]) +
            hy.entropy_coef * probs[j] * (std::log(probs[j]) + entropy);
  }

  std::vector<double> ddec_q(d, 0.0);
  Mat ddec_k(m, d);
  for (int j = 0; j < m; ++j)
    for (int r = 0; r < d; ++r) {
      ddec_q[r] += scale * ds[j] * t.dec_k.at(j, r);
      ddec_k.at(j, r) = scale * ds[j] * t.dec_q[r];
    }

  Mat dh(n, d);  // gradient w.r.t. h_final

  // dec_k_j = dec_wk * h_final[node_j]
  for (int j = 0; j < m; ++j) {
    const int node = s.graph.neighbor_indices[j];
    for (int r = 0; r < d; ++r) {
      const double gr = ddec_k.at(j, r);
      for (int c = 0; c < d; ++c) {
        g->dec_wk.at(r, c) += gr * t.h_final.at(node, c);
        dh.at(node, c) += p.dec_wk.at(r, c) * gr;
      }
    }
  }

  // dec_q = dec_wq * context
  std::vector<double> dcontext(2 * d + 4, 0.0);
  for (int r = 0; r < d; ++r) {
    const double gr = ddec_q[r];
    for (int c = 0; c < 2 * d + 4; ++c) {
      g->dec_wq.at(r, c) += gr * t.context[c];
      dcontext[c] += p.dec_wq.at(r, c) * gr;
    }
  }

  // value head
  const double dv = 2.0 * hy.value_coef * verr;
  g->value_b += dv;
  std::vector<double> dvalue_in(2 * d);
  for (int c = 0; c < 2 * d; ++c) {
    g->value_w[c] += dv * t.value_in[c];
    dvalue_in[c] = dv * p.value_w[c];
  }

  // context = [h_cur | h_mean | guidance scalars]; value_in = [h_cur | h_mean]
  const int cur = s.graph.current_index;
  std::vector<double> dh_mean(d);
  for (int c = 0; c < d; ++c) {
    dh.at(cur, c) += dcontext[c] + dvalue_in[c];
    dh_mean[c] = dcontext[d + c] + dvalue_in[d + c];
  }
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) dh.at(i, c) += dh_mean[c] / n;

  const Mat mask = adjacency_mask(s.graph);
  for (int l = p.layer_count - 1; l >= 0; --l) {
    const AttentionLayerParams& lp = p.layers[l];
    AttentionLayerParams& lg = g->layers[l];
    const Mat& h_in = t.h_in[l];
    const Mat& xhat = t.ln_xhat[l];
    const std::vector<double>& istd = t.ln_istd[l];

    // layer norm: out = gain * xhat + bias
    Mat dr(n, d);
    for (int i = 0; i < n; ++i) {
      double mean_dx = 0.0, mean_dxx = 0.0;
      for (int c = 0; c < d; ++c) {
        lg.ln_gain[c] += dh.at(i, c) * xhat.at(i, c);
        lg.ln_bias[c] += dh.at(i, c);
        const double dx = dh.at(i, c) * lp.ln_gain[c];
        mean_dx += dx;
        mean_dxx += dx * xhat.at(i, c);
      }
      mean_dx /= d;
      mean_dxx /= d;
      for (int c = 0; c < d; ++c) {
        const double dx = dh.at(i, c) * lp.ln_gain[c];
        dr.at(i, c) = istd[i] * (dx - mean_dx - xhat.at(i, c) * mean_dxx);
      }
    }

    // residual: r = h_in + sum_j w_ij v_j
    Mat dw(n, n), dvv(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (mask.at(i, j) != 0.0) continue;
        double acc = 0.0;
        const double wij = t.weights[l].at(i, j);
        for (int c = 0; c < d; ++c) {
          acc += dr.at(i, c) * t.v[l].at(j, c);
          dvv.at(j, c) += wij * dr.at(i, c);
        }
        dw.at(i, j) = acc;
      }

    // softmax rows: du_ij = w_ij (dw_ij - sum_k w_ik dw_ik)
    Mat dq(n, d), dk(n, d);
    for (int i = 0; i < n; ++i) {
      double row_dot = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask.at(i, j) == 0.0) row_dot += t.weights[l].at(i, j) * dw.at(i, j);
      for (int j = 0; j < n; ++j) {
        if (mask.at(i, j) != 0.0) continue;
        const double du = t.weights[l].at(i, j) * (dw.at(i, j) - row_dot);
        for (int c = 0; c < d; ++c) {
          dq.at(i, c) += scale * du * t.k[l].at(j, c);
          dk.at(j, c) += scale * du * t.q[l].at(i, c);
        }
      }
    }

    // q = h_in wq^T (likewise k, v); input gradient replaces dh
    Mat dh_in = dr;  // residual skip path
    auto back_project = [&](const Mat& dout, const Mat& w_mat, Mat& w_grad) {
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < d; ++r) {
          const double gr = dout.at(i, r);
          if (gr == 0.0) continue;
          for (int c = 0; c < d; ++c) {
            w_grad.at(r, c) += gr * h_in.at(i, c);
            dh_in.at(i, c) += w_mat.at(r, c) * gr;
          }
        }
    };
    back_project(dq, lp.wq, lg.wq);
    back_project(dk, lp.wk, lg.wk);
    back_project(dvv, lp.wv, lg.wv);
    dh = std::move(dh_in);
  }

  // embedding: h0 = x embed_w^T + embed_b
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < d; ++r) {
      const double gr = dh.at(i, r);
      g->embed_b[r] += gr;
      for (int c = 0; c < 4; ++c) g->embed_w.at(r, c) += gr * t.x.at(i, c);
    }
  return loss;
}

}  // namespace

double policy_loss(const PolicyParameters& params,
                   const std::vector<TrainSample>& samples,
                   const TrainHyper& hyper) {
  if (samples.empty()) throw std::invalid_argument("policy_loss: no samples");
  double total = 0.0;
  for (const TrainSample& s : samples)
    total += sample_loss_and_grads(params, s, hyper, nullptr);
  return total / samples.size();
}

double policy_loss_grads(const PolicyParameters& params,
                         const std::vector<TrainSample>& samples,
                         const TrainHyper& hyper, PolicyParameters* grads) {
  if (samples.empty()) throw std::invalid_argument("policy_loss: no samples");
  if (!grads) throw std::invalid_argument("policy_loss_grads: null gradients");
  double total = 0.0;
  for (const TrainSample& s : samples)
    total += sample_loss_and_grads(params, s, hyper, grads);
  const double inv = 1.0 / samples.size();
  for (double* v : parameter_view(*grads)) *v *= inv;
  return total * inv;
}

PolicyParameters make_zero_like(const PolicyParameters& params) {
  PolicyParameters z = params;
  for (double* v : parameter_view(z)) *v = 0.0;
  return z;
}

std::vector<double*> parameter_view(PolicyParameters& params) {
  std::vector<double*> out;
  auto add_mat = [&](Mat& m) {
    for (double& v : m.data) out.push_back(&v);
  };
  auto add_vec = [&](std::vector<double>& v) {
    for (double& x : v) out.push_back(&x);
  };
  add_mat(params.embed_w);
  add_vec(params.embed_b);
  for (AttentionLayerParams& l : params.layers) {
    add_mat(l.wq);
    add_mat(l.wk);
    add_mat(l.wv);
    add_vec(l.ln_gain);
    add_vec(l.ln_bias);
  }
  add_mat(params.dec_wq);
  add_mat(params.dec_wk);
  add_vec(params.value_w);
  out.push_back(&params.value_b);
  return out;
}

TrainResult train_policy(const MissionConfig& mission, const TrainHyper& hyper,
                         unsigned long long seed) {
  if (hyper.iterations < 1 || hyper.episodes_per_iter < 1)
    throw std::invalid_argument("train_policy: nonpositive loop counts");
  TrainResult result;
  Rng init_rng(mix_seed(seed, 101));
  PolicyParameters params =
      PolicyParameters::init(hyper.feature_dim, hyper.layer_count, init_rng);
  PolicyParameters adam_m = make_zero_like(params);
  PolicyParameters adam_v = make_zero_like(params);

  struct Captured {
    InformativeGraph graph;
    int action = -1;
    double reward = 0.0;
  };

  std::vector<double> return_history;
  int adam_t = 0;
  for (int iter = 0; iter < hyper.iterations; ++iter) {
    std::vector<TrainSample> samples;
    double sum_return = 0.0, sum_dev = 0.0, sum_cov = 0.0;
    long long dev_steps = 0;
    for (int ep = 0; ep < hyper.episodes_per_iter; ++ep) {
      MissionConfig cfg = mission;
      cfg.policy = PolicyMode::learned;
      cfg.select = SelectMode::sample;
      cfg.policy_params = &params;
      cfg.rng_seed = mix_seed(
          seed, 1000ull + static_cast<unsigned long long>(iter) *
                              hyper.episodes_per_iter + ep);
      std::vector<Captured> caps;
      EpisodeLog log = run_episode(cfg, [&](const PolicyStepView& view) {
        caps.push_back({view.graph, view.action_index, view.reward});
      });
      double ep_return = 0.0;
      for (const StepRecord& sr : log.steps) {
        ep_return += sr.reward;
        sum_dev += sr.deviation;
      }
      dev_steps += static_cast<long long>(log.steps.size());
      sum_return += ep_return;
      sum_cov += log.coverage;

      double running = 0.0;
      std::vector<double> returns(caps.size());
      for (int i = static_cast<int>(caps.size()) - 1; i >= 0; --i) {
        running = caps[i].reward + hyper.gamma * running;
        returns[i] = running;
      }
      for (size_t i = 0; i < caps.size(); ++i) {
        TrainSample s;
        s.graph = std::move(caps[i].graph);
        s.action_index = caps[i].action;
        s.return_to_go = returns[i];
        s.advantage = returns[i] - value_forward(s.graph, params);
        samples.push_back(std::move(s));
      }
    }

    TrainCurvePoint point;
    point.iteration = iter;
    point.mean_return = sum_return / hyper.episodes_per_iter;
    point.mean_deviation = dev_steps ? sum_dev / dev_steps : 0.0;
    point.mean_coverage = sum_cov / hyper.episodes_per_iter;
    return_history.push_back(point.mean_return);
    const int win = std::min<int>(hyper.smooth_window,
                                  static_cast<int>(return_history.size()));
    point.smoothed_return =
        std::accumulate(return_history.end() - win, return_history.end(), 0.0) /
        win;
    result.curve.push_back(point);

    if (samples.empty()) continue;  // aborted rollouts produced no decisions

    PolicyParameters grads = make_zero_like(params);
    const double loss = policy_loss_grads(params, samples, hyper, &grads);
    if (!std::isfinite(loss) || !grads.all_finite()) {
      result.diverged = true;
      result.diagnostic = "non-finite loss or gradient at iteration " +
                          std::to_string(iter);
      break;
    }

    ++adam_t;
    auto pv = parameter_view(params);
    auto gv = parameter_view(grads);
    auto mv = parameter_view(adam_m);
    auto vv = parameter_view(adam_v);
    const double bc1 = 1.0 - std::pow(hyper.adam_beta1, adam_t);
    const double bc2 = 1.0 - std::pow(hyper.adam_beta2, adam_t);
    for (size_t i = 0; i < pv.size(); ++i) {
      const double gradient = *gv[i];
      *mv[i] = hyper.adam_beta1 * *mv[i] + (1.0 - hyper.adam_beta1) * gradient;
      *vv[i] = hyper.adam_beta2 * *vv[i] +
               (1.0 - hyper.adam_beta2) * gradient * gradient;
      *pv[i] -= hyper.lr * (*mv[i] / bc1) / (std::sqrt(*vv[i] / bc2) +
                                             hyper.adam_eps);
    }
    if (!params.all_finite()) {
      result.diverged = true;
      result.diagnostic =
          "non-finite parameters after update at iteration " +
          std::to_string(iter);
      break;
    }
  }
  result.params = std::move(params);
  return result;
}

}  // namespace gridscout
