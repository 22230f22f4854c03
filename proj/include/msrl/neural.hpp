// SPDX-License-Identifier: Apache-2.0
//
// Minimal dense network engine: tanh MLPs with manual reverse-mode
// gradients, softmax policy heads, the split actor (client trunk + head,
// server trunk + head), the centralized critic and an Adam optimizer.

#ifndef MSRL_NEURAL_HPP_
#define MSRL_NEURAL_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "msrl/common.hpp"

namespace msrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Dense {
  Mat w;  // out x in
  Vec b;  // out
};

using Params = std::vector<Dense>;

inline Params zeros_like(const Params& p) {
  Params z;
  z.reserve(p.size());
  for (const auto& l : p) z.push_back({Mat::Zero(l.w.rows(), l.w.cols()), Vec::Zero(l.b.size())});
  return z;
}

inline void set_zero(Params& p) {
  for (auto& l : p) {
    l.w.setZero();
    l.b.setZero();
  }
}

inline std::size_t count_params(const Params& p) {
  std::size_t n = 0;
  for (const auto& l : p) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

inline bool all_finite(const Params& p) {
  for (const auto& l : p)
    if (!l.w.allFinite() || !l.b.allFinite()) return false;
  return true;
}

struct MlpCache {
  std::vector<Vec> inputs;   // input to each layer
  std::vector<Vec> outputs;  // post-activation output of each layer
};

// Fully connected stack. Hidden layers use tanh; the last layer is identity
// when `linear_output`, otherwise tanh as well (trunks).
class Mlp {
 public:
  Mlp() = default;

  // dims = [in, h1, ..., out]. Glorot-uniform weights, zero biases.
  Mlp(std::vector<int> dims, bool linear_output, Rng& rng)
      : dims_(std::move(dims)), linear_output_(linear_output) {
    if (dims_.size() < 2) throw ContractError("Mlp needs at least two dims");
    for (int d : dims_)
      if (d < 1) throw ContractError("Mlp dims must be positive");
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
      const int in = dims_[i];
      const int out = dims_[i + 1];
      const double limit = std::sqrt(6.0 / (in + out));
      std::uniform_real_distribution<double> u(-limit, limit);
      Dense l{Mat(out, in), Vec::Zero(out)};
      for (int c = 0; c < in; ++c)
        for (int r = 0; r < out; ++r) l.w(r, c) = u(rng);
      layers_.push_back(std::move(l));
    }
  }

  int in_dim() const { return dims_.front(); }
  int out_dim() const { return dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  bool linear_output() const { return linear_output_; }
  Params& params() { return layers_; }
  const Params& params() const { return layers_; }
  std::size_t param_count() const { return count_params(layers_); }

  Vec forward(const Vec& x) const {
    check_input(x);
    Vec h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Vec z = layers_[i].w * h + layers_[i].b;
      h = is_linear(i) ? z : Vec(z.array().tanh());
    }
    return h;
  }

  Vec forward(const Vec& x, MlpCache& cache) const {
    check_input(x);
    cache.inputs.resize(layers_.size());
    cache.outputs.resize(layers_.size());
    Vec h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      cache.inputs[i] = h;
      Vec z = layers_[i].w * h + layers_[i].b;
      h = is_linear(i) ? z : Vec(z.array().tanh());
      cache.outputs[i] = h;
    }
    return h;
  }

  // Accumulates dL/dparams into `grad` and returns dL/dx.
  Vec backward(const MlpCache& cache, const Vec& grad_out, Params& grad) const {
    Vec g = grad_out;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      if (!is_linear(k)) {
        g = (g.array() * (1.0 - cache.outputs[k].array().square())).matrix();
      }
      grad[k].w.noalias() += g * cache.inputs[k].transpose();
      grad[k].b += g;
      g = layers_[k].w.transpose() * g;
    }
    return g;
  }

 private:
  bool is_linear(std::size_t i) const {
    return linear_output_ && i + 1 == layers_.size();
  }
  void check_input(const Vec& x) const {
    if (x.size() != dims_.front()) {
      throw ContractError("Mlp input width " + std::to_string(x.size()) +
                          " != " + std::to_string(dims_.front()));
    }
  }

  std::vector<int> dims_;
  bool linear_output_ = true;
  Params layers_;
};

// -- distributions -- //

inline constexpr double kProbFloor = 1e-12;

struct Distribution {
  std::vector<double> probs;
  double entropy = 0.0;  // nats
};

inline Distribution softmax(const Vec& logits) {
  Distribution d;
  const double mx = logits.maxCoeff();
  d.probs.resize(static_cast<std::size_t>(logits.size()));
  double z = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    d.probs[i] = std::exp(logits[i] - mx);
    z += d.probs[i];
  }
  for (auto& p : d.probs) p /= z;
  for (double p : d.probs)
    if (p > 0.0) d.entropy -= p * std::log(p);
  d.entropy = std::max(0.0, d.entropy);
  return d;
}

inline double log_prob(const Distribution& d, int action) {
  return std::log(std::max(d.probs[static_cast<std::size_t>(action)], kProbFloor));
}

struct Sampled {
  int action = 0;
  double log_prob = 0.0;
};

inline Sampled sample(const Distribution& d, Rng& rng) {
  const double u = uniform01(rng);
  double c = 0.0;
  int a = static_cast<int>(d.probs.size()) - 1;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    c += d.probs[i];
    if (u < c) {
      a = static_cast<int>(i);
      break;
    }
  }
  // never land on a zero-probability tail entry through rounding
  while (d.probs[static_cast<std::size_t>(a)] == 0.0 && a > 0) --a;
  return {a, log_prob(d, a)};
}

inline int argmax(const Distribution& d) {
  return static_cast<int>(std::max_element(d.probs.begin(), d.probs.end()) - d.probs.begin());
}

// d log pi(a) / d logits = onehot(a) - p
inline Vec dlogp_dlogits(const Distribution& d, int action) {
  Vec g(static_cast<Eigen::Index>(d.probs.size()));
  for (std::size_t i = 0; i < d.probs.size(); ++i) g[i] = -d.probs[i];
  g[action] += 1.0;
  return g;
}

// -- split actor -- //

enum class ActorPath { kClient, kServer };

struct ActorGrad {
  Params client, client_head, server, server_head;
  bool client_touched = false, client_head_touched = false;
  bool server_touched = false, server_head_touched = false;
};

// Cached forward pass of one actor path for a single observation.
struct PathForward {
  ActorPath path = ActorPath::kClient;
  MlpCache client, client_head, server, server_head;
  Vec features;
  Distribution dist;
};

// Client side: obs -> client trunk (hidden_sizes[0..split)) -> client head.
// Server side: client features -> server trunk (hidden_sizes[split..]) ->
// server head. Both heads emit |A| logits.
class SplitActor {
 public:
  SplitActor() = default;

  SplitActor(int obs_dim, std::vector<int> hidden_sizes, int split_index,
             int num_actions, Rng& rng)
      : hidden_(std::move(hidden_sizes)), split_(split_index), actions_(num_actions) {
    if (split_ < 1 || split_ >= static_cast<int>(hidden_.size()))
      throw ContractError("split index must leave layers on both sides");
    if (num_actions < 1) throw ContractError("need at least one action");
    std::vector<int> cd{obs_dim};
    cd.insert(cd.end(), hidden_.begin(), hidden_.begin() + split_);
    std::vector<int> sd{hidden_[split_ - 1]};
    sd.insert(sd.end(), hidden_.begin() + split_, hidden_.end());
    client_ = Mlp(cd, false, rng);
    client_head_ = Mlp({cd.back(), num_actions}, true, rng);
    server_ = Mlp(sd, false, rng);
    server_head_ = Mlp({sd.back(), num_actions}, true, rng);
  }

  int obs_dim() const { return client_.in_dim(); }
  int num_actions() const { return actions_; }
  int split_index() const { return split_; }
  const std::vector<int>& hidden_sizes() const { return hidden_; }

  Mlp& client() { return client_; }
  Mlp& client_head() { return client_head_; }
  Mlp& server() { return server_; }
  Mlp& server_head() { return server_head_; }
  const Mlp& client() const { return client_; }
  const Mlp& client_head() const { return client_head_; }
  const Mlp& server() const { return server_; }
  const Mlp& server_head() const { return server_head_; }

  struct ClientOutput {
    Vec features;
    Distribution dist;
  };

  ClientOutput forward_client(const Vec& obs) const {
    Vec f = client_.forward(obs);
    return {f, softmax(client_head_.forward(f))};
  }

  Distribution forward_server(const Vec& features) const {
    if (features.size() != server_.in_dim())
      throw ContractError("server input width mismatch");
    ++server_forward_calls_;
    return softmax(server_head_.forward(server_.forward(features)));
  }

  // Training forward with caches for backprop.
  void forward_path(const Vec& obs, ActorPath path, PathForward& fw) const {
    fw.path = path;
    fw.features = client_.forward(obs, fw.client);
    if (path == ActorPath::kClient) {
      fw.dist = softmax(client_head_.forward(fw.features, fw.client_head));
    } else {
      ++server_forward_calls_;
      Vec s = server_.forward(fw.features, fw.server);
      fw.dist = softmax(server_head_.forward(s, fw.server_head));
    }
  }

  // Backprop dL/dlogits along the cached path. Only the parameter groups on
  // that path receive gradient.
  void backward_path(const PathForward& fw, const Vec& dlogits, ActorGrad& g) const {
    Vec df;
    if (fw.path == ActorPath::kClient) {
      df = client_head_.backward(fw.client_head, dlogits, g.client_head);
      g.client_head_touched = true;
    } else {
      Vec ds = server_head_.backward(fw.server_head, dlogits, g.server_head);
      df = server_.backward(fw.server, ds, g.server);
      g.server_head_touched = g.server_touched = true;
    }
    client_.backward(fw.client, df, g.client);
    g.client_touched = true;
  }

  ActorGrad zero_grad() const {
    return {zeros_like(client_.params()), zeros_like(client_head_.params()),
            zeros_like(server_.params()), zeros_like(server_head_.params())};
  }

  // Weights + biases in use. The client+server count keeps the client head,
  // since that head still runs every slot to produce the gating entropy.
  std::size_t param_count(ActorPath mode) const {
    const auto c = client_.param_count() + client_head_.param_count();
    if (mode == ActorPath::kClient) return c;
    return c + server_.param_count() + server_head_.param_count();
  }

  std::size_t server_forward_calls() const { return server_forward_calls_; }
  void reset_server_forward_calls() { server_forward_calls_ = 0; }

 private:
  std::vector<int> hidden_;
  int split_ = 2;
  int actions_ = 1;
  Mlp client_, client_head_, server_, server_head_;
  mutable std::size_t server_forward_calls_ = 0;
};

// Centralized action-value network: input = joint observation (acting agent
// first) followed by the one-hot joint action in the same order.
class Critic {
 public:
  Critic() = default;
  Critic(int joint_obs_dim, int num_agents, int num_actions,
         const std::vector<int>& hidden, Rng& rng)
      : obs_dim_(joint_obs_dim), agents_(num_agents), actions_(num_actions) {
    std::vector<int> dims{input_dim()};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    net_ = Mlp(dims, true, rng);
  }

  int input_dim() const { return obs_dim_ + agents_ * actions_; }
  int num_agents() const { return agents_; }
  int num_actions() const { return actions_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  Vec encode(const Vec& joint_obs, std::span<const int> joint_action) const {
    if (joint_obs.size() != obs_dim_ || static_cast<int>(joint_action.size()) != agents_)
      throw ContractError("critic input width mismatch");
    Vec x = Vec::Zero(input_dim());
    x.head(obs_dim_) = joint_obs;
    for (int v = 0; v < agents_; ++v) {
      const int a = joint_action[static_cast<std::size_t>(v)];
      if (a < 0 || a >= actions_) throw ContractError("critic: action out of range");
      x[obs_dim_ + v * actions_ + a] = 1.0;
    }
    return x;
  }

  double value(const Vec& joint_obs, std::span<const int> joint_action) const {
    return net_.forward(encode(joint_obs, joint_action))[0];
  }

 private:
  int obs_dim_ = 0;
  int agents_ = 0;
  int actions_ = 0;
  Mlp net_;
};

// -- optimizer -- //

struct AdamState {
  Params m, v;
  long step = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adam_step(Params& params, const Params& grads, AdamState& st,
                      const AdamConfig& cfg) {
  if (st.m.empty()) {
    st.m = zeros_like(params);
    st.v = zeros_like(params);
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(params[i].w, grads[i].w, st.m[i].w, st.v[i].w);
    update(params[i].b, grads[i].b, st.m[i].b, st.v[i].b);
  }
}

inline void scale(Params& p, double s) {
  for (auto& l : p) {
    l.w *= s;
    l.b *= s;
  }
}

// -- gradient checking -- //

// Max relative error between `analytic` and central differences of
// `loss` over every parameter in `params`:
// |a - n| / max(1e-8, |a| + |n|).
inline double grad_check(Params& params, const Params& analytic,
                         const std::function<double()>& loss, double step = 1e-5) {
  double worst = 0.0;
  auto probe = [&](double& x, double a) {
    const double orig = x;
    x = orig + step;
    const double lp = loss();
    x = orig - step;
    const double lm = loss();
    x = orig;
    const double num = (lp - lm) / (2.0 * step);
    const double denom = std::max(1e-8, std::abs(a) + std::abs(num));
    worst = std::max(worst, std::abs(a - num) / denom);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (Eigen::Index k = 0; k < params[i].w.size(); ++k)
      probe(params[i].w.data()[k], analytic[i].w.data()[k]);
    for (Eigen::Index k = 0; k < params[i].b.size(); ++k)
      probe(params[i].b.data()[k], analytic[i].b.data()[k]);
  }
  return worst;
}

}  // namespace msrl

#endif  // MSRL_NEURAL_HPP_
