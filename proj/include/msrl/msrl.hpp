// SPDX-License-Identifier: Apache-2.0
//
// Multi-agent split actor-critic training: entropy-gated rollouts, lambda
// returns on a centralized critic, counterfactual advantages, clipped
// surrogate updates and critic regression; plus greedy evaluation.

#ifndef MSRL_MSRL_HPP_
#define MSRL_MSRL_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msrl/envsim.hpp"
#include "msrl/io.hpp"
#include "msrl/neural.hpp"
#include "msrl/policies.hpp"
#include "msrl/switching.hpp"

namespace msrl {

struct TrainConfig {
  double gamma = 0.95;
  double lam = 0.95;
  double clip = 0.2;
  int epochs = 4;      // K
  int minibatch = 8;   // G, in slots
  double lr = 1e-3;
  int episodes = 300;
  SwitchConfig switching;
  std::uint64_t seed = 1;
  std::vector<int> actor_sizes{8, 16, 16, 32, 16};
  int split_index = 2;
  std::vector<int> critic_sizes{32, 32};
  bool critic_per_agent = false;
  bool server_enabled = true;  // false pins SplitModel to the client path
  bool normalize_advantages = true;
  bool dual_on_server = false;  // also train the client path whenever the server acts
  int checkpoint_every = 50;
  std::optional<RewardMode> reward_mode;

  void validate() const {
    if (!(gamma > 0 && gamma <= 1)) throw ConfigError("train.gamma must be in (0,1]");
    if (!(lam > 0 && lam <= 1)) throw ConfigError("train.lam must be in (0,1]");
    if (!(clip > 0 && clip < 1)) throw ConfigError("train.clip must be in (0,1)");
    if (epochs < 1 || minibatch < 1) throw ConfigError("train.epochs/minibatch must be >= 1");
    if (!(lr > 0)) throw ConfigError("train.lr must be > 0");
    if (episodes < 0) throw ConfigError("train.episodes must be >= 0");
    if (split_index < 1 || split_index >= static_cast<int>(actor_sizes.size()))
      throw ConfigError("train.split_index must leave layers on both sides");
    if (checkpoint_every < 1) throw ConfigError("train.checkpoint_every must be >= 1");
  }

  static std::vector<int> parse_sizes(const std::string& s, const char* key) {
    std::vector<int> out;
    for (const auto& item : split(s, ',')) {
      auto v = parse_int(item);
      if (!v || *v < 1) throw ConfigError(std::string(key) + ": bad layer size '" + item + "'");
      out.push_back(static_cast<int>(*v));
    }
    return out;
  }

  static TrainConfig from(const KeyValueConfig& kv) {
    TrainConfig c;
    c.gamma = kv.get_double("train.gamma", c.gamma);
    c.lam = kv.get_double("train.lam", c.lam);
    c.clip = kv.get_double("train.clip", c.clip);
    c.epochs = static_cast<int>(kv.get_int("train.epochs", c.epochs));
    c.minibatch = static_cast<int>(kv.get_int("train.minibatch", c.minibatch));
    c.lr = kv.get_double("train.lr", c.lr);
    c.episodes = static_cast<int>(kv.get_int("train.episodes", c.episodes));
    c.switching.thr0 = kv.get_double("train.thr0", c.switching.thr0);
    c.switching.change = kv.get_double("train.ch", c.switching.change);
    c.switching.window = static_cast<int>(kv.get_int("train.window", c.switching.window));
    c.switching.hold = static_cast<int>(kv.get_int("train.hold", c.switching.hold));
    c.switching.flutter_limit =
        static_cast<int>(kv.get_int("train.flutter_limit", c.switching.flutter_limit));
    c.seed = static_cast<std::uint64_t>(kv.get_int("train.seed", static_cast<long long>(c.seed)));
    if (kv.has("train.actor_sizes"))
      c.actor_sizes = parse_sizes(kv.get_string("train.actor_sizes", ""), "train.actor_sizes");
    c.split_index = static_cast<int>(kv.get_int("train.split_index", c.split_index));
    if (kv.has("train.critic_sizes"))
      c.critic_sizes = parse_sizes(kv.get_string("train.critic_sizes", ""), "train.critic_sizes");
    c.critic_per_agent = kv.get_bool("train.critic_per_agent", c.critic_per_agent);
    c.server_enabled = kv.get_bool("train.server_enabled", c.server_enabled);
    c.normalize_advantages = kv.get_bool("train.adv_norm", c.normalize_advantages);
    c.dual_on_server = kv.get_bool("train.dual_on_server", c.dual_on_server);
    c.checkpoint_every = static_cast<int>(kv.get_int("train.checkpoint_every", c.checkpoint_every));
    if (kv.has("train.reward_mode")) {
      const auto m = kv.get_string("train.reward_mode", "");
      if (m == "latency") c.reward_mode = RewardMode::kLatency;
      else if (m == "qoe") c.reward_mode = RewardMode::kQoe;
      else throw ConfigError("train.reward_mode must be latency or qoe");
    }
    c.validate();
    return c;
  }
};

// -- return and advantage estimators -- //

// qhat_t = Q_t + sum_{k>=t} (gamma lam)^{k-t} delta_k with
// delta_t = r_t + gamma Q_{t+1} - Q_t and Q_T = 0, by backward recursion.
inline std::vector<double> lambda_returns(std::span<const double> rewards,
                                          std::span<const double> q, double gamma,
                                          double lam) {
  if (rewards.size() != q.size()) throw ContractError("lambda_returns: length mismatch");
  const auto n = rewards.size();
  std::vector<double> out(n);
  double acc = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next = t + 1 < n ? q[t + 1] : 0.0;
    const double delta = rewards[t] + gamma * next - q[t];
    acc = delta + gamma * lam * acc;
    out[t] = q[t] + acc;
  }
  return out;
}

// b = sum_a' pi(a') Q(a', a_{-v}).
inline double counterfactual_baseline(std::span<const double> probs,
                                      std::span<const double> q_own_actions) {
  if (probs.size() != q_own_actions.size()) throw ContractError("baseline: length mismatch");
  double b = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) b += probs[a] * q_own_actions[a];
  return b;
}

struct SurrogateTerm {
  double value = 0.0;     // min(beta A, clip(beta) A)
  double d_logp = 0.0;    // d value / d log pi_new
};

inline SurrogateTerm clipped_surrogate(double new_logp, double old_logp, double adv,
                                       double clip) {
  const double beta = std::exp(new_logp - old_logp);
  const double unclipped = beta * adv;
  const double clipped = std::clamp(beta, 1.0 - clip, 1.0 + clip) * adv;
  if (unclipped <= clipped) return {unclipped, unclipped};
  return {clipped, 0.0};
}

inline double critic_mse(std::span<const double> targets, std::span<const double> outputs) {
  if (targets.size() != outputs.size() || targets.empty())
    throw ContractError("critic_mse: bad lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = targets[i] - outputs[i];
    s += d * d;
  }
  return s / static_cast<double>(targets.size());
}

// -- actor update -- //

struct PolicySample {
  Vec obs;
  int action = 0;
  double old_logp_client = 0.0;
  double old_logp_server = 0.0;
  double advantage = 0.0;
  ModelChoice model = ModelChoice::kClient;
  bool dual = false;
};

struct SurrogateStats {
  double policy_loss = 0.0;  // -mean(term) over the paths evaluated
  std::size_t terms = 0;
};

// Accumulates gradients of -mean(term) for `batch` into `g`. Each sample
// flows through the path that acted; dual-training samples update both
// paths on their own recomputed log-probabilities.
inline SurrogateStats accumulate_policy_grad(const SplitActor& actor,
                                             std::span<const PolicySample> batch,
                                             double clip, ActorGrad& g) {
  SurrogateStats st;
  if (batch.empty()) return st;
  const double inv = 1.0 / static_cast<double>(batch.size());
  PathForward fw;
  auto run = [&](const PolicySample& s, ActorPath path, double old_logp) {
    actor.forward_path(s.obs, path, fw);
    const auto term = clipped_surrogate(log_prob(fw.dist, s.action), old_logp, s.advantage, clip);
    st.policy_loss -= term.value * inv;
    ++st.terms;
    if (term.d_logp != 0.0) {
      Vec dl = dlogp_dlogits(fw.dist, s.action) * (-term.d_logp * inv);
      actor.backward_path(fw, dl, g);
    } else {
      // clipped branch: zero gradient, but the path was active
      if (path == ActorPath::kClient) g.client_head_touched = true;
      else g.server_head_touched = g.server_touched = true;
      g.client_touched = true;
    }
  };
  for (const auto& s : batch) {
    const bool server = s.model == ModelChoice::kServer;
    if (!server || s.dual) run(s, ActorPath::kClient, s.old_logp_client);
    if (server) run(s, ActorPath::kServer, s.old_logp_server);
  }
  return st;
}

inline void apply_actor_grad(AgentModel& m, const ActorGrad& g, const AdamConfig& opt) {
  auto& a = m.actor;
  if (g.client_touched) adam_step(a.client().params(), g.client, m.opt_client, opt);
  if (g.client_head_touched) adam_step(a.client_head().params(), g.client_head, m.opt_client_head, opt);
  if (g.server_touched) adam_step(a.server().params(), g.server, m.opt_server, opt);
  if (g.server_head_touched) adam_step(a.server_head().params(), g.server_head, m.opt_server_head, opt);
}

// -- policy bundle -- //

struct PolicyBundle {
  PolicyKind kind = PolicyKind::kSplitModel;
  TrainConfig cfg;
  int obs_dim = 0;
  int num_actions = 0;
  int num_agents = 0;
  std::vector<AgentModel> agents;
  std::vector<Critic> critics;  // one shared, or one per agent
  std::vector<AdamState> critic_opt;
  int episodes_done = 0;

  static PolicyBundle create(PolicyKind kind, const TrainConfig& cfg, int obs_dim,
                             int num_actions, int num_agents) {
    PolicyBundle b;
    b.kind = kind;
    b.cfg = cfg;
    b.obs_dim = obs_dim;
    b.num_actions = num_actions;
    b.num_agents = num_agents;
    if (!is_learned(kind)) return b;
    Rng init = make_stream(cfg.seed, 0x1A17);
    for (int v = 0; v < num_agents; ++v) {
      AgentModel m;
      m.actor = SplitActor(obs_dim, cfg.actor_sizes, cfg.split_index, num_actions, init);
      m.ctrl = SwitchController(cfg.switching);
      b.agents.push_back(std::move(m));
    }
    const int nc = cfg.critic_per_agent ? num_agents : 1;
    for (int c = 0; c < nc; ++c) {
      b.critics.emplace_back(obs_dim * num_agents, num_agents, num_actions, cfg.critic_sizes, init);
      b.critic_opt.emplace_back();
    }
    return b;
  }

  Critic& critic_for(std::size_t v) { return critics[cfg.critic_per_agent ? v : 0]; }
  const Critic& critic_for(std::size_t v) const { return critics[cfg.critic_per_agent ? v : 0]; }
};

// Joint observation / action re-ordered so agent v comes first, the rest
// in id order. The shared critic therefore scores "the first-listed agent".
inline Vec rotated_obs(const std::vector<Observation>& obs, std::size_t v) {
  const auto d = obs.front().size();
  Vec x(static_cast<Eigen::Index>(d * obs.size()));
  std::size_t k = 0;
  auto put = [&](const Observation& o) {
    for (double val : o) x[static_cast<Eigen::Index>(k++)] = val;
  };
  put(obs[v]);
  for (std::size_t w = 0; w < obs.size(); ++w)
    if (w != v) put(obs[w]);
  return x;
}

inline std::vector<int> rotated_actions(const std::vector<int>& acts, std::size_t v) {
  std::vector<int> out{acts[v]};
  for (std::size_t w = 0; w < acts.size(); ++w)
    if (w != v) out.push_back(acts[w]);
  return out;
}

// -- rollout records and reports -- //

struct SlotRecord {
  std::vector<Observation> obs;  // per agent, observed before acting
  std::vector<int> actions;      // requested actions
  std::vector<Decision> decisions;
  std::vector<double> rewards;
  std::vector<SlotMetrics> metrics;
};

struct EpisodeStats {
  int episode = 0;  // 1-based
  double mean_reward = 0, mean_qoe = 0, mean_latency = 0, mean_err = 0;
  double active_params = 0, server_ratio = 0;
  long long switches = 0;
  double threshold = 0;
  double mean_entropy = 0;
  double policy_loss = 0, critic_loss = 0;
  double remap_ratio = 0;
};

inline const char* kTrainReportHeader =
    "episode,mean_reward,mean_qoe,mean_latency,mean_err,active_params,server_ratio,switches,threshold";

inline std::string report_row(const EpisodeStats& s) {
  return std::to_string(s.episode) + ',' + fmt_double(s.mean_reward) + ',' +
         fmt_double(s.mean_qoe) + ',' + fmt_double(s.mean_latency) + ',' +
         fmt_double(s.mean_err) + ',' + fmt_double(s.active_params) + ',' +
         fmt_double(s.server_ratio) + ',' + std::to_string(s.switches) + ',' +
         fmt_double(s.threshold);
}

inline std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t episode) {
  return mix_seed(mix_seed(seed) ^ (episode + 1));
}

inline std::shared_ptr<const Scenario> with_reward_mode(std::shared_ptr<const Scenario> s,
                                                        const TrainConfig& cfg) {
  if (!cfg.reward_mode || *cfg.reward_mode == s->env.reward_mode) return s;
  auto copy = std::make_shared<Scenario>(*s);
  copy->env.reward_mode = *cfg.reward_mode;
  return copy;
}

// Runs rollouts (and, for learned kinds, updates) episode by episode.
class Trainer {
 public:
  Trainer(std::shared_ptr<const Scenario> scenario, PolicyKind kind, const TrainConfig& cfg)
      : env_(with_reward_mode(std::move(scenario), cfg)) {
    cfg.validate();
    if (!cfg.server_enabled && kind == PolicyKind::kLocalEdgeModel)
      throw ConfigError("LocalEdgeModel needs the server path (train.server_enabled)");
    bundle_ = PolicyBundle::create(kind, cfg, static_cast<int>(env_.obs_dim()),
                                   static_cast<int>(env_.num_rsus()),
                                   static_cast<int>(env_.num_vehicles()));
  }

  Trainer(std::shared_ptr<const Scenario> scenario, PolicyBundle bundle)
      : env_(with_reward_mode(std::move(scenario), bundle.cfg)), bundle_(std::move(bundle)) {
    if (bundle_.obs_dim != static_cast<int>(env_.obs_dim()) ||
        bundle_.num_actions != static_cast<int>(env_.num_rsus()) ||
        bundle_.num_agents != static_cast<int>(env_.num_vehicles()))
      throw ConfigError("checkpoint dimensions do not match the scenario");
  }

  PolicyBundle& bundle() { return bundle_; }
  const PolicyBundle& bundle() const { return bundle_; }
  Environment& env() { return env_; }

  // One rollout of `horizon` slots followed by K epochs of minibatch
  // updates (learned kinds only).
  EpisodeStats run_episode() {
    const auto k = static_cast<std::uint64_t>(bundle_.episodes_done);
    const auto& cfg = bundle_.cfg;
    std::vector<SlotRecord> slots = rollout(env_, bundle_, episode_seed(cfg.seed, k),
                                            make_stream(cfg.seed ^ 0xAC7105ULL, k), false);
    EpisodeStats st = summarize(slots);
    if (is_learned(bundle_.kind)) update(slots, make_stream(cfg.seed ^ 0x5F0FF1EULL, k), st);
    ++bundle_.episodes_done;
    st.episode = bundle_.episodes_done;
    if (!bundle_.agents.empty()) {
      double thr = 0;
      for (const auto& a : bundle_.agents) thr += a.ctrl.threshold();
      st.threshold = thr / static_cast<double>(bundle_.agents.size());
    }
    return st;
  }

  std::vector<EpisodeStats> train(int episodes,
                                  const std::function<void(const EpisodeStats&)>& on_episode = {}) {
    std::vector<EpisodeStats> out;
    for (int i = 0; i < episodes; ++i) {
      out.push_back(run_episode());
      if (on_episode) on_episode(out.back());
    }
    return out;
  }

  // Collects one episode. `gates` = nullptr uses the agents' own switch
  // controllers; evaluation passes scratch copies.
  static std::vector<SlotRecord> rollout(Environment& env, PolicyBundle& bundle,
                                         std::uint64_t env_seed, Rng act_rng, bool greedy,
                                         std::vector<SwitchController>* gates = nullptr) {
    env.set_alpha(bundle.kind == PolicyKind::kFullMigration ? kFullMigrationAlpha
                                                            : env.scenario().env.alpha);
    auto obs = env.reset(env_seed);
    const PolicyKind kind = bundle.kind == PolicyKind::kSplitModel && !bundle.cfg.server_enabled
                                ? PolicyKind::kLocalModel
                                : bundle.kind;
    const auto nv = env.num_vehicles();
    std::vector<SlotRecord> slots;
    slots.reserve(static_cast<std::size_t>(env.horizon()));
    for (int t = 0; t < env.horizon(); ++t) {
      SlotRecord rec;
      rec.obs = obs;
      rec.actions.resize(nv);
      rec.decisions.resize(nv);
      for (std::size_t v = 0; v < nv; ++v) {
        AgentModel* model = bundle.agents.empty() ? nullptr : &bundle.agents[v];
        SwitchController* gate = nullptr;
        if (model) gate = gates ? &(*gates)[v] : &model->ctrl;
        rec.decisions[v] = act(kind, env, v, obs[v], model, gate, act_rng, greedy);
        rec.actions[v] = rec.decisions[v].action;
      }
      auto res = env.step(rec.actions);
      rec.rewards = res.rewards;
      rec.metrics = res.metrics;
      obs = std::move(res.observations);
      slots.push_back(std::move(rec));
    }
    return slots;
  }

  static EpisodeStats summarize(const std::vector<SlotRecord>& slots) {
    EpisodeStats st;
    double n = 0, server = 0, net = 0;
    std::vector<int> last_choice;
    for (const auto& s : slots) {
      if (last_choice.empty()) last_choice.assign(s.decisions.size(), -1);
      for (std::size_t v = 0; v < s.decisions.size(); ++v) {
        const auto& m = s.metrics[v];
        const auto& d = s.decisions[v];
        st.mean_reward += m.reward;
        st.mean_qoe += m.qoe;
        st.mean_latency += m.t_total;
        st.mean_err += m.error_rate;
        st.active_params += static_cast<double>(d.active_params);
        st.remap_ratio += m.remapped ? 1.0 : 0.0;
        n += 1;
        if (d.uses_network) {
          net += 1;
          st.mean_entropy += d.client_entropy;
          const int c = d.model == ModelChoice::kServer ? 1 : 0;
          server += c;
          if (last_choice[v] >= 0 && last_choice[v] != c) ++st.switches;
          last_choice[v] = c;
        }
      }
    }
    if (n > 0) {
      st.mean_reward /= n;
      st.mean_qoe /= n;
      st.mean_latency /= n;
      st.mean_err /= n;
      st.active_params /= n;
      st.remap_ratio /= n;
    }
    if (net > 0) {
      st.server_ratio = server / net;
      st.mean_entropy /= net;
    }
    return st;
  }

 private:
  void update(const std::vector<SlotRecord>& slots, Rng shuffle_rng, EpisodeStats& st) {
    const auto& cfg = bundle_.cfg;
    const auto nv = static_cast<std::size_t>(bundle_.num_agents);
    const auto na = static_cast<std::size_t>(bundle_.num_actions);
    const auto T = slots.size();

    // critic inputs, lambda returns and counterfactual advantages
    std::vector<std::vector<Vec>> crit_x(nv, std::vector<Vec>(T));
    std::vector<std::vector<double>> qhat(nv), adv(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& critic = bundle_.critic_for(v);
      std::vector<double> q(T), r(T), b(T);
      for (std::size_t t = 0; t < T; ++t) {
        const auto& s = slots[t];
        const Vec jo = rotated_obs(s.obs, v);
        auto ja = rotated_actions(s.actions, v);
        crit_x[v][t] = critic.encode(jo, ja);
        q[t] = critic.net().forward(crit_x[v][t])[0];
        r[t] = s.rewards[v];
        std::vector<double> q_own(na);
        for (std::size_t a = 0; a < na; ++a) {
          ja[0] = static_cast<int>(a);
          q_own[a] = critic.value(jo, ja);
        }
        b[t] = counterfactual_baseline(s.decisions[v].probs, q_own);
      }
      qhat[v] = lambda_returns(r, q, cfg.gamma, cfg.lam);
      adv[v].resize(T);
      for (std::size_t t = 0; t < T; ++t) adv[v][t] = qhat[v][t] - b[t];
      if (cfg.normalize_advantages && T > 1) {
        const double mean = std::accumulate(adv[v].begin(), adv[v].end(), 0.0) / T;
        double var = 0;
        for (double a : adv[v]) var += (a - mean) * (a - mean);
        const double sd = std::sqrt(var / T);
        for (double& a : adv[v]) a = (a - mean) / (sd + 1e-8);
      }
    }

    std::vector<std::vector<PolicySample>> samples(nv, std::vector<PolicySample>(T));
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t t = 0; t < T; ++t) {
        const auto& d = slots[t].decisions[v];
        samples[v][t] = {to_vec(slots[t].obs[v]), d.action, d.logp_client, d.logp_server,
                         adv[v][t], d.model,
                         d.dual || (cfg.dual_on_server && d.model == ModelChoice::kServer)};
      }
    }

    const AdamConfig opt{cfg.lr};
    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), 0);
    const auto G = static_cast<std::size_t>(cfg.minibatch);
    double ploss = 0, closs = 0;
    std::size_t nb = 0;
    std::vector<PolicySample> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::size_t start = 0; start < T; start += G) {
        const auto end = std::min(T, start + G);
        // actors
        for (std::size_t v = 0; v < nv; ++v) {
          batch.clear();
          for (std::size_t i = start; i < end; ++i) batch.push_back(samples[v][order[i]]);
          auto& agent = bundle_.agents[v];
          ActorGrad g = agent.actor.zero_grad();
          const auto sst = accumulate_policy_grad(agent.actor, batch, cfg.clip, g);
          if (!std::isfinite(sst.policy_loss)) throw NanAbort("policy loss is NaN");
          ploss += sst.policy_loss;
          apply_actor_grad(agent, g, opt);
        }
        // critic(s)
        for (std::size_t c = 0; c < bundle_.critics.size(); ++c) {
          auto& critic = bundle_.critics[c];
          Params grad = zeros_like(critic.net().params());
          MlpCache cache;
          double loss = 0;
          std::size_t count = 0;
          for (std::size_t v = 0; v < nv; ++v) {
            if (cfg.critic_per_agent && v != c) continue;
            count += end - start;
          }
          const double inv = 1.0 / static_cast<double>(count);
          for (std::size_t v = 0; v < nv; ++v) {
            if (cfg.critic_per_agent && v != c) continue;
            for (std::size_t i = start; i < end; ++i) {
              const auto t = order[i];
              const double out = critic.net().forward(crit_x[v][t], cache)[0];
              const double diff = out - qhat[v][t];
              loss += diff * diff * inv;
              Vec g(1);
              g[0] = 2.0 * diff * inv;
              critic.net().backward(cache, g, grad);
            }
          }
          if (!std::isfinite(loss)) throw NanAbort("critic loss is NaN");
          closs += loss;
          adam_step(critic.net().params(), grad, bundle_.critic_opt[c], opt);
        }
        ++nb;
      }
    }
    for (const auto& a : bundle_.agents) {
      if (!all_finite(a.actor.client().params()) || !all_finite(a.actor.server().params()))
        throw NanAbort("actor parameters became non-finite");
    }
    if (nb > 0) {
      st.policy_loss = ploss / static_cast<double>(nb * nv);
      st.critic_loss = closs / static_cast<double>(nb * bundle_.critics.size());
    }
  }

  Environment env_;
  PolicyBundle bundle_;
};

// -- evaluation -- //

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0, mean_qoe = 0, mean_latency = 0, mean_err = 0, mean_active_params = 0;
  std::vector<EpisodeStats> per_episode;
  std::vector<long long> action_counts;  // executed requests per RSU id
};

struct EvalOptions {
  bool greedy = true;
  std::optional<double> latency_scale;  // pin the observation scale
  std::function<void(int episode, int slot, const SlotRecord&)> on_slot;
};

// No learning. Learned kinds act greedily (argmax); SplitModel gates on
// scratch copies of the trained controllers. Episode k uses
// episode_seed(seed, k), so different policies see paired conditions.
inline EvalSummary evaluate(PolicyBundle& bundle, std::shared_ptr<const Scenario> scenario,
                            int episodes, std::uint64_t seed, const EvalOptions& opts = {}) {
  Environment env(with_reward_mode(std::move(scenario), bundle.cfg), !opts.latency_scale);
  if (opts.latency_scale) env.set_latency_scale(*opts.latency_scale);
  EvalSummary out;
  out.episodes = episodes;
  out.action_counts.assign(env.num_rsus(), 0);
  std::vector<SwitchController> gates;
  for (const auto& a : bundle.agents) gates.push_back(a.ctrl);
  for (int k = 0; k < episodes; ++k) {
    auto slots = Trainer::rollout(env, bundle, episode_seed(seed, static_cast<std::uint64_t>(k)),
                                  make_stream(seed ^ 0xE7A1ULL, static_cast<std::uint64_t>(k)),
                                  opts.greedy, &gates);
    auto st = Trainer::summarize(slots);
    st.episode = k + 1;
    for (std::size_t t = 0; t < slots.size(); ++t) {
      for (int a : slots[t].actions) ++out.action_counts[static_cast<std::size_t>(a)];
      if (opts.on_slot) opts.on_slot(k + 1, static_cast<int>(t), slots[t]);
    }
    out.mean_reward += st.mean_reward;
    out.mean_qoe += st.mean_qoe;
    out.mean_latency += st.mean_latency;
    out.mean_err += st.mean_err;
    out.mean_active_params += st.active_params;
    out.per_episode.push_back(st);
  }
  if (episodes > 0) {
    out.mean_reward /= episodes;
    out.mean_qoe /= episodes;
    out.mean_latency /= episodes;
    out.mean_err /= episodes;
    out.mean_active_params /= episodes;
  }
  return out;
}

}  // namespace msrl

#endif  // MSRL_MSRL_HPP_
