// SPDX-License-Identifier: Apache-2.0
//
// Controllers behind one action interface: the entropy-gated split model,
// its client-only and always-server variants, and the nearest-RSU and
// random pre-migration baselines.

#ifndef MSRL_POLICIES_HPP_
#define MSRL_POLICIES_HPP_

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msrl/envsim.hpp"
#include "msrl/neural.hpp"
#include "msrl/switching.hpp"

namespace msrl {

enum class PolicyKind { kSplitModel, kLocalEdgeModel, kLocalModel, kFullMigration, kRandomMigration };

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kSplitModel: return "SplitModel";
    case PolicyKind::kLocalEdgeModel: return "LocalEdgeModel";
    case PolicyKind::kLocalModel: return "LocalModel";
    case PolicyKind::kFullMigration: return "FullMigration";
    case PolicyKind::kRandomMigration: return "RandomMigration";
  }
  return "?";
}

inline PolicyKind parse_policy(const std::string& s) {
  for (auto k : {PolicyKind::kSplitModel, PolicyKind::kLocalEdgeModel, PolicyKind::kLocalModel,
                 PolicyKind::kFullMigration, PolicyKind::kRandomMigration}) {
    if (s == policy_name(k)) return k;
  }
  throw ConfigError("unknown policy '" + s +
                    "' (SplitModel, LocalEdgeModel, LocalModel, FullMigration, RandomMigration)");
}

inline bool is_learned(PolicyKind k) {
  return k == PolicyKind::kSplitModel || k == PolicyKind::kLocalEdgeModel ||
         k == PolicyKind::kLocalModel;
}

// FullMigration "migrates everything"; alpha must stay below 1.
inline constexpr double kFullMigrationAlpha = 0.99;

// Per-agent learned state.
struct AgentModel {
  SplitActor actor;
  SwitchController ctrl;
  AdamState opt_client, opt_client_head, opt_server, opt_server_head;
};

// One agent's decision for one slot, with everything the learner stores.
struct Decision {
  int action = 0;
  ModelChoice model = ModelChoice::kClient;
  bool dual = false;
  bool uses_network = false;
  double client_entropy = 0.0;
  double logp_client = 0.0;  // log pi_client(action)
  double logp_server = 0.0;  // log pi_server(action), when the server ran
  std::vector<double> probs;  // distribution the action was drawn from
  std::size_t active_params = 0;
};

// RandomMigration radius: twice the mean nearest-neighbour RSU spacing.
inline double nearby_radius(const std::vector<RsuSpec>& rsus) {
  if (rsus.size() < 2) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = 0; i < rsus.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rsus.size(); ++j)
      if (i != j) best = std::min(best, distance(rsus[i].pos, rsus[j].pos));
    sum += best;
  }
  return 2.0 * sum / static_cast<double>(rsus.size());
}

inline int act_full_migration(const std::vector<RsuSpec>& rsus, const GeoPoint& pos) {
  return nearest_rsu(rsus, pos);
}

inline int act_random_migration(const std::vector<RsuSpec>& rsus, const GeoPoint& pos,
                                double radius, Rng& rng) {
  std::vector<int> near;
  for (std::size_t e = 0; e < rsus.size(); ++e)
    if (distance(rsus[e].pos, pos) <= radius) near.push_back(static_cast<int>(e));
  if (near.empty()) return static_cast<int>(uniform_index(rng, rsus.size()));
  return near[uniform_index(rng, near.size())];
}

inline Vec to_vec(const Observation& o) {
  return Eigen::Map<const Vec>(o.data(), static_cast<Eigen::Index>(o.size()));
}

// Chooses vehicle v's target RSU. Learned kinds need `model`; `greedy`
// picks the argmax instead of sampling. `gate` (SplitModel only) decides
// between client and server; pass the agent's own controller while
// training and a scratch copy while evaluating.
inline Decision act(PolicyKind kind, const Environment& env, std::size_t v,
                    const Observation& obs, AgentModel* model, SwitchController* gate,
                    Rng& rng, bool greedy = false) {
  Decision d;
  const auto& rsus = env.scenario().rsus;
  switch (kind) {
    case PolicyKind::kFullMigration:
      d.action = act_full_migration(rsus, env.state().position[v]);
      return d;
    case PolicyKind::kRandomMigration:
      d.action = act_random_migration(rsus, env.state().position[v], nearby_radius(rsus), rng);
      return d;
    default:
      break;
  }
  if (!model) throw ContractError("learned policy needs an actor");
  const auto& actor = model->actor;
  d.uses_network = true;
  const Vec x = to_vec(obs);
  auto client = actor.forward_client(x);
  d.client_entropy = client.dist.entropy;
  Selection sel;
  if (kind == PolicyKind::kLocalModel) {
    sel = {ModelChoice::kClient, false};
  } else if (kind == PolicyKind::kLocalEdgeModel) {
    sel = {ModelChoice::kServer, false};
  } else {
    if (!gate) throw ContractError("SplitModel needs a switch controller");
    sel = gate->select(client.dist.entropy);
  }
  d.model = sel.model;
  d.dual = sel.dual_training;
  const Distribution* dist = &client.dist;
  Distribution server;
  if (sel.model == ModelChoice::kServer) {
    server = actor.forward_server(client.features);
    dist = &server;
  }
  d.action = greedy ? argmax(*dist) : sample(*dist, rng).action;
  d.probs = dist->probs;
  d.logp_client = log_prob(client.dist, d.action);
  if (sel.model == ModelChoice::kServer) d.logp_server = log_prob(server, d.action);
  d.active_params = actor.param_count(sel.model == ModelChoice::kServer ? ActorPath::kServer
                                                                      : ActorPath::kClient);
  return d;
}

}  // namespace msrl

#endif  // MSRL_POLICIES_HPP_
