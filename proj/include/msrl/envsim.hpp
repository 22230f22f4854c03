// SPDX-License-Identifier: Apache-2.0
//
// Multi-RSU vehicle-twin environment: channel and rate model, transmission,
// migration and processing latencies, contention error rate, QoE, load
// feasibility, and the per-agent observation/reward interface.

#ifndef MSRL_ENVSIM_HPP_
#define MSRL_ENVSIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msrl/common.hpp"
#include "msrl/trajgen.hpp"

namespace msrl {

struct RsuSpec {
  int id = 0;
  GeoPoint pos;
  double compute = 50e9;     // C_e, cycles/s
  double max_load = 2e11;    // L_e^max, cycles
  double bw_up = 2e7;        // B_e^u, Hz
  double bw_down = 2e7;      // B_e^d, Hz
  double noise_power = 1e-13;  // sigma_e^2, W
  double init_load = 0.0;    // load at reset, cycles
  double bg_rate = 0.0;      // mean background job arrivals per slot (Poisson)
};

struct ChannelParams {
  double gain_coeff = 1.0;   // A
  double carrier = 2.4e9;    // f, Hz
  double light_speed = 3e8;  // c, m/s
};

struct VehicleSpec {
  int id = 0;
  double tx_power = 0.2;          // p_v, W
  double cycles_per_bit = 1e4;    // f_v
  std::vector<double> task_bits{4e6};  // D_v^task per slot; size 1 = constant
  double request_bits = 1e5;      // D_v^u
  double result_bits = 1e6;       // total result size, split across RSUs
  Trajectory trajectory;          // fixed route; empty = drawn from the pool

  double task_at(std::size_t t) const {
    if (task_bits.empty()) return 0.0;
    return task_bits[std::min(t, task_bits.size() - 1)];
  }
};

enum class RewardMode { kLatency, kQoe };

struct EnvConfig {
  double alpha = 0.5;    // pre-migrated fraction, [0, 1)
  double mu = 0.5;       // reuse coefficient, [0, 1]
  double tau = 5e-8;     // error contribution per migrated bit
  double lambda1 = 1.0;  // QoE weight on error rate
  double lambda2 = 1.0;  // QoE weight on latency
  double slot_seconds = 1.0;
  int horizon = 50;
  RewardMode reward_mode = RewardMode::kLatency;
  double bg_job_cycles = 1e10;  // cycles per background job
  double min_distance = 1.0;    // co-located vehicle/RSU clamp, m
  double latency_scale = 0.0;   // > 0 pins the observation latency scale
  std::uint64_t warmup_seed = 7;
  int warmup_episodes = 2;

  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("env.alpha must be in [0,1)");
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("env.mu must be in [0,1]");
    if (tau < 0 || lambda1 < 0 || lambda2 < 0)
      throw ConfigError("env.tau/lambda1/lambda2 must be >= 0");
    if (!(slot_seconds > 0)) throw ConfigError("env.slot_seconds must be > 0");
    if (horizon < 1) throw ConfigError("env.horizon must be >= 1");
    if (bg_job_cycles < 0) throw ConfigError("env.bg_job_cycles must be >= 0");
  }
};

struct Scenario {
  std::vector<RsuSpec> rsus;
  std::vector<std::vector<double>> backhaul;  // B_{e,e'} bits/s; diagonal unused
  ChannelParams channel;
  std::vector<VehicleSpec> vehicles;
  EnvConfig env;
  std::vector<Trajectory> trajectory_pool;

  std::size_t num_rsus() const { return rsus.size(); }
  std::size_t num_vehicles() const { return vehicles.size(); }

  void validate() const {
    env.validate();
    const auto e = rsus.size();
    if (e == 0) throw ConfigError("scenario needs at least one RSU");
    if (vehicles.empty()) throw ConfigError("scenario needs at least one vehicle");
    for (const auto& r : rsus) {
      if (!(r.compute > 0 && r.max_load > 0 && r.bw_up > 0 && r.bw_down > 0 &&
            r.noise_power > 0))
        throw ConfigError("rsu " + std::to_string(r.id) + ": parameters must be positive");
      if (r.init_load < 0 || r.init_load > r.max_load)
        throw ConfigError("rsu " + std::to_string(r.id) + ": init_load outside [0, max_load]");
      if (r.bg_rate < 0) throw ConfigError("rsu bg_rate must be >= 0");
    }
    if (backhaul.size() != e) throw ConfigError("backhaul matrix must be E x E");
    for (std::size_t i = 0; i < e; ++i) {
      if (backhaul[i].size() != e) throw ConfigError("backhaul matrix must be E x E");
      for (std::size_t j = 0; j < e; ++j) {
        if (i == j) continue;
        if (!(backhaul[i][j] > 0)) throw ConfigError("backhaul bandwidth must be > 0");
        if (backhaul[i][j] != backhaul[j][i]) throw ConfigError("backhaul must be symmetric");
      }
    }
    if (!(channel.gain_coeff > 0 && channel.carrier > 0 && channel.light_speed > 0))
      throw ConfigError("channel parameters must be positive");
    for (const auto& v : vehicles) {
      if (!(v.tx_power > 0 && v.cycles_per_bit > 0 && v.request_bits >= 0 &&
            v.result_bits >= 0))
        throw ConfigError("vehicle " + std::to_string(v.id) + ": bad parameters");
      for (double b : v.task_bits)
        if (b < 0) throw ConfigError("vehicle task_bits must be >= 0");
      if (v.trajectory.points.empty() && trajectory_pool.empty())
        throw ConfigError("vehicle " + std::to_string(v.id) +
                          " has no trajectory and the pool is empty");
    }
  }
};

// -- closed-form model pieces -- //

// h = A (c / (4 pi f d))^2, with d clamped to `min_distance`.
inline double channel_gain(const ChannelParams& ch, double d, double min_distance = 1.0) {
  d = std::max(d, min_distance);
  const double r = ch.light_speed / (4.0 * kPi * ch.carrier * d);
  return ch.gain_coeff * r * r;
}

// R = B log2(1 + p h / sigma^2). Same expression for uplink and downlink.
inline double link_rate(double bandwidth, double tx_power, double gain,
                        double noise_power) {
  return bandwidth * std::log2(1.0 + tx_power * gain / noise_power);
}

inline double uplink_latency(double request_bits, double rate) {
  return request_bits == 0.0 ? 0.0 : request_bits / rate;
}

struct ResultLeg {
  double bits = 0.0;
  double rate = 1.0;
};

// T^d = sum_e D^d_{v,e} / R^d_{v,e}; legs with zero bits vanish.
inline double downlink_latency(std::span<const ResultLeg> legs) {
  double t = 0.0;
  for (const auto& l : legs)
    if (l.bits != 0.0) t += l.bits / l.rate;
  return t;
}

// T^m = D^m / B_{e,e_m}; zero when the task stays on the serving RSU.
inline double migration_latency(double migrated_bits, double backhaul_bw,
                                bool same_rsu) {
  if (same_rsu || migrated_bits == 0.0) return 0.0;
  return migrated_bits / backhaul_bw;
}

struct RenderingSizes {
  double migrated = 0.0;   // D^m = alpha D^task
  double remaining = 0.0;  // D^L = D^task - D^m
  double xi_serving = 0.0;
  double xi_target = 0.0;
  int serving_unchanged = 0;  // I_v
  int target_unchanged = 0;   // phi_v
};

// xi_e = D^L(t) - mu I D^L(t-1), xi_em = D^m(t) - mu phi D^m(t-1), both
// clamped at zero.
inline RenderingSizes rendering_sizes(double task_bits, double alpha, double mu,
                                      bool serving_unchanged, bool target_unchanged,
                                      double prev_remaining, double prev_migrated) {
  RenderingSizes r;
  r.migrated = alpha * task_bits;
  r.remaining = task_bits - r.migrated;
  r.serving_unchanged = serving_unchanged ? 1 : 0;
  r.target_unchanged = target_unchanged ? 1 : 0;
  r.xi_serving = std::max(0.0, r.remaining - mu * r.serving_unchanged * prev_remaining);
  r.xi_target = std::max(0.0, r.migrated - mu * r.target_unchanged * prev_migrated);
  return r;
}

struct ProcessingLatencies {
  double serving = 0.0;  // T^p_{v,e}
  double target = 0.0;   // T^p_{v,e_m}
  double parallel = 0.0; // T^p_v
};

inline ProcessingLatencies processing_latencies(double load_serving, double xi_serving,
                                                double compute_serving, double load_target,
                                                double xi_target, double compute_target,
                                                double cycles_per_bit,
                                                double migration_latency_s) {
  ProcessingLatencies p;
  p.serving = (load_serving + xi_serving * cycles_per_bit) / compute_serving;
  p.target = (load_target + xi_target * cycles_per_bit) / compute_target;
  p.parallel = std::max(p.serving, p.target + migration_latency_s);
  return p;
}

inline double total_latency(double t_up, double t_proc, double t_down) {
  return t_up + t_proc + t_down;
}

// eps_v = 1 - exp(-sum_{v' != v} tau D^m_{v'} chi_{v'}), where chi_{v'} = 1
// iff v' pre-migrates to the same RSU as v in this slot.
inline std::vector<double> error_rates(std::span<const int> targets,
                                       std::span<const double> migrated_bits,
                                       double tau) {
  const auto n = targets.size();
  std::vector<double> eps(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      if (w != v && targets[w] == targets[v]) s += tau * migrated_bits[w];
    }
    eps[v] = -std::expm1(-s);
  }
  return eps;
}

inline double qoe(double error_rate, double latency, double lambda1, double lambda2) {
  return -lambda1 * error_rate - lambda2 * latency;
}

// Position along a trajectory at absolute time t; held at the ends.
inline GeoPoint position_at(const Trajectory& tr, double t) {
  const auto& p = tr.points;
  if (p.empty()) return {};
  if (t <= p.front().t) return p.front().pos;
  if (t >= p.back().t) return p.back().pos;
  auto it = std::upper_bound(p.begin(), p.end(), t,
                             [](double x, const TrajectoryPoint& q) { return x < q.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return {a.pos.x + s * (b.pos.x - a.pos.x), a.pos.y + s * (b.pos.y - a.pos.y)};
}

// Nearest RSU by Euclidean distance, ties to the lower id.
inline int nearest_rsu(const std::vector<RsuSpec>& rsus, const GeoPoint& p) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < rsus.size(); ++e) {
    const double d = distance(rsus[e].pos, p);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(e);
    }
  }
  return best;
}

// -- environment -- //

struct SlotMetrics {
  int action = 0;     // requested target
  int target = 0;     // executed target (after feasibility remap)
  int serving = 0;
  double t_up = 0, t_mig = 0, t_proc = 0, t_down = 0, t_total = 0;
  double t_proc_serving = 0, t_proc_target = 0;
  double xi_serving = 0, xi_target = 0;
  double error_rate = 0, qoe = 0, reward = 0;
  int contention = 0;  // chi_v
  int stability = 0;   // phi_v
  int serving_unchanged = 0;  // I_v
  bool remapped = false;
};

// Normalized observation [a/(E-1), L_1/Lmax_1 .. L_E/Lmax_E, eps, phi, chi,
// T/latency_scale]. Every entry is an affine map of a stored raw value, so
// `ObservationScales::raw` inverts it exactly up to rounding.
using Observation = std::vector<double>;

struct ObservationScales {
  double action = 1.0;        // E - 1 (1 when E == 1)
  std::vector<double> load;   // L_e^max
  double latency = 1.0;       // 99th percentile of a random-policy warmup

  std::size_t size() const { return load.size() + 5; }

  Observation raw(const Observation& o) const {
    Observation r = o;
    r[0] *= action;
    for (std::size_t e = 0; e < load.size(); ++e) r[1 + e] *= load[e];
    r[load.size() + 4] *= latency;
    return r;
  }
};

struct StepResult {
  std::vector<Observation> observations;
  std::vector<double> rewards;
  std::vector<SlotMetrics> metrics;
  bool done = false;
};

struct EnvState {
  int t = 0;
  std::vector<double> load;
  std::vector<int> serving;
  std::vector<int> prev_serving;
  std::vector<int> prev_action;  // executed target of the previous slot, -1 at start
  std::vector<double> prev_remaining;
  std::vector<double> prev_migrated;
  std::vector<SlotMetrics> last_metrics;
  std::vector<GeoPoint> position;
  std::vector<const Trajectory*> route;
  std::vector<double> clock_offset;  // absolute time of slot 0 per vehicle
};

// Single-writer: reset/step must be serialized. Independent instances share
// only the immutable scenario.
class Environment {
 public:
  explicit Environment(std::shared_ptr<const Scenario> scenario, bool warmup = true)
      : scn_(std::move(scenario)) {
    scn_->validate();
    scales_.action = scn_->num_rsus() > 1 ? static_cast<double>(scn_->num_rsus() - 1) : 1.0;
    for (const auto& r : scn_->rsus) scales_.load.push_back(r.max_load);
    alpha_ = scn_->env.alpha;
    if (scn_->env.latency_scale > 0) {
      scales_.latency = scn_->env.latency_scale;
    } else if (warmup) {
      scales_.latency = warmup_latency_scale();
    }
  }

  explicit Environment(const Scenario& scenario, bool warmup = true)
      : Environment(std::make_shared<const Scenario>(scenario), warmup) {}

  const Scenario& scenario() const { return *scn_; }
  std::shared_ptr<const Scenario> scenario_ptr() const { return scn_; }
  const EnvState& state() const { return st_; }
  const ObservationScales& scales() const { return scales_; }
  std::size_t num_rsus() const { return scn_->num_rsus(); }
  std::size_t num_vehicles() const { return scn_->num_vehicles(); }
  std::size_t obs_dim() const { return scn_->num_rsus() + 5; }
  int horizon() const { return scn_->env.horizon; }
  double alpha() const { return alpha_; }

  // Overrides the pre-migrated fraction for subsequent slots; must stay in
  // [0, 1).
  void set_alpha(double a) {
    if (!(a >= 0.0 && a < 1.0)) throw ContractError("alpha must be in [0,1)");
    alpha_ = a;
  }

  void set_latency_scale(double s) {
    if (!(s > 0)) throw ContractError("latency scale must be > 0");
    scales_.latency = s;
  }

  // Starts an episode: routes drawn from the pool (or fixed per vehicle),
  // loads at their configured initial values, serving = nearest RSU, history
  // zeroed.
  std::vector<Observation> reset(std::uint64_t seed) {
    const auto& s = *scn_;
    const auto e = s.num_rsus();
    const auto nv = s.num_vehicles();
    rng_ = make_stream(seed, 0x656E76);
    st_ = EnvState{};
    st_.load.resize(e);
    for (std::size_t i = 0; i < e; ++i) st_.load[i] = s.rsus[i].init_load;
    st_.serving.assign(nv, 0);
    st_.prev_serving.assign(nv, -1);
    st_.prev_action.assign(nv, -1);
    st_.prev_remaining.assign(nv, 0.0);
    st_.prev_migrated.assign(nv, 0.0);
    st_.last_metrics.assign(nv, SlotMetrics{});
    st_.position.resize(nv);
    st_.route.resize(nv);
    st_.clock_offset.resize(nv);
    const double span = s.env.slot_seconds * s.env.horizon;
    for (std::size_t v = 0; v < nv; ++v) {
      const Trajectory* tr = &s.vehicles[v].trajectory;
      if (tr->points.empty()) {
        tr = &s.trajectory_pool[uniform_index(rng_, s.trajectory_pool.size())];
      }
      st_.route[v] = tr;
      const double t0 = tr->points.front().t;
      const double latest = std::max(t0, tr->points.back().t - span);
      st_.clock_offset[v] = t0 + uniform01(rng_) * (latest - t0);
      st_.position[v] = position_at(*tr, st_.clock_offset[v]);
      st_.serving[v] = nearest_rsu(s.rsus, st_.position[v]);
    }
    std::vector<Observation> obs(nv);
    for (std::size_t v = 0; v < nv; ++v) obs[v] = observe(v);
    return obs;
  }

  // Advances one slot with one target RSU per vehicle.
  StepResult step(std::span<const int> joint_actions) {
    const auto& s = *scn_;
    const auto e_count = s.num_rsus();
    const auto nv = s.num_vehicles();
    if (joint_actions.size() != nv) {
      throw ContractError("step: expected " + std::to_string(nv) + " actions");
    }
    for (int a : joint_actions) {
      if (a < 0 || static_cast<std::size_t>(a) >= e_count) {
        throw ContractError("step: action " + std::to_string(a) + " out of range");
      }
    }
    if (st_.t >= s.env.horizon) throw ContractError("step: episode already done");

    StepResult res;
    res.metrics.resize(nv);
    std::vector<double> assigned(e_count, 0.0);
    std::vector<int> targets(nv);
    std::vector<double> migrated(nv);
    std::vector<RenderingSizes> sizes(nv);

    // (1) serving RSU by current position
    for (std::size_t v = 0; v < nv; ++v) {
      st_.prev_serving[v] = st_.t == 0 ? -1 : st_.serving[v];
      st_.serving[v] = nearest_rsu(s.rsus, st_.position[v]);
    }
    // (2) rendering sizes and feasibility, in vehicle id order
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& veh = s.vehicles[v];
      const int serving = st_.serving[v];
      int target = joint_actions[v];
      const double task = veh.task_at(static_cast<std::size_t>(st_.t));
      const bool same_serving = st_.t > 0 && st_.prev_serving[v] == serving;
      auto sz = rendering_sizes(task, alpha_, s.env.mu, same_serving,
                                st_.t > 0 && st_.prev_action[v] == target,
                                st_.prev_remaining[v], st_.prev_migrated[v]);
      bool remapped = false;
      if (target != serving) {
        const double incoming = sz.xi_target * veh.cycles_per_bit;
        if (st_.load[target] + assigned[target] + incoming > s.rsus[target].max_load) {
          target = serving;
          remapped = true;
          sz = rendering_sizes(task, alpha_, s.env.mu, same_serving,
                               st_.t > 0 && st_.prev_action[v] == target,
                               st_.prev_remaining[v], st_.prev_migrated[v]);
        }
      }
      assigned[serving] += sz.xi_serving * veh.cycles_per_bit;
      assigned[target] += sz.xi_target * veh.cycles_per_bit;
      targets[v] = target;
      migrated[v] = sz.migrated;
      sizes[v] = sz;
      auto& m = res.metrics[v];
      m.action = joint_actions[v];
      m.target = target;
      m.serving = serving;
      m.remapped = remapped;
      m.xi_serving = sz.xi_serving;
      m.xi_target = sz.xi_target;
      m.stability = sz.target_unchanged;
      m.serving_unchanged = sz.serving_unchanged;
    }
    // (3) latencies, error rate, QoE, reward
    const auto eps = error_rates(targets, migrated, s.env.tau);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& veh = s.vehicles[v];
      auto& m = res.metrics[v];
      const auto& sz = sizes[v];
      const int e = m.serving;
      const int em = m.target;
      const double rate_up = uplink_rate(v, e);
      m.t_up = uplink_latency(veh.request_bits, rate_up);
      const bool same = em == e;
      m.t_mig = migration_latency(sz.migrated, same ? 0.0 : s.backhaul[e][em], same);
      const auto proc = processing_latencies(
          st_.load[e], sz.xi_serving, s.rsus[e].compute, st_.load[em], sz.xi_target,
          s.rsus[em].compute, veh.cycles_per_bit, m.t_mig);
      m.t_proc_serving = proc.serving;
      m.t_proc_target = proc.target;
      m.t_proc = proc.parallel;
      // results proportional to the share each RSU processed
      std::vector<ResultLeg> legs;
      if (same) {
        legs.push_back({veh.result_bits, downlink_rate(v, e)});
      } else {
        legs.push_back({veh.result_bits * (1.0 - alpha_), downlink_rate(v, e)});
        legs.push_back({veh.result_bits * alpha_, downlink_rate(v, em)});
      }
      m.t_down = downlink_latency(legs);
      m.t_total = total_latency(m.t_up, m.t_proc, m.t_down);
      m.error_rate = eps[v];
      m.contention = 0;
      for (std::size_t w = 0; w < nv; ++w)
        if (w != v && targets[w] == em) m.contention = 1;
      m.qoe = qoe(m.error_rate, m.t_total, s.env.lambda1, s.env.lambda2);
      m.reward = s.env.reward_mode == RewardMode::kLatency ? -m.t_total : m.qoe;
    }
    // (4) load dynamics: drain at capacity, Poisson background arrivals, cap
    for (std::size_t e = 0; e < e_count; ++e) {
      const auto& r = s.rsus[e];
      double l = std::max(0.0, st_.load[e] + assigned[e] - r.compute * s.env.slot_seconds);
      if (r.bg_rate > 0) {
        const auto jobs = std::poisson_distribution<int>(r.bg_rate)(rng_);
        l += jobs * s.env.bg_job_cycles;
      }
      st_.load[e] = std::min(l, r.max_load);
    }
    // (5) history and positions
    for (std::size_t v = 0; v < nv; ++v) {
      st_.prev_action[v] = targets[v];
      st_.prev_remaining[v] = sizes[v].remaining;
      st_.prev_migrated[v] = sizes[v].migrated;
      st_.last_metrics[v] = res.metrics[v];
    }
    ++st_.t;
    for (std::size_t v = 0; v < nv; ++v) {
      st_.position[v] = position_at(*st_.route[v],
                                    st_.clock_offset[v] + st_.t * s.env.slot_seconds);
    }
    res.done = st_.t >= s.env.horizon;
    res.observations.resize(nv);
    res.rewards.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      res.observations[v] = observe(v);
      res.rewards[v] = res.metrics[v].reward;
    }
    return res;
  }

  double distance_to(std::size_t v, int e) const {
    return distance(st_.position[v], scn_->rsus[static_cast<std::size_t>(e)].pos);
  }

  double uplink_rate(std::size_t v, int e) const {
    const auto& s = *scn_;
    const auto& r = s.rsus[static_cast<std::size_t>(e)];
    const double h = channel_gain(s.channel, distance_to(v, e), s.env.min_distance);
    return link_rate(r.bw_up, s.vehicles[v].tx_power, h, r.noise_power);
  }

  double downlink_rate(std::size_t v, int e) const {
    const auto& s = *scn_;
    const auto& r = s.rsus[static_cast<std::size_t>(e)];
    const double h = channel_gain(s.channel, distance_to(v, e), s.env.min_distance);
    return link_rate(r.bw_down, s.vehicles[v].tx_power, h, r.noise_power);
  }

  Observation observe(std::size_t v) const {
    const auto e = scn_->num_rsus();
    Observation o(e + 5, 0.0);
    const int prev = st_.prev_action[v];
    o[0] = prev < 0 ? 0.0 : prev / scales_.action;
    for (std::size_t i = 0; i < e; ++i) o[1 + i] = st_.load[i] / scales_.load[i];
    const auto& m = st_.last_metrics[v];
    o[e + 1] = m.error_rate;
    o[e + 2] = m.stability;
    o[e + 3] = m.contention;
    o[e + 4] = m.t_total / scales_.latency;
    return o;
  }

 private:
  // 99th percentile (nearest rank) of per-vehicle total latency under a
  // uniform random policy, from a fixed warmup seed.
  double warmup_latency_scale() const {
    Environment probe(scn_, false);
    Rng rng = make_stream(scn_->env.warmup_seed, 0x7761726D);
    std::vector<double> lat;
    std::vector<int> acts(scn_->num_vehicles());
    for (int ep = 0; ep < std::max(1, scn_->env.warmup_episodes); ++ep) {
      probe.reset(scn_->env.warmup_seed + static_cast<std::uint64_t>(ep));
      for (int t = 0; t < scn_->env.horizon; ++t) {
        for (auto& a : acts) a = static_cast<int>(uniform_index(rng, scn_->num_rsus()));
        auto r = probe.step(acts);
        for (const auto& m : r.metrics) lat.push_back(m.t_total);
      }
    }
    std::sort(lat.begin(), lat.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * lat.size()));
    const double p99 = lat[std::clamp<std::size_t>(rank, 1, lat.size()) - 1];
    return p99 > 1e-9 ? p99 : 1.0;
  }

  std::shared_ptr<const Scenario> scn_;
  ObservationScales scales_;
  EnvState st_;
  Rng rng_;
  double alpha_ = 0.5;
};

}  // namespace msrl

#endif  // MSRL_ENVSIM_HPP_
