// SPDX-License-Identifier: Apache-2.0
//
// Scenario assembly from the flat `key = value` config: RSUs, backhaul,
// channel, vehicles, environment constants and the trajectory pool (recorded
// CSV or synthesized over a road network).

#ifndef MSRL_SCENARIO_HPP_
#define MSRL_SCENARIO_HPP_

#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "msrl/envsim.hpp"
#include "msrl/io.hpp"
#include "msrl/roadnet.hpp"
#include "msrl/trajgen.hpp"

namespace msrl {

// Desk-scale default: 2 km x 2 km grid city, four RSUs with uneven
// background traffic, four vehicles on generated routes.
inline const char* kDeskScenario = R"(# desk-scale scenario
rsu.count = 4
rsu.compute = 60e9
rsu.max_load = 3e11
rsu.bw_up = 2e7
rsu.bw_down = 2e7
rsu.noise = 1e-13
rsu.0.x = 500
rsu.0.y = 500
rsu.0.bg_rate = 5.5
rsu.0.init_load = 1.5e11
rsu.1.x = 1500
rsu.1.y = 500
rsu.1.bg_rate = 2
rsu.2.x = 500
rsu.2.y = 1500
rsu.2.bg_rate = 4
rsu.2.init_load = 5e10
rsu.3.x = 1500
rsu.3.y = 1500
rsu.3.bg_rate = 1
backhaul.default = 1e9
backhaul.0.3 = 2.5e8
backhaul.1.2 = 2.5e8
channel.gain = 1
channel.carrier = 2.4e9
channel.light_speed = 3e8
veh.count = 4
veh.power = 0.2
veh.cycles_per_bit = 1e4
veh.task_bits = 4e6
veh.request_bits = 1e5
veh.result_bits = 1e6
env.alpha = 0.5
env.mu = 0.5
env.tau = 5e-8
env.lambda1 = 1
env.lambda2 = 1
env.slot_seconds = 2
env.horizon = 40
env.reward_mode = latency
env.bg_job_cycles = 1e10
net.grid = 5,5,500,13.9
traj.source = synthetic
traj.count = 200
traj.source_count = 600
traj.seed = 11
)";

namespace detail {

inline double indexed_or_default(const KeyValueConfig& kv, const std::string& group,
                                 std::size_t i, const std::string& field,
                                 double fallback) {
  const auto specific = group + "." + std::to_string(i) + "." + field;
  if (kv.has(specific)) return kv.get_double(specific, fallback);
  return kv.get_double(group + "." + field, fallback);
}

inline std::filesystem::path resolve(const std::filesystem::path& base,
                                     const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

// `net.grid = nx,ny,spacing,speed` or `net.nodes` + `net.edges` CSV paths.
inline RoadNetwork network_from_config(const KeyValueConfig& kv,
                                       const std::filesystem::path& base_dir) {
  if (kv.has("net.nodes") || kv.has("net.edges")) {
    if (!kv.has("net.nodes") || !kv.has("net.edges"))
      throw ConfigError("net.nodes and net.edges must be given together");
    const auto np = detail::resolve(base_dir, kv.get_string("net.nodes", ""));
    const auto ep = detail::resolve(base_dir, kv.get_string("net.edges", ""));
    std::ifstream nodes(np), edges(ep);
    if (!nodes) throw IoError("cannot open " + np.string());
    if (!edges) throw IoError("cannot open " + ep.string());
    return load_network(nodes, edges);
  }
  const auto spec = split(kv.get_string("net.grid", "5,5,500,13.9"), ',');
  if (spec.size() != 4) throw ConfigError("net.grid must be nx,ny,spacing,speed");
  auto nx = parse_int(spec[0]);
  auto ny = parse_int(spec[1]);
  auto sp = parse_double(spec[2]);
  auto sv = parse_double(spec[3]);
  if (!nx || !ny || !sp || !sv || *nx < 2 || *ny < 1 || *sp <= 0 || *sv <= 0)
    throw ConfigError("net.grid must be nx,ny,spacing,speed with positive values");
  return make_grid_network(static_cast<int>(*nx), static_cast<int>(*ny), *sp, *sv);
}

// Synthetic "recorded" trips -> profile -> generated pool, all seeded.
inline std::vector<Trajectory> synthetic_pool(const RoadNetwork& net,
                                              const GenConfig& gen,
                                              std::size_t source_count,
                                              std::size_t pool_count,
                                              std::uint64_t seed) {
  const auto src = default_synthetic_source(net);
  const auto raw = synthesize_source_trajectories(net, src, source_count, seed);
  const auto segs = prepare_segments(raw, net, gen);
  const auto prof = build_profile(segs, gen);
  return generate_dataset(prof, net, gen, pool_count, mix_seed(seed + 1)).trajectories;
}

inline Scenario scenario_from_config(const KeyValueConfig& kv,
                                     const std::filesystem::path& base_dir = ".") {
  Scenario s;
  const auto e = kv.get_int("rsu.count", 0);
  if (e < 1) throw ConfigError("rsu.count must be >= 1");
  for (std::size_t i = 0; i < static_cast<std::size_t>(e); ++i) {
    RsuSpec r;
    r.id = static_cast<int>(i);
    auto get = [&](const char* f, double d) {
      return detail::indexed_or_default(kv, "rsu", i, f, d);
    };
    const auto xk = "rsu." + std::to_string(i) + ".x";
    const auto yk = "rsu." + std::to_string(i) + ".y";
    if (!kv.has(xk) || !kv.has(yk)) throw ConfigError("missing " + xk + "/" + yk);
    r.pos = {kv.get_double(xk, 0), kv.get_double(yk, 0)};
    r.compute = get("compute", r.compute);
    r.max_load = get("max_load", r.max_load);
    r.bw_up = get("bw_up", r.bw_up);
    r.bw_down = get("bw_down", r.bw_down);
    r.noise_power = get("noise", r.noise_power);
    r.init_load = get("init_load", r.init_load);
    r.bg_rate = get("bg_rate", r.bg_rate);
    s.rsus.push_back(r);
  }
  const double bh_default = kv.get_double("backhaul.default", 1e9);
  s.backhaul.assign(static_cast<std::size_t>(e),
                    std::vector<double>(static_cast<std::size_t>(e), bh_default));
  for (std::size_t i = 0; i < static_cast<std::size_t>(e); ++i) {
    s.backhaul[i][i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < static_cast<std::size_t>(e); ++j) {
      const auto k = "backhaul." + std::to_string(i) + "." + std::to_string(j);
      if (kv.has(k) && i != j) {
        s.backhaul[i][j] = kv.get_double(k, bh_default);
        s.backhaul[j][i] = s.backhaul[i][j];
      }
    }
  }
  s.channel.gain_coeff = kv.get_double("channel.gain", s.channel.gain_coeff);
  s.channel.carrier = kv.get_double("channel.carrier", s.channel.carrier);
  s.channel.light_speed = kv.get_double("channel.light_speed", s.channel.light_speed);

  auto& env = s.env;
  env.alpha = kv.get_double("env.alpha", env.alpha);
  env.mu = kv.get_double("env.mu", env.mu);
  env.tau = kv.get_double("env.tau", env.tau);
  env.lambda1 = kv.get_double("env.lambda1", env.lambda1);
  env.lambda2 = kv.get_double("env.lambda2", env.lambda2);
  env.slot_seconds = kv.get_double("env.slot_seconds", env.slot_seconds);
  env.horizon = static_cast<int>(kv.get_int("env.horizon", env.horizon));
  env.bg_job_cycles = kv.get_double("env.bg_job_cycles", env.bg_job_cycles);
  env.min_distance = kv.get_double("env.min_distance", env.min_distance);
  env.latency_scale = kv.get_double("env.latency_scale", env.latency_scale);
  env.warmup_seed = static_cast<std::uint64_t>(kv.get_int("env.warmup_seed", 7));
  const auto mode = kv.get_string("env.reward_mode", "latency");
  if (mode == "latency") {
    env.reward_mode = RewardMode::kLatency;
  } else if (mode == "qoe") {
    env.reward_mode = RewardMode::kQoe;
  } else {
    throw ConfigError("env.reward_mode must be latency or qoe");
  }

  const auto nv = kv.get_int("veh.count", 0);
  if (nv < 1) throw ConfigError("veh.count must be >= 1");
  for (std::size_t i = 0; i < static_cast<std::size_t>(nv); ++i) {
    VehicleSpec v;
    v.id = static_cast<int>(i);
    auto get = [&](const char* f, double d) {
      return detail::indexed_or_default(kv, "veh", i, f, d);
    };
    v.tx_power = get("power", v.tx_power);
    v.cycles_per_bit = get("cycles_per_bit", v.cycles_per_bit);
    v.request_bits = get("request_bits", v.request_bits);
    v.result_bits = get("result_bits", v.result_bits);
    // task_bits may be a per-slot schedule "a;b;c"
    const auto tk = "veh." + std::to_string(i) + ".task_bits";
    const auto sched = kv.get_string(kv.has(tk) ? tk : "veh.task_bits", "4e6");
    v.task_bits.clear();
    for (const auto& item : split(sched, ';')) {
      auto b = parse_double(item);
      if (!b) throw ConfigError("bad task_bits entry '" + item + "'");
      v.task_bits.push_back(*b);
    }
    s.vehicles.push_back(v);
  }

  const auto source = kv.get_string("traj.source", "synthetic");
  if (source == "synthetic") {
    const auto net = network_from_config(kv, base_dir);
    GenConfig gen = GenConfig::from(kv);
    s.trajectory_pool = synthetic_pool(
        net, gen, static_cast<std::size_t>(kv.get_int("traj.source_count", 600)),
        static_cast<std::size_t>(kv.get_int("traj.count", 200)),
        static_cast<std::uint64_t>(kv.get_int("traj.seed", 11)));
  } else {
    const auto path = detail::resolve(base_dir, source);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectories " + path.string());
    try {
      s.trajectory_pool = read_trajectories(in);
    } catch (const ParseError& err) {
      throw ConfigError(path.string() + ": " + err.what());
    }
  }
  for (auto it = s.trajectory_pool.begin(); it != s.trajectory_pool.end();) {
    it = it->points.empty() ? s.trajectory_pool.erase(it) : it + 1;
  }
  s.validate();
  return s;
}

inline KeyValueConfig desk_scenario_config() {
  return KeyValueConfig::parse_string(kDeskScenario);
}

inline Scenario desk_scenario() { return scenario_from_config(desk_scenario_config()); }

}  // namespace msrl

#endif  // MSRL_SCENARIO_HPP_
