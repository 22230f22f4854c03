// SPDX-License-Identifier: Apache-2.0
//
// Experiment commands behind the CLI: trajectory generation, training with
// incremental reports and checkpoints, single-checkpoint evaluation, and
// parameter sweeps comparing policies.

#ifndef MSRL_EXPERIMENT_HPP_
#define MSRL_EXPERIMENT_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msrl/checkpoint.hpp"
#include "msrl/io.hpp"
#include "msrl/msrl.hpp"
#include "msrl/policies.hpp"
#include "msrl/scenario.hpp"
#include "msrl/trajgen.hpp"

namespace msrl {

namespace fs = std::filesystem;

struct ExperimentSpec {
  std::string scenario;   // empty: built-in desk scenario
  std::string train_cfg;  // empty: defaults
  std::string gen_cfg;    // empty: defaults (trajgen)
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> policies;  // empty: command default
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::optional<int> episodes;
  std::string resume;      // checkpoint to resume (train) or evaluate (eval)
  double grid_cell = 100.0;
  int eval_episodes = 20;
};

inline const char* kMetricsHeader =
    "episode,slot,vehicle,action,serving,T_u,T_m,T_p,T_d,T_total,err_rate,qoe,reward,remapped";
inline const char* kEvalHeader =
    "policy,episodes,mean_reward,mean_qoe,mean_latency,mean_err,active_params";
inline const char* kCompareHeader = "policy,param_value,metric,mean,stderr";

// -- config loading -- //

inline KeyValueConfig load_scenario_config(const ExperimentSpec& spec, fs::path& base_dir) {
  if (spec.scenario.empty()) {
    base_dir = ".";
    return desk_scenario_config();
  }
  base_dir = fs::path(spec.scenario).parent_path();
  if (base_dir.empty()) base_dir = ".";
  return KeyValueConfig::load(spec.scenario);
}

inline std::shared_ptr<const Scenario> load_scenario(const ExperimentSpec& spec) {
  fs::path base;
  auto kv = load_scenario_config(spec, base);
  return std::make_shared<const Scenario>(scenario_from_config(kv, base));
}

inline TrainConfig load_train_config(const ExperimentSpec& spec) {
  KeyValueConfig kv;
  if (!spec.train_cfg.empty()) kv = KeyValueConfig::load(spec.train_cfg);
  auto cfg = TrainConfig::from(kv);
  if (spec.seed) cfg.seed = *spec.seed;
  if (spec.episodes) cfg.episodes = *spec.episodes;
  cfg.validate();
  return cfg;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline double std_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double m = 0;
  for (double x : xs) m += x;
  m /= n;
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (n - 1)) / std::sqrt(n);
}

// -- trajgen -- //

// Gen config keys: net.* (as in scenarios), gen.* (GenConfig), plus
// gen.count (trajectories to generate), traj.source (`synthetic` or a
// trajectory CSV path) and traj.source_count (synthetic only).
// Outputs: trajectories.csv, density.csv, hourly.csv.
inline std::string cmd_trajgen(const ExperimentSpec& spec) {
  KeyValueConfig kv;
  fs::path base = ".";
  if (!spec.gen_cfg.empty()) {
    kv = KeyValueConfig::load(spec.gen_cfg);
    base = fs::path(spec.gen_cfg).parent_path();
    if (base.empty()) base = ".";
  }
  GenConfig gen = GenConfig::from(kv);
  if (spec.seed) gen.seed = *spec.seed;
  const auto count = kv.get_int("gen.count", 500);
  if (count < 0) throw ConfigError("gen.count must be >= 0");
  const auto net = network_from_config(kv, base);

  std::vector<Trajectory> raw;
  const auto source = kv.get_string("traj.source", "synthetic");
  if (source == "synthetic") {
    const auto n = kv.get_int("traj.source_count", 1000);
    if (n < 1) throw ConfigError("traj.source_count must be >= 1");
    raw = synthesize_source_trajectories(net, default_synthetic_source(net),
                                         static_cast<std::size_t>(n), gen.seed);
  } else {
    const auto path = detail::resolve(base, source);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectories " + path.string());
    try {
      raw = read_trajectories(in);
    } catch (const ParseError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  const auto segs = prepare_segments(raw, net, gen);
  if (segs.empty() && count > 0) throw ConfigError("no usable trajectory segments in the source");

  Dataset ds;
  if (count > 0) {
    const auto prof = build_profile(segs, gen);
    ds = generate_dataset(prof, net, gen, static_cast<std::size_t>(count), mix_seed(gen.seed + 1));
  }

  ensure_dir(spec.out);
  const fs::path out(spec.out);
  write_file_atomic(out / "trajectories.csv", trajectories_csv(ds.trajectories));
  auto grid = DensityGrid::covering(net, spec.grid_cell);
  grid.add(ds.trajectories);
  write_file_atomic(out / "density.csv", grid.csv());
  const auto hist = start_hour_histogram(ds.trajectories);
  std::string h = "hour,fraction\n";
  for (int i = 0; i < kHoursPerDay; ++i) h += std::to_string(i) + ',' + fmt_double(hist[i]) + '\n';
  write_file_atomic(out / "hourly.csv", h);

  std::ostringstream msg;
  msg << "trajgen: " << ds.trajectories.size() << " trajectories (" << ds.requested
      << " requested, " << ds.skipped << " skipped) from " << segs.size() << " source segments";
  return msg.str();
}

// -- train -- //

inline std::string train_meta(const TrainConfig& c, PolicyKind kind) {
  std::ostringstream s;
  s << "policy = " << policy_name(kind) << '\n'
    << "train.gamma = " << fmt_double(c.gamma) << '\n'
    << "train.lam = " << fmt_double(c.lam) << '\n'
    << "train.clip = " << fmt_double(c.clip) << '\n'
    << "train.epochs = " << c.epochs << '\n'
    << "train.minibatch = " << c.minibatch << '\n'
    << "train.lr = " << fmt_double(c.lr) << '\n'
    << "train.episodes = " << c.episodes << '\n'
    << "train.thr0 = " << fmt_double(c.switching.thr0) << '\n'
    << "train.ch = " << fmt_double(c.switching.change) << '\n'
    << "train.window = " << c.switching.window << '\n'
    << "train.hold = " << c.switching.hold << '\n'
    << "train.flutter_limit = " << c.switching.flutter_limit << '\n'
    << "train.seed = " << c.seed << '\n'
    << "train.adv_norm = " << (c.normalize_advantages ? 1 : 0) << '\n'
    << "train.server_enabled = " << (c.server_enabled ? 1 : 0) << '\n'
    << "train.dual_on_server = " << (c.dual_on_server ? 1 : 0) << '\n';
  return s.str();
}

inline fs::path checkpoint_path(const fs::path& out, int episode) {
  return out / ("checkpoint_ep" + std::to_string(episode) + ".ckpt");
}

// Outputs: report.csv (rows appended to report.csv.partial as episodes
// finish, renamed at the end), checkpoint_ep<N>.ckpt every
// train.checkpoint_every episodes and at the end, train_meta.cfg.
// Resuming continues episode numbering and keeps earlier report rows found
// in the output directory.
inline std::string cmd_train(const ExperimentSpec& spec) {
  auto scenario = load_scenario(spec);
  TrainConfig cfg = load_train_config(spec);
  const PolicyKind kind = parse_policy(spec.policies.empty() ? "SplitModel" : spec.policies.front());
  std::optional<Trainer> trainer;
  if (!spec.resume.empty()) {
    auto bundle = load_checkpoint(spec.resume, cfg);
    if (bundle.kind != kind)
      throw ConfigError(std::string("checkpoint holds ") + policy_name(bundle.kind) + ", not " +
                        policy_name(kind));
    trainer.emplace(scenario, std::move(bundle));
  } else {
    trainer.emplace(scenario, kind, cfg);
  }
  cfg = trainer->bundle().cfg;

  ensure_dir(spec.out);
  const fs::path out(spec.out);
  write_file_atomic(out / "train_meta.cfg", train_meta(cfg, kind));
  const auto report = out / "report.csv";
  auto partial = report;
  partial += ".partial";
  std::string prior = std::string(kTrainReportHeader) + '\n';
  const int start = trainer->bundle().episodes_done;
  if (start > 0 && fs::exists(report)) {
    // keep rows up to the resumed episode
    std::istringstream in(read_file(report));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      auto f = split(line, ',');
      auto ep = f.empty() ? std::nullopt : parse_int(f[0]);
      if (ep && *ep <= start) prior += line + '\n';
    }
  }
  std::ofstream rep(partial, std::ios::binary | std::ios::trunc);
  if (!rep) throw IoError("cannot open " + partial.string());
  rep << prior << std::flush;

  const int total = cfg.episodes;
  int last_ckpt = -1;
  EpisodeStats last{};
  try {
    for (int i = 0; i < total; ++i) {
      last = trainer->run_episode();
      rep << report_row(last) << '\n' << std::flush;
      if (!rep) throw IoError("write failed: " + partial.string());
      if (last.episode % cfg.checkpoint_every == 0) {
        save_checkpoint(checkpoint_path(out, last.episode), trainer->bundle());
        last_ckpt = last.episode;
      }
    }
  } catch (const NanAbort& e) {
    const auto dump = out / "nan_dump.txt";
    std::ostringstream d;
    d << "error = " << e.what() << '\n'
      << "episodes_done = " << trainer->bundle().episodes_done << '\n'
      << "last_report = " << report_row(last) << '\n';
    write_file_atomic(dump, d.str());
    save_checkpoint(out / "nan_state.ckpt", trainer->bundle());
    throw NanAbort(std::string(e.what()) + " (state dumped to " + dump.string() + ")");
  }
  const int done = trainer->bundle().episodes_done;
  if (last_ckpt != done) save_checkpoint(checkpoint_path(out, done), trainer->bundle());
  rep.close();
  std::error_code ec;
  fs::rename(partial, report, ec);
  if (ec) throw IoError("rename failed: " + report.string());

  std::ostringstream msg;
  msg << "train: " << policy_name(kind) << " episodes " << start + 1 << ".." << done;
  if (total > 0) msg << ", last mean_reward " << fmt_double(last.mean_reward);
  return msg.str();
}

// -- eval -- //

inline std::string metrics_row(int episode, int slot, std::size_t v, const SlotMetrics& m) {
  std::string s = std::to_string(episode) + ',' + std::to_string(slot) + ',' + std::to_string(v) +
                  ',' + std::to_string(m.action) + ',' + std::to_string(m.serving);
  for (double x : {m.t_up, m.t_mig, m.t_proc, m.t_down, m.t_total, m.error_rate, m.qoe, m.reward})
    s += ',' + fmt_double(x);
  s += m.remapped ? ",1" : ",0";
  return s;
}

// Greedy evaluation of one checkpoint (--resume) or of a baseline policy.
// Outputs: eval.csv (kEvalHeader, one row) and metrics.csv (per slot and
// vehicle, kMetricsHeader).
inline std::string cmd_eval(const ExperimentSpec& spec) {
  auto scenario = load_scenario(spec);
  TrainConfig cfg = load_train_config(spec);
  PolicyBundle bundle;
  if (!spec.resume.empty()) {
    bundle = load_checkpoint(spec.resume, cfg);
  } else {
    const PolicyKind kind = parse_policy(spec.policies.empty() ? "FullMigration" : spec.policies.front());
    if (is_learned(kind)) throw ConfigError("evaluating a learned policy needs --resume <checkpoint>");
    bundle = PolicyBundle::create(kind, cfg, static_cast<int>(scenario->num_rsus() + 5),
                                  static_cast<int>(scenario->num_rsus()),
                                  static_cast<int>(scenario->num_vehicles()));
  }
  const int episodes = spec.episodes ? *spec.episodes : spec.eval_episodes;
  std::string metrics = std::string(kMetricsHeader) + '\n';
  EvalOptions opts;
  opts.on_slot = [&](int ep, int t, const SlotRecord& rec) {
    for (std::size_t v = 0; v < rec.metrics.size(); ++v) metrics += metrics_row(ep, t, v, rec.metrics[v]) + '\n';
  };
  const auto sum = evaluate(bundle, scenario, episodes, cfg.seed, opts);
  ensure_dir(spec.out);
  const fs::path out(spec.out);
  std::string e = std::string(kEvalHeader) + '\n';
  e += std::string(policy_name(bundle.kind)) + ',' + std::to_string(episodes) + ',' +
       fmt_double(sum.mean_reward) + ',' + fmt_double(sum.mean_qoe) + ',' +
       fmt_double(sum.mean_latency) + ',' + fmt_double(sum.mean_err) + ',' +
       fmt_double(sum.mean_active_params) + '\n';
  write_file_atomic(out / "eval.csv", e);
  write_file_atomic(out / "metrics.csv", metrics);
  return std::string("eval: ") + policy_name(bundle.kind) + " over " + std::to_string(episodes) +
         " episodes, mean_reward " + fmt_double(sum.mean_reward);
}

// -- compare -- //

inline std::vector<PolicyKind> all_policies() {
  return {PolicyKind::kSplitModel, PolicyKind::kLocalEdgeModel, PolicyKind::kLocalModel,
          PolicyKind::kFullMigration, PolicyKind::kRandomMigration};
}

// Learned policies train once on the base scenario (train.episodes); then
// every policy is evaluated at each sweep value on paired seeds, with the
// observation latency scale pinned to the base scenario's. Without a sweep
// the base scenario is the single point (param_value empty).
// Output: compare.csv in long format (kCompareHeader).
inline std::string cmd_compare(const ExperimentSpec& spec) {
  fs::path base_dir;
  const auto base_kv = load_scenario_config(spec, base_dir);
  auto base = std::make_shared<const Scenario>(scenario_from_config(base_kv, base_dir));
  TrainConfig cfg = load_train_config(spec);
  std::vector<PolicyKind> kinds;
  for (const auto& p : spec.policies) kinds.push_back(parse_policy(p));
  if (kinds.empty()) kinds = all_policies();
  if (!spec.sweep_param.empty() && spec.sweep_values.empty())
    throw ConfigError("--sweep-param needs --sweep-values");

  const double scale = Environment(with_reward_mode(base, cfg)).scales().latency;
  std::vector<PolicyBundle> bundles;
  for (auto k : kinds) {
    if (is_learned(k)) {
      Trainer tr(base, k, cfg);
      tr.train(cfg.episodes);
      bundles.push_back(std::move(tr.bundle()));
    } else {
      bundles.push_back(PolicyBundle::create(k, cfg, static_cast<int>(base->num_rsus() + 5),
                                             static_cast<int>(base->num_rsus()),
                                             static_cast<int>(base->num_vehicles())));
    }
  }

  struct Point {
    std::string label;
    std::shared_ptr<const Scenario> scenario;
  };
  std::vector<Point> points;
  if (spec.sweep_param.empty()) {
    points.push_back({"", base});
  } else {
    for (double v : spec.sweep_values) {
      auto kv = base_kv;
      kv.set(spec.sweep_param, fmt_double17(v));
      points.push_back({fmt_double(v), std::make_shared<const Scenario>(scenario_from_config(kv, base_dir))});
    }
  }

  const int episodes = spec.eval_episodes;
  const std::uint64_t eval_seed = mix_seed(cfg.seed ^ 0xC0111AEULL);
  std::string csv = std::string(kCompareHeader) + '\n';
  for (const auto& pt : points) {
    for (auto& b : bundles) {
      EvalOptions opts;
      opts.latency_scale = scale;
      const auto sum = evaluate(b, pt.scenario, episodes, eval_seed, opts);
      auto col = [&](auto field) {
        std::vector<double> xs;
        for (const auto& e : sum.per_episode) xs.push_back(field(e));
        return xs;
      };
      const std::vector<std::pair<const char*, std::vector<double>>> metrics{
          {"reward", col([](const EpisodeStats& e) { return e.mean_reward; })},
          {"qoe", col([](const EpisodeStats& e) { return e.mean_qoe; })},
          {"latency", col([](const EpisodeStats& e) { return e.mean_latency; })},
          {"err_rate", col([](const EpisodeStats& e) { return e.mean_err; })},
          {"active_params", col([](const EpisodeStats& e) { return e.active_params; })},
      };
      for (const auto& [name, xs] : metrics) {
        double m = 0;
        for (double x : xs) m += x;
        if (!xs.empty()) m /= static_cast<double>(xs.size());
        csv += std::string(policy_name(b.kind)) + ',' + pt.label + ',' + name + ',' +
               fmt_double(m) + ',' + fmt_double(std_error(xs)) + '\n';
      }
    }
  }
  ensure_dir(spec.out);
  write_file_atomic(fs::path(spec.out) / "compare.csv", csv);
  return "compare: " + std::to_string(kinds.size()) + " policies x " +
         std::to_string(points.size()) + " points, " + std::to_string(episodes) +
         " evaluation episodes each";
}

}  // namespace msrl

#endif  // MSRL_EXPERIMENT_HPP_
