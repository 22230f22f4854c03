// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Uses configs/desk.train and the built-in desk scenario.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "msrl.hpp"
#include "oracles.hpp"

using namespace msrl;
namespace fs = std::filesystem;

namespace {

int g_failed = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %-22s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

TrainConfig desk_train_config() {
  return TrainConfig::from(KeyValueConfig::load(std::string(MSRL_SOURCE_DIR) + "/configs/desk.train"));
}

// -- oracle equivalence -- //

void oracle_equivalence() {
  Stopwatch sw;
  Rng rng(101);
  std::uniform_real_distribution<double> coord(0, 100), wt(1, 20), unit(0, 1);
  long pairs = 0, path_bad = 0;
  for (int g = 0; g < 200; ++g) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<RoadNode> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({i, {coord(rng), coord(rng)}});
    std::vector<RoadEdge> edges;
    std::vector<oracle::Edge> oe;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (unit(rng) < 0.4) {
          const double w = wt(rng);
          edges.push_back({a, b, w, 10});
          oe.push_back({a, b, w});
        }
    RoadNetwork net(nodes, edges);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        ++pairs;
        const double ref = oracle::brute_shortest(n, oe, s, t);
        try {
          if (shortest_path(net, s, t).length != ref) ++path_bad;
        } catch (const UnreachableError&) {
          if (std::isfinite(ref)) ++path_bad;
        }
      }
  }

  double q_err = 0;
  std::normal_distribution<double> nd(0, 1);
  for (int ep = 0; ep < 100; ++ep) {
    const std::size_t T = 1 + rng() % 80;
    std::vector<double> r(T), q(T);
    for (std::size_t t = 0; t < T; ++t) {
      r[t] = nd(rng);
      q[t] = nd(rng);
    }
    const auto a = lambda_returns(r, q, 0.95, 0.95);
    const auto b = oracle::direct_qhat(r, q, 0.95, 0.95);
    for (std::size_t t = 0; t < T; ++t)
      q_err = std::max(q_err, std::abs(a[t] - b[t]) / std::max(1.0, std::abs(b[t])));
  }

  double kde_err = 0;
  std::normal_distribution<double> spread(0, 40);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<GeoPoint> pts;
    std::vector<double> xs, ys;
    for (int i = 0; i < 300; ++i) {
      pts.push_back({spread(rng), spread(rng)});
      xs.push_back(pts.back().x);
      ys.push_back(pts.back().y);
    }
    const double h = 5.0 + 5.0 * rep;
    const auto m = fit_kde(pts, h);
    for (int k = 0; k < 100; ++k) {
      const GeoPoint x{spread(rng), spread(rng)};
      const double ref = oracle::naive_density(xs, ys, h, x.x, x.y);
      if (ref > 0) kde_err = std::max(kde_err, std::abs(density(m, x) - ref) / ref);
    }
  }
  const double secs = sw.seconds();
  const bool pass = path_bad == 0 && q_err <= 1e-12 && kde_err <= 1e-12 && secs < 30;
  report("oracle-equivalence", pass,
         std::to_string(pairs) + " node pairs, " + std::to_string(path_bad) + " mismatches; qhat rel " +
             fmt("%.2e", q_err) + "; kde rel " + fmt("%.2e", kde_err) + "; " + fmt("%.1fs", secs));
}

// -- gradient checks -- //

void gradient_checks() {
  Stopwatch sw;
  Rng rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  auto rvec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
  };
  auto sizes = [&](int n) {
    std::vector<int> h;
    for (int i = 0; i < n; ++i) h.push_back(2 + static_cast<int>(rng() % 7));
    return h;
  };
  double client_err = 0, server_err = 0, critic_err = 0;
  for (int c = 0; c < 20; ++c) {
    const int obs = 2 + static_cast<int>(rng() % 8), na = 2 + static_cast<int>(rng() % 4);
    const int layers = 2 + static_cast<int>(rng() % 3);
    SplitActor a(obs, sizes(layers), 1 + static_cast<int>(rng() % (layers - 1)), na, rng);
    const Vec o = rvec(obs);
    const int act = static_cast<int>(rng() % na);
    for (auto path : {ActorPath::kClient, ActorPath::kServer}) {
      auto loss = [&] {
        PathForward fw;
        a.forward_path(o, path, fw);
        return -log_prob(fw.dist, act);
      };
      PathForward fw;
      a.forward_path(o, path, fw);
      ActorGrad g = a.zero_grad();
      a.backward_path(fw, -dlogp_dlogits(fw.dist, act), g);
      double e = grad_check(a.client().params(), g.client, loss);
      if (path == ActorPath::kClient) {
        e = std::max(e, grad_check(a.client_head().params(), g.client_head, loss));
        client_err = std::max(client_err, e);
      } else {
        e = std::max(e, grad_check(a.server().params(), g.server, loss));
        e = std::max(e, grad_check(a.server_head().params(), g.server_head, loss));
        server_err = std::max(server_err, e);
      }
    }

    const int agents = 1 + static_cast<int>(rng() % 4), jo_dim = agents * (2 + static_cast<int>(rng() % 5));
    Critic cr(jo_dim, agents, na, sizes(2), rng);
    const Vec jo = rvec(jo_dim);
    std::vector<int> ja;
    for (int v = 0; v < agents; ++v) ja.push_back(static_cast<int>(rng() % na));
    const double target = u(rng);
    auto closs = [&] {
      const double q = cr.value(jo, ja);
      return (q - target) * (q - target);
    };
    MlpCache cache;
    const double q = cr.net().forward(cr.encode(jo, ja), cache)[0];
    Params g = zeros_like(cr.net().params());
    Vec up(1);
    up[0] = 2 * (q - target);
    cr.net().backward(cache, up, g);
    critic_err = std::max(critic_err, grad_check(cr.net().params(), g, closs));
  }
  const double secs = sw.seconds();
  const bool pass = client_err < 1e-4 && server_err < 1e-4 && critic_err < 1e-4 && secs < 60;
  report("gradient-checks", pass,
         "max rel err client " + fmt("%.2e", client_err) + ", server " + fmt("%.2e", server_err) +
             ", critic " + fmt("%.2e", critic_err) + " (20 configs each); " + fmt("%.1fs", secs));
}

// -- ordering and parameter counts -- //

struct TrainedRuns {
  std::map<PolicyKind, std::vector<double>> final_rewards;  // final quartile, pooled over seeds
  std::vector<double> split_params;
  std::vector<PolicyBundle> seed1;  // one bundle per policy, all_policies() order
  double seconds = 0;
};

TrainedRuns train_all(const std::shared_ptr<const Scenario>& scn) {
  Stopwatch sw;
  TrainedRuns out;
  const auto base = desk_train_config();
  const int eps = base.episodes;
  for (auto kind : all_policies()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto cfg = base;
      cfg.seed = seed;
      Trainer tr(scn, kind, cfg);
      const auto rep = tr.train(eps);
      for (int i = eps - eps / 4; i < eps; ++i) {
        out.final_rewards[kind].push_back(rep[static_cast<std::size_t>(i)].mean_reward);
        if (kind == PolicyKind::kSplitModel) out.split_params.push_back(rep[static_cast<std::size_t>(i)].active_params);
      }
      if (seed == 1) out.seed1.push_back(tr.bundle());
    }
  }
  out.seconds = sw.seconds();
  return out;
}

void ordering(const TrainedRuns& runs) {
  using P = PolicyKind;
  const auto& fr = runs.final_rewards;
  std::string detail;
  bool pass = runs.seconds < 600;
  auto check = [&](P hi, P lo) {
    const double m = mean(fr.at(hi)) - mean(fr.at(lo));
    const double se = std::hypot(std_error(fr.at(hi)), std_error(fr.at(lo)));
    const bool ok = m >= se;
    pass = pass && ok;
    detail += std::string(policy_name(hi)) + ">" + policy_name(lo) + " " + fmt("%+.2f SE", m / se) +
              (ok ? "" : " (short)") + "; ";
  };
  check(P::kLocalEdgeModel, P::kSplitModel);
  check(P::kSplitModel, P::kLocalModel);
  check(P::kLocalModel, P::kRandomMigration);
  check(P::kSplitModel, P::kFullMigration);
  detail += "means";
  for (auto k : all_policies()) detail += " " + fmt("%.4f", mean(fr.at(k)));
  detail += "; " + fmt("%.1fs", runs.seconds);
  report("ordering", pass, detail);
}

void parameter_counts(const TrainedRuns& runs) {
  Rng rng(1);
  const SplitActor desk(9, {8, 16, 16, 32, 16}, 2, 4, rng);
  const auto local = desk.param_count(ActorPath::kClient);
  const auto edge = desk.param_count(ActorPath::kServer);
  const double split = mean(runs.split_params);
  const bool closed = local == 292 && edge == 1704;
  const bool pass = closed && split > static_cast<double>(local) &&
                    split < static_cast<double>(edge) && split <= 0.9 * static_cast<double>(edge);
  report("parameter-counts", pass,
         "client " + std::to_string(local) + ", client+server " + std::to_string(edge) +
             "; Split final-quartile mean " + fmt("%.1f", split) + " (limit " +
             fmt("%.1f", 0.9 * static_cast<double>(edge)) + ")");
}

// -- environment invariants -- //

void environment_invariants(const std::shared_ptr<const Scenario>& scn, std::vector<PolicyBundle>& bundles) {
  Stopwatch sw;
  Environment env(scn);
  Rng rng(303);
  long slots = 0, cap = 0, err = 0, tp = 0;
  std::vector<int> a(scn->num_vehicles());
  for (int ep = 0; slots < 100000; ++ep) {
    env.reset(static_cast<std::uint64_t>(ep));
    for (int t = 0; t < env.horizon() && slots < 100000; ++t, ++slots) {
      for (auto& x : a) x = static_cast<int>(uniform_index(rng, scn->num_rsus()));
      const auto r = env.step(a);
      for (std::size_t e = 0; e < scn->num_rsus(); ++e)
        if (!(env.state().load[e] >= 0 && env.state().load[e] <= scn->rsus[e].max_load)) ++cap;
      for (const auto& m : r.metrics) {
        if (!(m.error_rate >= 0 && m.error_rate < 1)) ++err;
        const double expect = std::max(m.t_proc_serving, m.t_proc_target + m.t_mig);
        if (std::abs(m.t_proc - expect) > 1e-12 * expect) ++tp;
      }
    }
  }

  // compute sweep: trained policies evaluated with the base latency scale
  const auto cfg = desk_train_config();
  const double scale = Environment(scn).scales().latency;
  const std::vector<double> ghz{40, 50, 60, 70, 80};
  std::string trend;
  bool monotone = true;
  for (auto& b : bundles) {
    std::vector<double> lat;
    for (double g : ghz) {
      auto kv = desk_scenario_config();
      kv.set("rsu.compute", fmt_double17(g * 1e9));
      auto point = std::make_shared<const Scenario>(scenario_from_config(kv));
      EvalOptions opts;
      opts.latency_scale = scale;
      lat.push_back(evaluate(b, point, 20, mix_seed(cfg.seed ^ 0xC0111AEULL), opts).mean_latency);
    }
    bool down = true;
    for (std::size_t i = 1; i < lat.size(); ++i) down = down && lat[i] < lat[i - 1];
    monotone = monotone && down;
    trend += std::string(policy_name(b.kind)) + " " + fmt("%.3f", lat.front()) + "->" +
             fmt("%.3f", lat.back()) + (down ? "" : " (not monotone)") + "; ";
  }
  const double secs = sw.seconds();
  const bool pass = cap == 0 && err == 0 && tp == 0 && monotone && secs < 120;
  report("environment-invariants", pass,
         std::to_string(slots) + " slots: cap " + std::to_string(cap) + ", eps " + std::to_string(err) +
             ", T^p " + std::to_string(tp) + " violations; 40->80 GHz latency: " + trend +
             fmt("%.1fs", secs));
}

// -- trajectory fidelity -- //

void trajectory_fidelity() {
  Stopwatch sw;
  const auto kv = KeyValueConfig::load(std::string(MSRL_SOURCE_DIR) + "/configs/desk.gen");
  const auto net = network_from_config(kv, std::string(MSRL_SOURCE_DIR) + "/configs");
  const GenConfig gen = GenConfig::from(kv);
  const auto raw = synthesize_source_trajectories(
      net, default_synthetic_source(net), static_cast<std::size_t>(kv.get_int("traj.source_count", 1000)),
      gen.seed);
  const auto segs = prepare_segments(raw, net, gen);
  const auto prof = build_profile(segs, gen);
  const auto ds = generate_dataset(prof, net, gen, 500, mix_seed(gen.seed + 1));
  const double tv = total_variation(start_hour_histogram(ds.trajectories), prof.hour_histogram);
  auto src = DensityGrid::covering(net, 100.0), out = DensityGrid::covering(net, 100.0);
  src.add(segs);
  out.add(ds.trajectories);
  const double r = pearson(src.counts, out.counts);
  const double secs = sw.seconds();
  const bool pass = tv <= 0.15 && r >= 0.7 && secs < 60;
  report("trajectory-fidelity", pass,
         std::to_string(ds.trajectories.size()) + " trajectories: hour TV " + fmt("%.4f", tv) +
             ", density Pearson " + fmt("%.4f", r) + "; " + fmt("%.1fs", secs));
}

// -- CLI determinism -- //

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

void cli_determinism() {
  Stopwatch sw;
  const std::string cli = MSRL_CLI_PATH;
  const std::string cfgs = std::string(MSRL_SOURCE_DIR) + "/configs/";
  const fs::path root = fs::temp_directory_path() / "msrl_acceptance_cli";
  fs::remove_all(root);
  struct Cmd {
    std::string name, args;
  };
  const std::vector<Cmd> cmds{
      {"trajgen", "trajgen --gen-cfg " + cfgs + "desk.gen"},
      {"train", "train --scenario " + cfgs + "desk.scenario --train-cfg " + cfgs +
                    "desk.train --episodes 20 --policy SplitModel"},
      {"eval", "eval --scenario " + cfgs + "desk.scenario --train-cfg " + cfgs +
                   "desk.train --episodes 5 --resume {train}/checkpoint_ep20.ckpt"},
      {"eval-baseline", "eval --scenario " + cfgs + "desk.scenario --episodes 5 --policy RandomMigration"},
      {"compare", "compare --scenario " + cfgs + "desk.scenario --train-cfg " + cfgs +
                      "desk.train --episodes 10 --eval-episodes 3 --sweep-param rsu.compute "
                      "--sweep-values 40e9,80e9"},
  };
  std::string detail;
  bool pass = true;
  for (const auto& c : cmds) {
    std::vector<std::map<std::string, std::string>> outs;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / (c.name + std::to_string(run));
      std::string args = c.args;
      const auto at = args.find("{train}");
      if (at != std::string::npos) args.replace(at, 7, (root / ("train" + std::to_string(run))).string());
      const std::string line = cli + " " + args + " --out " + out.string() + " > /dev/null 2>&1";
      const int rc = std::system(line.c_str());
      if (rc != 0) {
        pass = false;
        detail += c.name + " exited " + std::to_string(rc) + "; ";
        break;
      }
      outs.push_back(snapshot(out));
    }
    if (outs.size() != 2) continue;
    const bool same = outs[0] == outs[1] && !outs[0].empty();
    pass = pass && same;
    detail += c.name + (same ? " identical (" + std::to_string(outs[0].size()) + " files)" : " DIFFERS") + "; ";
  }
  fs::remove_all(root);
  report("cli-determinism", pass, detail + fmt("%.1fs", sw.seconds()));
}

}  // namespace

int main() {
  try {
    oracle_equivalence();
    gradient_checks();
    auto scn = std::make_shared<const Scenario>(desk_scenario());
    auto runs = train_all(scn);
    ordering(runs);
    parameter_counts(runs);
    environment_invariants(scn, runs.seed1);
    trajectory_fidelity();
    cli_determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
