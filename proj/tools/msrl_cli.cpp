// SPDX-License-Identifier: Apache-2.0
//
// msrl: trajgen | train | eval | compare
//
// Exit codes: 0 ok, 2 config error, 3 runtime abort (NaN), 4 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msrl.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kAbort = 3, kIo = 4 };

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : msrl::split(s, ',')) {
    auto v = msrl::parse_double(item);
    if (!v) throw msrl::ConfigError("bad --sweep-values entry '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-model multi-agent RL for vehicle-twin task pre-migration"};
  app.require_subcommand(1);

  msrl::ExperimentSpec spec;
  std::uint64_t seed = 0;
  int episodes = 0;
  std::string policy, sweep_values;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", spec.scenario, "scenario config (default: built-in desk scenario)");
    sub->add_option("--train-cfg", spec.train_cfg, "training config");
    sub->add_option("--out", spec.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override train.seed / gen.seed");
    sub->add_option("--episodes", episodes, "override train.episodes (eval: evaluation episodes)");
    sub->add_option("--policy", policy, "policy tag; compare accepts a comma list");
  };

  auto* trajgen = app.add_subcommand("trajgen", "generate trajectories from a mobility profile");
  trajgen->add_option("--gen-cfg", spec.gen_cfg, "generation config");
  trajgen->add_option("--out", spec.out, "output directory")->capture_default_str();
  trajgen->add_option("--seed", seed, "override gen.seed");
  trajgen->add_option("--grid-cell", spec.grid_cell, "density grid cell size, m")->capture_default_str();

  auto* train = app.add_subcommand("train", "train a policy, writing report.csv and checkpoints");
  common(train);
  train->add_option("--resume", spec.resume, "checkpoint to resume from");

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint or baseline");
  common(eval);
  eval->add_option("--resume", spec.resume, "checkpoint to evaluate");

  auto* compare = app.add_subcommand("compare", "train and compare policies over a sweep");
  common(compare);
  compare->add_option("--sweep-param", spec.sweep_param, "scenario key to sweep, e.g. rsu.compute");
  compare->add_option("--sweep-values", sweep_values, "comma-separated values");
  compare->add_option("--eval-episodes", spec.eval_episodes, "evaluation episodes per point")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    for (auto* sub : {trajgen, train, eval, compare}) {
      if (sub->count("--seed")) spec.seed = seed;
    }
    for (auto* sub : {train, eval, compare}) {
      if (sub->count("--episodes")) spec.episodes = episodes;
    }
    if (!policy.empty()) spec.policies = msrl::split(policy, ',');
    if (!sweep_values.empty()) spec.sweep_values = parse_values(sweep_values);

    std::string summary;
    if (*trajgen) summary = msrl::cmd_trajgen(spec);
    else if (*train) summary = msrl::cmd_train(spec);
    else if (*eval) summary = msrl::cmd_eval(spec);
    else summary = msrl::cmd_compare(spec);
    std::cout << summary << '\n';
    return kOk;
  } catch (const msrl::NanAbort& e) {
    std::cerr << "abort: " << e.what() << '\n';
    return kAbort;
  } catch (const msrl::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const msrl::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAbort;
  }
}
