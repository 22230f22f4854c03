// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "msrl/msrl.hpp"
#include "msrl/scenario.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace msrl;

namespace {

double checksum(const Params& p) {
  double s = 0;
  for (const auto& l : p) s += l.w.sum() * 1.000001 + l.b.sum();
  return s;
}

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sem(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

// one vehicle next to RSU 0; RSU 1 is far and heavily loaded
std::shared_ptr<const Scenario> bandit_scenario(int horizon) {
  auto s = testutil::scenario({{0, 0}, {400, 0}}, {{20, 0}}, 2e8);
  s.rsus[1].init_load = 1.5e11;
  s.rsus[0].bg_rate = 0.5;
  s.rsus[1].bg_rate = 0.5;
  s.env.horizon = horizon;
  return testutil::shared(s);
}

TrainConfig small_cfg() {
  TrainConfig c;
  c.episodes = 0;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Returns, ZeroCriticExample) {
  std::vector<double> r{1, 1}, q{0, 0};
  auto out = lambda_returns(r, q, 0.95, 0.95);
  EXPECT_NEAR(out[0], 1.9025, 1e-12);
  EXPECT_NEAR(out[1], 1.0, 1e-12);
}

TEST(Returns, LambdaZeroIsOneStep) {
  std::vector<double> r{0.5, -1, 2}, q{0.3, 0.7, -0.2};
  auto out = lambda_returns(r, q, 0.9, 0.0);
  EXPECT_NEAR(out[0], 0.5 + 0.9 * 0.7, 1e-12);
  EXPECT_NEAR(out[1], -1 + 0.9 * -0.2, 1e-12);
  EXPECT_NEAR(out[2], 2.0, 1e-12);
}

TEST(Returns, BackwardEqualsDirectSum) {
  Rng rng(12);
  std::normal_distribution<double> n(0, 1);
  for (int ep = 0; ep < 100; ++ep) {
    const std::size_t T = 1 + rng() % 60;
    std::vector<double> r(T), q(T);
    for (std::size_t t = 0; t < T; ++t) {
      r[t] = n(rng);
      q[t] = n(rng);
    }
    auto a = lambda_returns(r, q, 0.95, 0.9);
    auto b = oracle::direct_qhat(r, q, 0.95, 0.9);
    for (std::size_t t = 0; t < T; ++t) EXPECT_NEAR(a[t], b[t], 1e-12 * std::max(1.0, std::abs(b[t])));
  }
}

TEST(Advantage, CounterfactualExamples) {
  std::vector<double> det{0, 1, 0}, q{5, 3, 9};
  EXPECT_EQ(3.0 - counterfactual_baseline(det, q), 0.0);
  std::vector<double> half{0.5, 0.5}, q2{2, 0};
  EXPECT_DOUBLE_EQ(2.0 - counterfactual_baseline(half, q2), 1.0);
  std::vector<double> p{0.2, 0.5, 0.3}, q3{1.5, -2, 4};
  const double b = counterfactual_baseline(p, q3);
  double s = 0;
  for (int a = 0; a < 3; ++a) s += p[a] * (q3[a] - b);
  EXPECT_NEAR(s, 0.0, 1e-15);
}

TEST(Surrogate, Examples) {
  auto same = clipped_surrogate(-0.7, -0.7, 2.5, 0.2);
  EXPECT_DOUBLE_EQ(same.value, 2.5);
  auto up = clipped_surrogate(std::log(1.5), 0.0, 1.0, 0.2);
  EXPECT_NEAR(up.value, 1.2, 1e-12);
  EXPECT_EQ(up.d_logp, 0.0);
  Rng rng(3);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const double nl = n(rng), ol = n(rng), a = n(rng);
    EXPECT_LE(clipped_surrogate(nl, ol, a, 0.2).value, std::exp(nl - ol) * a + 1e-12);
  }
}

TEST(Surrogate, LossIsMinusMeanAdvantageAtOldPolicy) {
  Rng rng(4);
  SplitActor actor(9, {8, 16, 16, 32, 16}, 2, 4, rng);
  std::vector<PolicySample> batch;
  double sum = 0;
  for (int i = 0; i < 6; ++i) {
    Vec o = Vec::Random(9);
    auto d = actor.forward_client(o).dist;
    const double adv = 0.3 * i - 0.5;
    batch.push_back({o, i % 4, log_prob(d, i % 4), 0.0, adv, ModelChoice::kClient, false});
    sum += adv;
  }
  ActorGrad g = actor.zero_grad();
  auto st = accumulate_policy_grad(actor, batch, 0.2, g);
  EXPECT_NEAR(st.policy_loss, -sum / 6, 1e-12);
  EXPECT_FALSE(g.server_touched);
}

TEST(CriticLoss, Examples) {
  std::vector<double> t{1, 3}, z{0, 0};
  EXPECT_DOUBLE_EQ(critic_mse(t, z), 5.0);
  EXPECT_EQ(critic_mse(t, t), 0.0);
}

TEST(PolicyGradient, BanditProbabilityRisesMonotonically) {
  Rng rng(8);
  AgentModel m;
  m.actor = SplitActor(1, {4, 4}, 1, 2, rng);
  Vec o = Vec::Ones(1);
  double prev = m.actor.forward_client(o).dist.probs[0];
  for (int step = 0; step < 100; ++step) {
    const auto d = m.actor.forward_client(o).dist;
    std::vector<PolicySample> batch{{o, 0, log_prob(d, 0), 0, +1.0, ModelChoice::kClient, false},
                                    {o, 1, log_prob(d, 1), 0, -1.0, ModelChoice::kClient, false}};
    ActorGrad g = m.actor.zero_grad();
    accumulate_policy_grad(m.actor, batch, 0.2, g);
    apply_actor_grad(m, g, {});
    const double p = m.actor.forward_client(o).dist.probs[0];
    ASSERT_GT(p, prev) << "step " << step;
    prev = p;
  }
}

TEST(Train, ZeroEpisodesEmptyReport) {
  Trainer tr(bandit_scenario(2), PolicyKind::kSplitModel, small_cfg());
  EXPECT_TRUE(tr.train(0).empty());
}

TEST(Train, DeterministicUnderSeed) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  auto run = [&] {
    auto cfg = small_cfg();
    Trainer tr(scn, PolicyKind::kSplitModel, cfg);
    std::vector<double> r;
    for (const auto& s : tr.train(5)) r.push_back(s.mean_reward);
    return r;
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, LearnsBanditBetterThanRandom) {
  auto scn = bandit_scenario(2);
  auto cfg = small_cfg();
  Trainer tr(scn, PolicyKind::kLocalModel, cfg);
  tr.train(50);
  auto learned = evaluate(tr.bundle(), scn, 200, 77);
  auto rnd_bundle = PolicyBundle::create(PolicyKind::kRandomMigration, cfg, 7, 2, 1);
  auto rnd = evaluate(rnd_bundle, scn, 200, 77);
  std::vector<double> a, b;
  for (const auto& e : learned.per_episode) a.push_back(e.mean_reward);
  for (const auto& e : rnd.per_episode) b.push_back(e.mean_reward);
  const double se = std::sqrt(sem(a) * sem(a) + sem(b) * sem(b));
  EXPECT_GT(mean(a) - mean(b), 3 * se);
}

TEST(Train, ServerDisabledNeverTouchesServer) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  auto cfg = small_cfg();
  cfg.server_enabled = false;
  Trainer tr(scn, PolicyKind::kSplitModel, cfg);
  std::vector<double> before;
  for (auto& a : tr.bundle().agents) {
    before.push_back(checksum(a.actor.server().params()) + checksum(a.actor.server_head().params()));
    a.actor.reset_server_forward_calls();
  }
  tr.train(5);
  for (std::size_t v = 0; v < tr.bundle().agents.size(); ++v) {
    auto& a = tr.bundle().agents[v];
    EXPECT_EQ(checksum(a.actor.server().params()) + checksum(a.actor.server_head().params()), before[v]);
    EXPECT_EQ(a.actor.server_forward_calls(), 0u);
    EXPECT_EQ(a.opt_server.step, 0);
  }
}

TEST(Train, ThresholdClosedFormThroughTraining) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  Trainer tr(scn, PolicyKind::kSplitModel, small_cfg());
  tr.train(3);
  for (const auto& a : tr.bundle().agents) {
    const auto& c = a.ctrl;
    EXPECT_NEAR(c.threshold(),
                c.config().thr0 + static_cast<double>(c.server_calls()) * c.config().change, 1e-12);
  }
}

TEST(Train, EntropyDoesNotRiseOverTraining) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  auto cfg = small_cfg();
  Trainer tr(scn, PolicyKind::kSplitModel, cfg);
  auto rep = tr.train(120);
  const std::size_t q = rep.size() / 4;
  double first = 0, last = 0;
  for (std::size_t i = 0; i < q; ++i) {
    first += rep[i].mean_entropy;
    last += rep[rep.size() - 1 - i].mean_entropy;
  }
  EXPECT_LE(last, first);
}

TEST(Evaluate, RepeatableAndNoLearning) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  Trainer tr(scn, PolicyKind::kSplitModel, small_cfg());
  tr.train(2);
  const auto before = checksum(tr.bundle().agents[0].actor.client().params());
  const auto thr = tr.bundle().agents[0].ctrl.threshold();
  auto a = evaluate(tr.bundle(), scn, 3, 9);
  auto b = evaluate(tr.bundle(), scn, 3, 9);
  EXPECT_EQ(a.mean_reward, b.mean_reward);
  EXPECT_EQ(checksum(tr.bundle().agents[0].actor.client().params()), before);
  EXPECT_EQ(tr.bundle().agents[0].ctrl.threshold(), thr);
}

TEST(Evaluate, RandomPolicyIsBalancedOnSymmetricPair) {
  auto s = testutil::scenario({{0, 0}, {200, 0}}, {{100, 0}});
  s.env.horizon = 100;
  auto scn = testutil::shared(s);
  auto b = PolicyBundle::create(PolicyKind::kRandomMigration, small_cfg(), 7, 2, 1);
  auto sum = evaluate(b, scn, 100, 3);
  const double total = static_cast<double>(sum.action_counts[0] + sum.action_counts[1]);
  EXPECT_EQ(total, 1e4);
  EXPECT_NEAR(sum.action_counts[0] / total, 0.5, 0.02);
}

TEST(Evaluate, LocalModelActiveParamsEqualClientCount) {
  auto scn = std::make_shared<const Scenario>(desk_scenario());
  auto b = PolicyBundle::create(PolicyKind::kLocalModel, small_cfg(), 9, 4, 4);
  auto sum = evaluate(b, scn, 2, 1);
  EXPECT_EQ(sum.mean_active_params, 292.0);
  auto e = PolicyBundle::create(PolicyKind::kLocalEdgeModel, small_cfg(), 9, 4, 4);
  EXPECT_EQ(evaluate(e, scn, 2, 1).mean_active_params, 1704.0);
}

TEST(TrainConfigFile, ParsesKeys) {
  auto kv = KeyValueConfig::parse_string(
      "train.gamma = 0.9\ntrain.lam = 0.8\ntrain.clip = 0.1\ntrain.epochs = 3\n"
      "train.minibatch = 16\ntrain.lr = 5e-4\ntrain.episodes = 7\ntrain.thr0 = 0.9\n"
      "train.ch = -0.001\ntrain.window = 8\ntrain.hold = 12\ntrain.flutter_limit = 2\n"
      "train.seed = 99\ntrain.reward_mode = qoe\n");
  auto c = TrainConfig::from(kv);
  EXPECT_EQ(c.gamma, 0.9);
  EXPECT_EQ(c.minibatch, 16);
  EXPECT_EQ(c.switching.change, -0.001);
  EXPECT_EQ(c.switching.hold, 12);
  EXPECT_EQ(*c.reward_mode, RewardMode::kQoe);
  kv.set("train.clip", "1.5");
  EXPECT_THROW(TrainConfig::from(kv), ConfigError);
}
