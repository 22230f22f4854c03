// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "msrl/switching.hpp"

using namespace msrl;

TEST(Switching, HighMeanPicksServer) {
  SwitchController c(SwitchConfig{0.7, 0.0, 4, 8, 4});
  EXPECT_EQ(c.select(0.9).model, ModelChoice::kServer);
}

TEST(Switching, LowMeanPicksClient) {
  SwitchController c(SwitchConfig{0.7, 0.005, 16, 32, 4});
  auto s = c.select(0.1);
  EXPECT_EQ(s.model, ModelChoice::kClient);
  EXPECT_FALSE(s.dual_training);
}

TEST(Switching, ThresholdClosedForm) {
  SwitchController c(SwitchConfig{0.7, 0.01, 16, 32, 4});
  for (int i = 0; i < 3; ++i) EXPECT_EQ(c.select(1.0).model, ModelChoice::kServer);
  EXPECT_NEAR(c.threshold(), 0.73, 1e-15);
}

TEST(Switching, WindowMeanDecides) {
  SwitchController c(SwitchConfig{0.5, 0.0, 2, 8, 10});
  c.select(1.0);
  // mean(1.0, 0.2) = 0.6 > 0.5 despite the low latest entropy
  EXPECT_EQ(c.select(0.2).model, ModelChoice::kServer);
}

TEST(Switching, FlutterTriggersHold) {
  SwitchController c(SwitchConfig{0.5, 0.0, 4, 5, 2});
  c.select(1.0);  // mean 1    -> S
  c.select(0.0);  // mean 0.5  -> C (1 alternation)
  c.select(1.0);  // mean 2/3  -> S (2)
  auto s = c.select(0.0);  // mean 0.5 -> C, 3 alternations > 2 -> hold
  EXPECT_EQ(s.model, ModelChoice::kServer);
  EXPECT_TRUE(s.dual_training);
  EXPECT_EQ(c.hold_remaining(), 5);
  for (int i = 0; i < 5; ++i) {
    auto h = c.select(0.0);
    EXPECT_EQ(h.model, ModelChoice::kServer);
    EXPECT_TRUE(h.dual_training);
  }
  EXPECT_EQ(c.hold_remaining(), 0);
  EXPECT_EQ(c.select(0.0).model, ModelChoice::kClient);
  EXPECT_EQ(c.holds(), 1);
}

// Eq. closed form holds at every step, and once a hold starts the gate does
// not alternate more than once per H slots.
TEST(Switching, PropertiesUnderRandomEntropy) {
  for (double ch : {0.003, -0.002, 0.0}) {
    SwitchConfig cfg{0.6, ch, 4, 6, 1};
    SwitchController c(cfg);
    Rng rng(42);
    std::vector<ModelChoice> seq;
    for (int t = 0; t < 3000; ++t) {
      seq.push_back(c.select(1.4 * uniform01(rng)).model);
      ASSERT_NEAR(c.threshold(), cfg.thr0 + static_cast<double>(c.server_calls()) * ch, 1e-12);
      ASSERT_GE(c.hold_remaining(), 0);
    }
    EXPECT_GT(c.holds(), 0);
  }
}

// A hold pins the server for the next H slots, so the H-slot window opened
// by a hold contains at most the one alternation that entered it.
TEST(Switching, HoldLimitsAlternations) {
  SwitchConfig cfg{0.5, 0.0, 3, 10, 1};
  SwitchController c(cfg);
  std::vector<ModelChoice> seq;
  std::vector<bool> hold;
  for (int t = 0; t < 400; ++t) {
    auto s = c.select(t % 2 ? 1.0 : 0.0);
    seq.push_back(s.model);
    hold.push_back(s.dual_training);
  }
  int starts = 0;
  for (std::size_t t = 0; t + cfg.hold <= seq.size(); ++t) {
    if (!hold[t] || (t > 0 && hold[t - 1])) continue;
    ++starts;
    int alt = 0;
    for (std::size_t i = t; i < t + cfg.hold; ++i) {
      EXPECT_TRUE(hold[i]);
      if (i > 0) alt += seq[i] != seq[i - 1];
    }
    EXPECT_LE(alt, 1);
  }
  EXPECT_GT(starts, 5);
}

TEST(Switching, RejectsNonFiniteEntropy) {
  SwitchController c(SwitchConfig{});
  EXPECT_THROW(c.select(std::nan("")), ContractError);
}
