// Copyright 2026 The FunGrasp Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fungrasp/reward.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fungrasp/error.h"
#include "fungrasp/grasp_sim.h"
#include "test_util.h"

namespace fungrasp {
namespace {

TEST(QposReward, ClosedForms) {
  const VecX q{{0.1, 0.2, 0.3}};
  EXPECT_EQ(QposReward(q, q), 1.0);
  EXPECT_NEAR(QposReward(q + VecX{{1.0, 0.0, 0.0}}, q), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(std::exp(-1.0), 0.3679, 1e-4);
}

TEST(QposReward, DecreasesAlongRays) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    VecX q(6), v(6);
    for (int j = 0; j < 6; ++j) {
      q[j] = StandardNormal(rng);
      v[j] = 0.5 * StandardNormal(rng);
    }
    EXPECT_LT(QposReward(q + 2 * v, q), QposReward(q + v, q));
    EXPECT_GT(QposReward(q + v, q), 0.0);
  }
}

TEST(AffordReward, Cases) {
  const RewardConfig cfg;
  EXPECT_EQ(AffordReward(false, 0.0, 0.2, cfg), 0.0);
  EXPECT_EQ(AffordReward(true, 0.0, 0.2, cfg), 1.0);
  EXPECT_EQ(AffordReward(true, 0.06, 0.2, cfg), 0.0);  // 0.06 >= 0.2 / 4
  EXPECT_NEAR(AffordReward(true, 0.04, 0.2, cfg), std::exp(-0.04), 1e-15);
}

TEST(AffordReward, RadiusIsObjBbOverGamma) {
  Rng rng(2);
  RewardConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    cfg.gamma = UniformRange(rng, 0.5, 10.0);
    const double bb = UniformRange(rng, 0.01, 0.5);
    const double radius = AffordRadius(bb, cfg);
    ASSERT_EQ(radius, bb / cfg.gamma);
    const double below = std::nextafter(radius, 0.0);
    EXPECT_GT(AffordReward(true, below, bb, cfg), 0.0);
    EXPECT_EQ(AffordReward(true, radius, bb, cfg), 0.0);
  }
}

TEST(AffordReward, RadiusScalesWithObjectSize) {
  const RewardConfig cfg;
  EXPECT_EQ(AffordRadius(0.4, cfg), 4.0 * AffordRadius(0.1, cfg));
}

TEST(AffordReward, FixedRadiusWithoutClipping) {
  RewardConfig cfg;
  cfg.clip_on = false;
  EXPECT_EQ(AffordRadius(0.02, cfg), 0.10);
  EXPECT_GT(AffordReward(true, 0.09, 0.02, cfg), 0.0);
  EXPECT_EQ(AffordReward(true, 0.10, 0.02, cfg), 0.0);
}

TEST(CloseReward, StrictThresholdIndependentOfSuccess) {
  const RewardConfig cfg;
  EXPECT_EQ(CloseReward(0.0, cfg), 1.0);
  EXPECT_EQ(CloseReward(cfg.close_threshold, cfg), 0.0);
  RolloutRecord failed;
  failed.success = false;
  failed.d_min = 0.01;
  failed.d_final = 0.2;
  failed.obj_bb = 0.1;
  failed.q_style = VecX::Zero(2);
  failed.q_star = VecX::Zero(2);
  EXPECT_EQ(TotalReward(failed, cfg).r_close, 1.0);
}

RolloutRecord PerfectRecord() {
  RolloutRecord r;
  r.success = true;
  r.d_final = 0.0;
  r.d_min = 0.0;
  r.obj_bb = 0.1;
  r.q_style = VecX{{0.2, 0.4}};
  r.q_star = r.q_style;
  return r;
}

TEST(TotalReward, PlugInDefaults) {
  const RewardTerms t = TotalReward(PerfectRecord(), RewardConfig{});
  EXPECT_EQ(t.total, 4.0);
  RolloutRecord zero;
  zero.d_min = 1.0;
  zero.d_final = 1.0;
  zero.obj_bb = 0.1;
  zero.q_style = VecX::Zero(2);
  zero.q_star = VecX::Constant(2, 1e3);
  EXPECT_EQ(TotalReward(zero, RewardConfig{}).total, 0.0);
}

TEST(TotalReward, FlagsDropTermsExactly) {
  RewardConfig cfg;
  cfg.qpos_on = false;
  EXPECT_EQ(TotalReward(PerfectRecord(), cfg).total, 3.5);
  cfg = RewardConfig{};
  cfg.afford_on = false;
  EXPECT_EQ(TotalReward(PerfectRecord(), cfg).total, 2.0);
  cfg = RewardConfig{};
  cfg.close_on = false;
  EXPECT_EQ(TotalReward(PerfectRecord(), cfg).total, 3.5);
}

TEST(CombineRewards, WeightedSumExact) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    RewardConfig cfg;
    cfg.lambda_afford = UniformRange(rng, 0, 5);
    cfg.lambda_close = UniformRange(rng, 0, 5);
    cfg.lambda_qpos = UniformRange(rng, 0, 5);
    cfg.success_reward = UniformRange(rng, 0, 3);
    const double ra = Uniform01(rng), rc = Uniform01(rng) < 0.5 ? 0.0 : 1.0,
                 rq = Uniform01(rng);
    const bool success = Uniform01(rng) < 0.5;
    const RewardTerms t = CombineRewards(ra, rc, rq, success, cfg);
    const double expected = cfg.lambda_afford * ra + cfg.lambda_close * rc +
                            cfg.lambda_qpos * rq + (success ? cfg.success_reward : 0.0);
    ASSERT_EQ(t.total, expected);
    EXPECT_LE(t.total, cfg.lambda_afford + cfg.lambda_close + cfg.lambda_qpos +
                           cfg.success_reward);
  }
}

TEST(CombineRewards, DoublingWeightDoublesContribution) {
  RewardConfig a, b;
  b.lambda_afford = 2 * a.lambda_afford;
  const RewardTerms ta = CombineRewards(0.7, 0.0, 0.0, false, a);
  const RewardTerms tb = CombineRewards(0.7, 0.0, 0.0, false, b);
  EXPECT_EQ(tb.total, 2 * ta.total);
}

TEST(RewardConfig, ParseAndValidate) {
  const RewardConfig cfg = ParseRewardConfig(Json{{"gamma", 2.0}, {"qpos_on", false}}, {});
  EXPECT_EQ(cfg.gamma, 2.0);
  EXPECT_FALSE(cfg.qpos_on);
  EXPECT_EQ(cfg.lambda_afford, 2.0);
  EXPECT_THROW(ParseRewardConfig(Json{{"gamma", 0.0}}, {}), InputError);
  EXPECT_THROW(ParseRewardConfig(Json{{"close_threshold", -1.0}}, {}), InputError);
  const RewardConfig back = ParseRewardConfig(RewardConfigToJson(cfg), {});
  EXPECT_EQ(back.gamma, cfg.gamma);
  EXPECT_EQ(back.qpos_on, cfg.qpos_on);
}

}  // namespace
}  // namespace fungrasp
