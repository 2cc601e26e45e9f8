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

#include "fungrasp/evaluator.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fungrasp/error.h"
#include "fungrasp/kernels.h"
#include "test_util.h"

namespace fungrasp {
namespace {

EpisodeResult Synthetic(bool success, double d_final, int style, int executed, VecX q) {
  EpisodeResult e;
  e.success = success;
  e.d_final = d_final;
  e.style = style;
  e.executed_style = executed;
  e.strict_success = success && d_final < kStrictAffordRadius && executed == style;
  e.q_final = std::move(q);
  return e;
}

TEST(PairwiseStyleDiversity, KnownValues) {
  const VecX a{{0.3, -0.2}};
  std::vector<VecX> same{a, a, a};
  EXPECT_EQ(PairwiseStyleDiversity(same), 0.0);
  std::vector<VecX> two{VecX{{0.0, 0.0}}, VecX{{2.0, 0.0}}};
  EXPECT_EQ(PairwiseStyleDiversity(two), 2.0);
  // Pairwise distances 3, 4, 5.
  std::vector<VecX> three{VecX{{0.0, 0.0}}, VecX{{3.0, 0.0}}, VecX{{0.0, 4.0}}};
  EXPECT_DOUBLE_EQ(PairwiseStyleDiversity(three), 4.0);
  std::vector<VecX> one{a};
  EXPECT_EQ(PairwiseStyleDiversity(one), 0.0);
  EXPECT_EQ(PairwiseStyleDiversity({}), 0.0);
}

TEST(PairwiseStyleDiversity, TranslationInvariantAndBruteForce) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<VecX> q, shifted;
    VecX shift(6);
    for (int k = 0; k < 6; ++k) shift[k] = StandardNormal(rng);
    const int n = 2 + UniformIndex(rng, 10);
    for (int i = 0; i < n; ++i) {
      VecX v(6);
      for (int k = 0; k < 6; ++k) v[k] = StandardNormal(rng);
      q.push_back(v);
      shifted.push_back(v + shift);
    }
    double sum = 0.0;
    int pairs = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        sum += std::sqrt((q[i] - q[j]).array().square().sum());
        ++pairs;
      }
    }
    EXPECT_NEAR(PairwiseStyleDiversity(q), sum / pairs, 1e-12);
    EXPECT_NEAR(PairwiseStyleDiversity(shifted), PairwiseStyleDiversity(q), 1e-12);
  }
}

TEST(ComputeMetrics, CountsOnlySuccesses) {
  const HandSpec spec = testing::InspireSpec();
  const VecX q0 = VecX::Zero(6);
  VecX q1 = q0;
  q1[2] = 0.5;
  std::vector<EpisodeResult> eps{
      Synthetic(true, 0.01, 0, 0, q0), Synthetic(true, 0.05, 1, 2, q1),
      Synthetic(false, 0.002, 1, 1, q0), Synthetic(true, 0.03, 2, 2, q1)};
  const Metrics m = ComputeMetrics(eps, spec, false);
  EXPECT_EQ(m.n_episodes, 4);
  EXPECT_EQ(m.n_success, 3);
  EXPECT_DOUBLE_EQ(m.gsr, 0.75);
  EXPECT_NEAR(*m.sad, (0.01 + 0.05 + 0.03) / 3, 1e-15);
  EXPECT_DOUBLE_EQ(*m.sa, 2.0 / 3.0);
  EXPECT_NEAR(m.sd, (0.5 + 0.0 + 0.5) / 3, 1e-15);
  EXPECT_DOUBLE_EQ(m.strict_gsr, 0.5);
  EXPECT_FALSE(m.sd_ratio.has_value());
  EXPECT_NEAR(*ComputeMetrics(eps, spec, false, 0.5).sd_ratio, m.sd / 0.5, 1e-15);

  const Metrics s = ComputeMetrics(eps, spec, true);
  EXPECT_TRUE(s.strict);
  EXPECT_EQ(s.n_success, 2);
  EXPECT_DOUBLE_EQ(*s.sa, 1.0);
}

TEST(ComputeMetrics, NoSuccessGivesNullDistances) {
  const HandSpec spec = testing::InspireSpec();
  std::vector<EpisodeResult> eps{Synthetic(false, 0.5, 0, 1, VecX::Zero(6))};
  const Metrics m = ComputeMetrics(eps, spec, false);
  EXPECT_EQ(m.gsr, 0.0);
  EXPECT_FALSE(m.sad.has_value());
  EXPECT_FALSE(m.sa.has_value());
  const Json j = MetricsToJson(m);
  EXPECT_TRUE(j.at("sad").is_null());
  EXPECT_TRUE(j.at("sa").is_null());
}

// Box only, object pinned at the demonstration pose, the demo's own style.
GraspSetup ReplayFixture() {
  GraspSetup g = testing::ToySetup();
  g.objects.resize(1);
  g.sim.square_half_width = 0.0;
  g.styles.styles.resize(1);
  return g;
}

VecX IdentityAction(int num_joints) {
  return FromEditAction(EditAction::Identity(num_joints));
}

TEST(Evaluate, IdentityReplayOnFixtureSucceeds) {
  const GraspEnv env(ReplayFixture());
  EvalOptions opt;
  opt.episodes = 20;
  opt.seed = 3;
  const EvalReport r = EvaluateFixedAction(env, IdentityAction(6), opt);
  EXPECT_EQ(r.metrics.gsr, 1.0);
  EXPECT_DOUBLE_EQ(*r.metrics.sa, 1.0);
  ASSERT_EQ(r.episodes.size(), 20u);
  for (const EpisodeResult& e : r.episodes) EXPECT_EQ(e.object, "box");
}

TEST(Evaluate, ZeroHeadPolicyReplaysTheDemo) {
  const GraspEnv env(ReplayFixture());
  PolicyNet net(env.dims());
  net.Initialize(5, -3.0, /*zero_heads=*/true);
  EvalOptions opt;
  opt.episodes = 10;
  const EvalReport r = Evaluate(net, env, opt);
  // A zero mean squashes to the box centre, which for k is (k_min + k_max) / 2 = 1.
  for (const EpisodeResult& e : r.episodes) {
    EXPECT_LT((e.action - IdentityAction(6)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(r.metrics.gsr, 1.0);
}

TEST(Evaluate, FarWristFails) {
  const GraspEnv env(testing::ToySetup());
  EditAction far = EditAction::Identity(6);
  far.dt = Vec3(0.0, 0.0, 1.0);
  EvalOptions opt;
  opt.episodes = 30;
  const EvalReport r = EvaluateFixedAction(env, FromEditAction(far), opt);
  EXPECT_EQ(r.metrics.gsr, 0.0);
  EXPECT_FALSE(r.metrics.sad.has_value());
  for (const EpisodeResult& e : r.episodes) EXPECT_FALSE(e.failure_reason.empty());
}

TEST(Evaluate, DeterministicAndWorkerIndependent) {
  const GraspEnv env(testing::ToySetup());
  PolicyNet net(env.dims());
  net.Initialize(6, -3.0);
  EvalOptions opt;
  opt.episodes = 24;
  opt.seed = 8;
  opt.serial_reference = true;
  const EvalReport ref = Evaluate(net, env, opt);
  opt.serial_reference = false;
  for (int workers : {1, 3}) {
    opt.workers = workers;
    const EvalReport r = Evaluate(net, env, opt);
    ASSERT_EQ(r.episodes.size(), ref.episodes.size());
    for (size_t i = 0; i < r.episodes.size(); ++i) {
      EXPECT_EQ(r.episodes[i].d_final, ref.episodes[i].d_final);
      EXPECT_EQ(r.episodes[i].action, ref.episodes[i].action);
      EXPECT_EQ(r.episodes[i].success, ref.episodes[i].success);
    }
    EXPECT_EQ(MetricsToJson(r.metrics), MetricsToJson(ref.metrics));
  }
  opt.seed = 9;
  EXPECT_NE(Evaluate(net, env, opt).episodes[0].object_pose.t, ref.episodes[0].object_pose.t);
}

TEST(Evaluate, RejectsEmptyRuns) {
  const GraspEnv env(testing::ToySetup());
  EvalOptions opt;
  opt.episodes = 0;
  EXPECT_THROW(RandomBaseline(env, opt), InputError);
  GraspSetup empty = testing::ToySetup();
  empty.objects.clear();
  EXPECT_THROW(GraspEnv{std::move(empty)}, InputError);
}

TEST(Evaluate, ExhaustiveStylesPrefersConditionedStyle) {
  GraspSetup g = testing::ToySetup();
  g.objects.resize(1);
  g.sim.square_half_width = 0.0;
  const GraspEnv env(std::move(g));
  EvalOptions opt;
  opt.episodes = 16;
  opt.seed = 2;
  const EvalReport plain = EvaluateFixedAction(env, IdentityAction(6), opt);
  opt.exhaustive_styles = true;
  const EvalReport best = EvaluateFixedAction(env, IdentityAction(6), opt);
  EXPECT_GE(best.metrics.gsr, plain.metrics.gsr);
  EXPECT_EQ(best.metrics.gsr, 1.0);
  for (size_t i = 0; i < best.episodes.size(); ++i) {
    EXPECT_EQ(best.episodes[i].styles_tried, env.setup().styles.size());
    if (plain.episodes[i].success) {
      EXPECT_EQ(best.episodes[i].style, plain.episodes[i].style);
    }
  }
}

TEST(Evaluate, StrictSuccessIsComposite) {
  const GraspEnv env(testing::ToySetup());
  EvalOptions opt;
  opt.episodes = 40;
  opt.strict_success = true;
  const EvalReport r = EvaluateFixedAction(env, IdentityAction(6), opt);
  EXPECT_TRUE(r.metrics.strict);
  for (const EpisodeResult& e : r.episodes) {
    EXPECT_EQ(e.strict_success,
              e.success && e.d_final < kStrictAffordRadius && e.executed_style == e.style);
  }
  EXPECT_LE(r.metrics.gsr, ComputeMetrics(r.episodes, env.setup().spec, false).gsr);
}

TEST(RandomBaseline, ZeroBoundsEqualIdentityReplay) {
  GraspSetup g = testing::ToySetup();
  g.bounds = ActionBounds{0.0, 0.0, 0.0, 1.0, 1.0};
  const GraspEnv env(std::move(g));
  EvalOptions opt;
  opt.episodes = 30;
  opt.seed = 4;
  const EvalReport random = RandomBaseline(env, opt);
  const EvalReport identity = EvaluateFixedAction(env, IdentityAction(6), opt);
  EXPECT_EQ(MetricsToJson(random.metrics), MetricsToJson(identity.metrics));
  for (size_t i = 0; i < random.episodes.size(); ++i) {
    EXPECT_EQ(random.episodes[i].d_final, identity.episodes[i].d_final);
  }
}

TEST(RandomBaseline, ReproducibleAndInBounds) {
  const GraspEnv env(testing::ToySetup());
  EvalOptions opt;
  opt.episodes = 30;
  opt.seed = 5;
  const EvalReport a = RandomBaseline(env, opt);
  const EvalReport b = RandomBaseline(env, opt);
  for (size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].action, b.episodes[i].action);
    EXPECT_TRUE(WithinBounds(ToEditAction(a.episodes[i].action, 6), env.setup().bounds));
  }
}

TEST(Ablation, ComponentNames) {
  for (const char* name : {"afford", "clip", "close", "qpos", "disturbance"}) {
    EXPECT_EQ(AblationComponentName(ParseAblationComponent(name)), name);
  }
  EXPECT_THROW(ParseAblationComponent("style"), InputError);
  EXPECT_THROW(ParseAblationComponent(""), InputError);
}

TEST(Ablation, SetupFlags) {
  const GraspSetup base = testing::ToySetup();
  EXPECT_FALSE(AblateSetup(base, AblationComponent::kAfford).reward.afford_on);
  EXPECT_FALSE(AblateSetup(base, AblationComponent::kClip).reward.clip_on);
  EXPECT_FALSE(AblateSetup(base, AblationComponent::kClose).reward.close_on);
  EXPECT_FALSE(AblateSetup(base, AblationComponent::kQpos).reward.qpos_on);
  EXPECT_EQ(AblateSetup(base, AblationComponent::kDisturbance).sigma_style, 0.0);
  const GraspSetup clip = AblateSetup(base, AblationComponent::kClip);
  EXPECT_EQ(AffordRadius(0.02, clip.reward), 0.10);
}

TEST(Ablation, QposTermExcludedFromRewards) {
  const GraspEnv env(AblateSetup(testing::ToySetup(), AblationComponent::kQpos));
  auto eps = ResetBatch(env, 1, 0, 10, true, 1);
  for (const Episode& ep : eps) {
    StepResult r;
    env.Step(ep, IdentityAction(6), r);
    const RewardTerms& t = r.record.reward_terms;
    const RewardConfig& c = env.setup().reward;
    EXPECT_EQ(t.total, c.lambda_afford * t.r_afford + c.lambda_close * t.r_close + 0.0 +
                           t.r_success);
  }
}

TEST(Ablation, NoDisturbanceUsesCanonicalJoints) {
  const GraspEnv env(AblateSetup(testing::ToySetup(), AblationComponent::kDisturbance));
  for (const Episode& ep : ResetBatch(env, 2, 0, 50, true, 1)) {
    EXPECT_EQ(ep.env.condition.q_style_used,
              env.setup().styles.styles[static_cast<size_t>(ep.env.condition.style)].q);
  }
  const GraspEnv full(testing::ToySetup());
  int disturbed = 0;
  for (const Episode& ep : ResetBatch(full, 2, 0, 50, true, 1)) {
    disturbed += ep.env.condition.q_style_used !=
                 full.setup().styles.styles[static_cast<size_t>(ep.env.condition.style)].q;
  }
  EXPECT_EQ(disturbed, 50);
}

TEST(Ablation, RunReportsBothArmsAndDeltas) {
  TrainConfig cfg;
  cfg.envs_per_iter = 16;
  cfg.minibatch = 16;
  cfg.epochs = 1;
  cfg.iterations = 2;
  cfg.init_log_std = -3.0;
  cfg.seed = 3;
  EvalOptions opt;
  opt.episodes = 12;
  const AblationResult r =
      AblationRun(testing::ToySetup(), cfg, AblationComponent::kClose, opt, 1);
  EXPECT_EQ(r.component, "close");
  EXPECT_EQ(r.full.n_episodes, 12);
  EXPECT_EQ(r.ablated.n_episodes, 12);
  const Json j = AblationResultToJson(r);
  EXPECT_DOUBLE_EQ(j.at("delta").at("gsr").get<double>(), r.ablated.gsr - r.full.gsr);
  EXPECT_DOUBLE_EQ(j.at("delta").at("sd").get<double>(), r.ablated.sd - r.full.sd);

  // The full arm matches a standalone train + evaluate with the same seed.
  const GraspEnv env(testing::ToySetup());
  const Metrics full = Evaluate(Train(env, cfg, {}, 1), env, opt).metrics;
  EXPECT_EQ(MetricsToJson(full), MetricsToJson(r.full));
}

}  // namespace
}  // namespace fungrasp
