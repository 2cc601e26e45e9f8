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

#include "fungrasp/policy.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "fungrasp/error.h"
#include "fungrasp/json_util.h"
#include "fungrasp/trainer.h"
#include "test_util.h"

namespace fungrasp {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

PolicyDims SmallDims() {
  PolicyDims d;
  d.num_styles = 3;
  d.num_joints = 6;
  d.num_points = 16;
  return d;
}

std::shared_ptr<const CloudInput> RandomCloud(Rng& rng, int m) {
  auto x = std::make_shared<CloudInput>(kPointInput, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < kPointInput; ++i) (*x)(i, j) = StandardNormal(rng);
  }
  return x;
}

Observation RandomObs(Rng& rng, const PolicyDims& d,
                      std::shared_ptr<const CloudInput> cloud = nullptr) {
  Observation o;
  o.state = VecX::Zero(d.state_dim());
  for (int i = 0; i < 17; ++i) o.state[i] = StandardNormal(rng);
  o.state[17 + UniformIndex(rng, d.num_styles)] = 1.0;
  o.state[17 + d.num_styles] = UniformRange(rng, 0.05, 0.3);
  o.cloud = cloud ? cloud : RandomCloud(rng, d.num_points);
  return o;
}

TEST(MakeCloudInput, ScaleNormalized) {
  const ObjectModel box = MakeBox("box", Vec3(0.1, 0.06, 0.04), 0.01);
  const CloudInput a = MakeCloudInput(box, 64, 7);
  // Power-of-two factors scale exactly, so FPS sees identical distance ties.
  for (double c : {0.5, 2.0, 4.0}) {
    const CloudInput b = MakeCloudInput(ScaleObject(box, c), 64, 7);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12) << "scale " << c;
  }
  EXPECT_THROW(MakeCloudInput(box, box.size() + 1, 7), InputError);
}

TEST(MakeCloudInput, ScaleNormalizedWithoutTies) {
  Rng rng(33);
  Eigen::Matrix3Xd pts(3, 200), nrm(3, 200);
  for (int i = 0; i < 200; ++i) {
    const Vec3 n = testing::RandomVec3(rng).normalized();
    pts.col(i) = 0.05 * n + Vec3(0.01, -0.02, 0.03);
    nrm.col(i) = n;
  }
  const ObjectModel obj = MakeObjectModel("blob", pts, nrm);
  const CloudInput a = MakeCloudInput(obj, 48, 3);
  const CloudInput b = MakeCloudInput(ScaleObject(obj, 2.5), 48, 3);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EncodeObservation, OneHotAndAffordanceOffset) {
  const HandSpec spec = testing::InspireSpec();
  const Demonstration demo = testing::InspireDemo(spec);
  const ObjectModel obj = MakeBox("box", Vec3(0.1, 0.06, 0.04), 0.01);
  EnvState env;
  env.condition.p_afford = obj.centroid;
  env.condition.style = 2;
  const Observation o = EncodeObservation(env, obj, demo, 4, nullptr);
  ASSERT_EQ(o.state.size(), 22);
  EXPECT_EQ(o.state.segment<3>(14).norm(), 0.0);
  EXPECT_EQ(o.state.segment(17, 4), StyleOneHot(2, 4));
  EXPECT_EQ(o.state.segment(17, 4).sum(), 1.0);
  EXPECT_EQ(o.state[21], obj.obj_bb);
  EXPECT_TRUE(o.state.allFinite());

  const ObjectModel big = ScaleObject(obj, 3.0);
  EnvState env2 = env;
  env.condition.p_afford = obj.points.col(10);
  env2.condition.p_afford = big.points.col(10);
  const Observation a = EncodeObservation(env, obj, demo, 4, nullptr);
  const Observation b = EncodeObservation(env2, big, demo, 4, nullptr);
  EXPECT_LT((a.state.segment<3>(14) - b.state.segment<3>(14)).norm(), 1e-12);
}

TEST(PolicyNet, ParameterLayout) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  std::size_t expected = 0;
  for (const LinearLayer& l : net.layers()) {
    EXPECT_EQ(l.offset, expected);
    expected += l.size();
  }
  EXPECT_EQ(net.log_std_offset(), expected);
  EXPECT_EQ(net.num_params(), expected + static_cast<std::size_t>(d.action_dim()));
  EXPECT_EQ(net.layers()[PolicyNet::kActorTrunk1].in, 7 + 7 + 64 + 3 + 3 + 1);
}

TEST(PolicyNet, LogStdClamped) {
  PolicyNet net(SmallDims());
  net.Initialize(1, -10.0);
  EXPECT_EQ(net.LogStd().minCoeff(), kLogStdMin);
  net.Initialize(1, 4.0);
  EXPECT_EQ(net.LogStd().maxCoeff(), kLogStdMax);
}

TEST(PolicyForward, ZeroHeadsGiveZeroOutputs) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(3, -1.0, /*zero_heads=*/true);
  Rng rng(4);
  std::vector<Observation> obs;
  for (int i = 0; i < 5; ++i) obs.push_back(RandomObs(rng, d));
  const PolicyOutput out = PolicyForward(net, obs);
  EXPECT_EQ(out.mean.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.value.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.log_std, VecX::Constant(d.action_dim(), -1.0));
}

TEST(PolicyForward, SmallInitialMean) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(5, -3.0);
  Rng rng(6);
  std::vector<Observation> obs{RandomObs(rng, d)};
  const PolicyOutput out = PolicyForward(net, obs);
  EXPECT_GT(out.mean.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(out.mean.cwiseAbs().maxCoeff(), 0.5);
}

TEST(PolicyForward, PointPermutationInvariant) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(7, -1.0);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Observation o = RandomObs(rng, d);
    std::vector<int> perm(static_cast<size_t>(d.num_points));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto shuffled = std::make_shared<CloudInput>(kPointInput, d.num_points);
    for (int j = 0; j < d.num_points; ++j) shuffled->col(j) = o.cloud->col(perm[j]);
    Observation p = o;
    p.cloud = shuffled;
    ForwardCache ca, cb;
    const PolicyOutput a = PolicyForward(net, std::span(&o, 1), &ca);
    const PolicyOutput b = PolicyForward(net, std::span(&p, 1), &cb);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.value, b.value);

    const Eigen::MatrixXd dm = Eigen::MatrixXd::Random(d.action_dim(), 1);
    const VecX dl = VecX::Random(d.action_dim());
    const VecX dv = VecX::Random(1);
    VecX ga, gb;
    PolicyBackward(net, ca, dm, dl, dv, ga);
    PolicyBackward(net, cb, dm, dl, dv, gb);
    EXPECT_LT((ga - gb).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PolicyForward, RejectsNonFiniteWithLayerName) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(9, -1.0);
  Rng rng(10);
  Observation o = RandomObs(rng, d);
  o.state[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    PolicyForward(net, std::span(&o, 1));
    FAIL() << "expected rejection";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("actor_trunk1"), std::string::npos) << e.what();
  }
}

Json OutputToJson(const PolicyOutput& out) {
  Json j;
  j["mean"] = std::vector<double>(out.mean.data(), out.mean.data() + out.mean.size());
  j["log_std"] = std::vector<double>(out.log_std.data(), out.log_std.data() + out.log_std.size());
  j["value"] = out.value[0];
  return j;
}

// Pinned against tests/data/policy_forward_golden.json. Regenerate with
// FUNGRASP_UPDATE_GOLDEN=1.
TEST(PolicyForward, MatchesGoldenOutput) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(2026, -0.5);
  Rng prng(11);
  for (Eigen::Index i = 0; i < net.params().size(); ++i) {
    net.params()[i] += 0.05 * StandardNormal(prng);
  }
  net.ClampLogStd();
  Rng rng(12);
  const Observation o = RandomObs(rng, d);
  const PolicyOutput out = PolicyForward(net, std::span(&o, 1));
  const std::string path = std::string(FUNGRASP_TEST_DATA_DIR) + "/policy_forward_golden.json";
  if (std::getenv("FUNGRASP_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path) << OutputToJson(out).dump(2) << "\n";
  }
  std::ifstream in(path);
  ASSERT_TRUE(in.good()) << path;
  const Json golden = Json::parse(in);
  const auto mean = golden.at("mean").get<std::vector<double>>();
  const auto log_std = golden.at("log_std").get<std::vector<double>>();
  ASSERT_EQ(static_cast<int>(mean.size()), d.action_dim());
  for (int i = 0; i < d.action_dim(); ++i) {
    EXPECT_NEAR(out.mean(i, 0), mean[static_cast<size_t>(i)], 1e-12);
    EXPECT_NEAR(out.log_std[i], log_std[static_cast<size_t>(i)], 1e-12);
  }
  EXPECT_NEAR(out.value[0], golden.at("value").get<double>(), 1e-12);
}

TEST(PolicyBackward, ZeroUpstreamGivesZeroGradient) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(13, -1.0);
  Rng rng(14);
  std::vector<Observation> obs{RandomObs(rng, d), RandomObs(rng, d)};
  ForwardCache cache;
  PolicyForward(net, obs, &cache);
  VecX grad;
  PolicyBackward(net, cache, Eigen::MatrixXd::Zero(d.action_dim(), 2),
                 VecX::Zero(d.action_dim()), VecX::Zero(2), grad);
  ASSERT_EQ(static_cast<std::size_t>(grad.size()), net.num_params());
  EXPECT_EQ(grad.cwiseAbs().maxCoeff(), 0.0);
}

// Matrix products of different batch widths may round differently, so the
// batch shape is held fixed and only the upstream gradient changes.
TEST(PolicyBackward, DuplicateRowDoublesContribution) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(15, -1.0);
  Rng rng(16);
  const Observation o = RandomObs(rng, d);
  const VecX dm = VecX::Random(d.action_dim());
  const double dv = 0.7;
  std::vector<Observation> two{o, o};
  ForwardCache cache;
  PolicyForward(net, two, &cache);

  Eigen::MatrixXd once = Eigen::MatrixXd::Zero(d.action_dim(), 2);
  once.col(0) = dm;
  Eigen::MatrixXd twice(d.action_dim(), 2);
  twice << dm, dm;
  VecX g1, g2;
  PolicyBackward(net, cache, once, VecX::Zero(d.action_dim()), VecX{{dv, 0.0}}, g1);
  PolicyBackward(net, cache, twice, VecX::Zero(d.action_dim()), VecX{{dv, dv}}, g2);
  EXPECT_GT(g1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g2, 2.0 * g1);
}

TEST(PolicyForward, BatchColumnsAreIndependent) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(29, -1.0);
  Rng rng(30);
  const Observation o = RandomObs(rng, d);
  std::vector<Observation> batch{RandomObs(rng, d), o, RandomObs(rng, d)};
  const PolicyOutput alone = PolicyForward(net, std::span(&o, 1));
  const PolicyOutput mixed = PolicyForward(net, batch);
  EXPECT_LT((alone.mean.col(0) - mixed.mean.col(1)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(alone.value[0], mixed.value[1], 1e-14);
}

TEST(PolicyBackward, MatchesFiniteDifferences) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(17, -1.0);
  Rng rng(18);
  // Shared clouds exercise the per-cloud caching in the batch.
  auto cloud = RandomCloud(rng, d.num_points);
  std::vector<Observation> obs{RandomObs(rng, d, cloud), RandomObs(rng, d),
                               RandomObs(rng, d, cloud)};
  const Eigen::MatrixXd wm = Eigen::MatrixXd::Random(d.action_dim(), 3);
  const VecX wl = VecX::Random(d.action_dim());
  const VecX wv = VecX::Random(3);
  auto loss = [&](const VecX& p) {
    PolicyNet n = net;
    n.params() = p;
    const PolicyOutput out = PolicyForward(n, obs);
    return (wm.array() * out.mean.array()).sum() + wl.dot(out.log_std) +
           wv.dot(out.value);
  };
  ForwardCache cache;
  PolicyForward(net, obs, &cache);
  VecX grad;
  PolicyBackward(net, cache, wm, wl, wv, grad);

  std::vector<std::size_t> idx;
  for (int i = 0; i < 300; ++i) {
    idx.push_back(static_cast<std::size_t>(UniformIndex(rng, static_cast<int>(net.num_params()))));
  }
  // Every layer gets at least its first weight and last bias checked.
  for (const LinearLayer& l : net.layers()) {
    idx.push_back(l.offset);
    idx.push_back(l.offset + l.size() - 1);
  }
  idx.push_back(net.log_std_offset());

  // Coordinates whose stencil flips a ReLU gate or pool route sit on a kink;
  // those are checked with a step small enough to stay on one side.
  constexpr double kH = 1e-5;
  int kinks = 0;
  for (std::size_t i : idx) {
    bool smooth = true;
    for (double step : {kH, -kH}) {
      PolicyNet n = net;
      n.params()[static_cast<Eigen::Index>(i)] += step;
      ForwardCache side;
      PolicyForward(n, obs, &side);
      smooth = smooth && SameActivationPattern(cache, side);
    }
    const double h = smooth ? kH : 1e-8;
    if (!smooth) ++kinks;
    EXPECT_LT(FiniteDiffCheck(loss, net.params(), grad, std::span(&i, 1), h),
              smooth ? 1e-4 : 1e-3)
        << "param " << i;
  }
  EXPECT_LT(kinks, static_cast<int>(idx.size()) / 10);
}

TEST(PolicyBackward, SameActivationPatternDetectsGateFlip) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(31, -1.0);
  Rng rng(32);
  std::vector<Observation> obs{RandomObs(rng, d)};
  ForwardCache a, b;
  PolicyForward(net, obs, &a);
  PolicyForward(net, obs, &b);
  EXPECT_TRUE(SameActivationPattern(a, b));
  // A large negative bias on the first trunk layer shuts every unit off.
  const LinearLayer& l = net.layers()[PolicyNet::kActorTrunk1];
  for (int k = 0; k < l.out; ++k) {
    net.params()[static_cast<Eigen::Index>(l.offset + static_cast<std::size_t>(l.in * l.out + k))] = -1e3;
  }
  PolicyForward(net, obs, &b);
  EXPECT_FALSE(SameActivationPattern(a, b));
}

TEST(PolicyBackward, GradientGate) {
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    const GradientCheckReport r = PolicyGradientCheck(seed, 200);
    EXPECT_EQ(r.num_checked, 200);
    EXPECT_LT(r.num_skipped, 20);
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
    EXPECT_TRUE(std::isfinite(r.max_rel_error));
  }
}

ActionSpace EditSpace() { return MakeEditActionSpace(ActionBounds{}, 6); }

TEST(Squash, BoundsAndRoundTrip) {
  const ActionSpace s = EditSpace();
  const double br = ActionBounds{}.b_r / std::sqrt(3.0);
  EXPECT_NEAR(s.hi[3], br, 1e-15);
  EXPECT_EQ(s.lo[12], ActionBounds{}.k_min);
  EXPECT_EQ(s.hi[12], ActionBounds{}.k_max);
  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    VecX raw(s.dim());
    for (int k = 0; k < s.dim(); ++k) raw[k] = std::clamp(StandardNormal(rng), -3.0, 3.0);
    const VecX a = Squash(s, raw);
    bool clamped = true;
    const VecX back = Unsquash(s, a, &clamped);
    EXPECT_FALSE(clamped);
    EXPECT_LT((back - raw).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_TRUE(WithinBounds(ToEditAction(a, 6), ActionBounds{}));
  }
}

TEST(Squash, BoundaryActionTakesInteriorPath) {
  const ActionSpace s = EditSpace();
  bool clamped = false;
  const VecX raw = Unsquash(s, s.hi, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_TRUE(raw.allFinite());
}

TEST(SampleAction, MillionDrawsStayInBounds) {
  const ActionSpace s = EditSpace();
  const ActionBounds b;
  Rng rng(20);
  const VecX log_std = VecX::Constant(s.dim(), kLogStdMax);
  for (int i = 0; i < 1000000; ++i) {
    VecX mean(s.dim());
    for (int k = 0; k < s.dim(); ++k) mean[k] = 3.0 * StandardNormal(rng);
    const ActionSample a = SampleAction(mean, log_std, s, rng);
    ASSERT_TRUE((a.action.array() >= s.lo.array()).all() &&
                (a.action.array() <= s.hi.array()).all());
    const EditAction e = ToEditAction(a.action, 6);
    ASSERT_LE(e.dr.v.norm(), b.b_r + 1e-12);
  }
}

TEST(SampleAction, RawMeanStatistics) {
  const ActionSpace s = EditSpace();
  Rng rng(21);
  VecX mean(s.dim()), log_std(s.dim());
  for (int k = 0; k < s.dim(); ++k) {
    mean[k] = 0.3 * StandardNormal(rng);
    log_std[k] = UniformRange(rng, -1.0, 0.5);
  }
  const int n = 100000;
  VecX sum = VecX::Zero(s.dim());
  for (int i = 0; i < n; ++i) sum += SampleAction(mean, log_std, s, rng).raw;
  const VecX emp = sum / n;
  for (int k = 0; k < s.dim(); ++k) {
    EXPECT_LT(std::abs(emp[k] - mean[k]), 3.0 * std::exp(log_std[k]) / std::sqrt(n));
  }
}

TEST(SampleAction, TinyStdIsDeterministicSquashedMean) {
  const ActionSpace s = EditSpace();
  Rng rng(22);
  const VecX mean = VecX::LinSpaced(s.dim(), -0.5, 0.5);
  const VecX log_std = VecX::Constant(s.dim(), -40.0);
  const ActionSample a = SampleAction(mean, log_std, s, rng);
  EXPECT_LT((a.action - Squash(s, mean)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ActionLogProb, MatchesSampledLogProb) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(23, -0.7);
  const ActionSpace s = EditSpace();
  Rng rng(24);
  for (int i = 0; i < 200; ++i) {
    const Observation o = RandomObs(rng, d);
    const PolicyOutput out = PolicyForward(net, std::span(&o, 1));
    const ActionSample a = SampleAction(out.mean.col(0), out.log_std, s, rng);
    EXPECT_NEAR(ActionLogProb(net, o, a.action, s), a.log_prob, 1e-9);
  }
}

TEST(ActionLogProb, ClosedFormAtSquashedMean) {
  const PolicyDims d = SmallDims();
  PolicyNet net(d);
  net.Initialize(25, 0.0, /*zero_heads=*/true);
  const ActionSpace s = EditSpace();
  Rng rng(26);
  const Observation o = RandomObs(rng, d);
  const VecX action = Squash(s, VecX::Zero(s.dim()));
  // raw = 0, sigma = 1: N(0; 0, 1) per dim, slope (hi - lo) / 2 per dim.
  double expected = -kHalfLog2Pi * s.dim();
  for (int k = 0; k < s.dim(); ++k) expected -= std::log(0.5 * (s.hi[k] - s.lo[k]));
  EXPECT_NEAR(ActionLogProb(net, o, action, s), expected, 1e-12);
}

TEST(SquashedLogProb, ClosedFormAtRandomMean) {
  const ActionSpace s = EditSpace();
  Rng rng(27);
  for (int i = 0; i < 100; ++i) {
    VecX mean(s.dim());
    for (int k = 0; k < s.dim(); ++k) mean[k] = StandardNormal(rng);
    double expected = -kHalfLog2Pi * s.dim();
    for (int k = 0; k < s.dim(); ++k) {
      const double t = std::tanh(mean[k]);
      expected -= std::log(0.5 * (s.hi[k] - s.lo[k]) * (1.0 - t * t));
    }
    EXPECT_NEAR(SquashedLogProb(mean, VecX::Zero(s.dim()), s, mean), expected, 1e-10);
  }
}

TEST(GaussianLogProb, UnimodalAndShiftInvariant) {
  Rng rng(28);
  for (int i = 0; i < 1000; ++i) {
    const int a = 5;
    VecX mean(a), log_std(a), dir(a);
    for (int k = 0; k < a; ++k) {
      mean[k] = StandardNormal(rng);
      log_std[k] = UniformRange(rng, -2, 1);
      dir[k] = StandardNormal(rng);
    }
    const double l1 = GaussianLogProb(mean, log_std, mean + 0.5 * dir);
    const double l2 = GaussianLogProb(mean, log_std, mean + 1.0 * dir);
    EXPECT_GT(GaussianLogProb(mean, log_std, mean), l1);
    EXPECT_GT(l1, l2);
    const VecX shift = VecX::Constant(a, UniformRange(rng, -3, 3));
    EXPECT_NEAR(GaussianLogProb(mean + shift, log_std, mean + dir + shift), l2, 1e-10);
  }
}

TEST(GaussianEntropy, ClosedForm) {
  const VecX log_std{{0.0, -1.0, 0.5}};
  EXPECT_NEAR(GaussianEntropy(log_std), 3 * (0.5 + kHalfLog2Pi) - 0.5, 1e-14);
}

}  // namespace
}  // namespace fungrasp
