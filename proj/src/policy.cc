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
#include <stdexcept>
#include <unordered_map>

#include <Eigen/QR>

#include "fungrasp/error.h"

namespace fungrasp {

CloudInput MakeCloudInput(const ObjectModel& obj, int num_points,
                          std::uint64_t seed) {
  if (num_points > obj.size()) {
    throw InputError("object '" + obj.name + "' has " + std::to_string(obj.size()) +
                     " points but the policy samples " + std::to_string(num_points));
  }
  const std::vector<int> idx = FarthestPointSample(obj.points, num_points, seed);
  CloudInput x(kPointInput, num_points);
  for (int m = 0; m < num_points; ++m) {
    const int i = idx[static_cast<size_t>(m)];
    x.block<3, 1>(0, m) = (obj.points.col(i) - obj.centroid) / obj.obj_bb;
    x.block<3, 1>(3, m) = obj.normals.col(i);
  }
  return x;
}

Observation EncodeObservation(const EnvState& env, const ObjectModel& obj,
                              const Demonstration& demo, int num_styles,
                              std::shared_ptr<const CloudInput> cloud) {
  Observation o;
  o.state.resize(18 + num_styles);
  const Pose s_r = ComposePose(env.object_pose, demo.frames.front().ee_in_object);
  o.state.segment<3>(0) = s_r.t;
  o.state.segment<4>(3) = s_r.r;
  o.state.segment<3>(7) = env.object_pose.t;
  o.state.segment<4>(10) = env.object_pose.r;
  o.state.segment<3>(14) = (env.condition.p_afford - obj.centroid) / obj.obj_bb;
  o.state.segment(17, num_styles) = StyleOneHot(env.condition.style, num_styles);
  o.state[17 + num_styles] = obj.obj_bb;
  o.cloud = std::move(cloud);
  return o;
}

PolicyNet::PolicyNet(const PolicyDims& dims) : dims_(dims) {
  if (dims.num_styles < 1 || dims.num_joints < 1 || dims.num_points < 1) {
    throw std::invalid_argument("policy: dimensions must be positive");
  }
  const int a = dims.action_dim();
  const int t = dims.trunk_input();
  const std::pair<const char*, std::pair<int, int>> shapes[kNumLayers] = {
      {"actor_point1", {kPointInput, kPointHidden}},
      {"actor_point2", {kPointHidden, kCloudFeature}},
      {"actor_trunk1", {t, kTrunkHidden}},
      {"actor_trunk2", {kTrunkHidden, kTrunkHidden}},
      {"actor_mean", {kTrunkHidden, a}},
      {"critic_point1", {kPointInput, kPointHidden}},
      {"critic_point2", {kPointHidden, kCloudFeature}},
      {"critic_trunk1", {t, kTrunkHidden}},
      {"critic_trunk2", {kTrunkHidden, kValueHidden}},
      {"critic_value", {kValueHidden, 1}},
  };
  std::size_t offset = 0;
  for (const auto& [name, io] : shapes) {
    LinearLayer l{name, io.first, io.second, offset};
    offset += l.size();
    layers_.push_back(l);
  }
  log_std_offset_ = offset;
  params_ = VecX::Zero(static_cast<Eigen::Index>(offset) + a);
}

Eigen::Map<const Eigen::MatrixXd> PolicyNet::Weights(Layer l) const {
  const LinearLayer& L = layers_[l];
  return {params_.data() + L.offset, L.out, L.in};
}

Eigen::Map<const VecX> PolicyNet::Bias(Layer l) const {
  const LinearLayer& L = layers_[l];
  return {params_.data() + L.offset + static_cast<std::size_t>(L.out) * L.in, L.out};
}

VecX PolicyNet::LogStd() const {
  return params_.segment(static_cast<Eigen::Index>(log_std_offset_), dims_.action_dim())
      .cwiseMax(kLogStdMin)
      .cwiseMin(kLogStdMax);
}

void PolicyNet::ClampLogStd() {
  auto ls = params_.segment(static_cast<Eigen::Index>(log_std_offset_), dims_.action_dim());
  ls = ls.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

namespace {

Eigen::MatrixXd Orthogonal(int rows, int cols, double gain, Rng& rng) {
  const bool tall = rows >= cols;
  Eigen::MatrixXd g(tall ? rows : cols, tall ? cols : rows);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = StandardNormal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return gain * (tall ? q : Eigen::MatrixXd(q.transpose()));
}

}  // namespace

void PolicyNet::Initialize(std::uint64_t seed, double init_log_std, bool zero_heads) {
  params_.setZero();
  for (int l = 0; l < kNumLayers; ++l) {
    const LinearLayer& L = layers_[static_cast<size_t>(l)];
    double gain = std::sqrt(2.0);
    if (l == kActorMean) gain = 0.01;
    if (l == kCriticValue) gain = 1.0;
    if (zero_heads && (l == kActorMean || l == kCriticValue)) continue;
    Rng rng = SplitRng(seed, {static_cast<std::uint64_t>(l)});
    Eigen::Map<Eigen::MatrixXd>(params_.data() + L.offset, L.out, L.in) =
        Orthogonal(L.out, L.in, gain, rng);
  }
  params_.segment(static_cast<Eigen::Index>(log_std_offset_), dims_.action_dim())
      .setConstant(init_log_std);
  ClampLogStd();
}

namespace {

void CheckFinite(const Eigen::MatrixXd& m, const LinearLayer& layer) {
  if (!m.allFinite()) {
    throw std::runtime_error("policy forward: non-finite activation in layer '" +
                             layer.name + "'");
  }
}

Eigen::MatrixXd Affine(const PolicyNet& net, PolicyNet::Layer l,
                       const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y = net.Weights(l) * x;
  y.colwise() += net.Bias(l);
  CheckFinite(y, net.layers()[l]);
  return y;
}

void Relu(Eigen::MatrixXd& m) { m = m.cwiseMax(0.0); }

PointBranchCache PointForward(const PolicyNet& net, PolicyNet::Layer first,
                              const CloudInput& x) {
  PointBranchCache c;
  c.h1 = Affine(net, first, x);
  Relu(c.h1);
  c.h2 = Affine(net, static_cast<PolicyNet::Layer>(first + 1), c.h1);
  Relu(c.h2);
  c.pooled.resize(kCloudFeature);
  c.argmax.assign(kCloudFeature, 0);
  for (int ch = 0; ch < kCloudFeature; ++ch) {
    double best = c.h2(ch, 0);
    int arg = 0;
    for (Eigen::Index m = 1; m < c.h2.cols(); ++m) {
      if (c.h2(ch, m) > best) {
        best = c.h2(ch, m);
        arg = static_cast<int>(m);
      }
    }
    c.pooled[ch] = best;
    c.argmax[static_cast<size_t>(ch)] = arg;
  }
  return c;
}

// Trunk input column: [s_r, s_o, cloud feature, p_afford_rel, style, obj_bb].
void AssembleInput(const VecX& state, const VecX& feature, Eigen::Ref<VecX> out) {
  const Eigen::Index tail = state.size() - 14;
  out.head(14) = state.head(14);
  out.segment(14, kCloudFeature) = feature;
  out.tail(tail) = state.tail(tail);
}

}  // namespace

PolicyOutput PolicyForward(const PolicyNet& net, std::span<const Observation> obs,
                           ForwardCache* cache) {
  const PolicyDims& d = net.dims();
  const int b = static_cast<int>(obs.size());
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c = ForwardCache{};
  std::unordered_map<const CloudInput*, int> seen;
  c.cloud_of.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const Observation& o = obs[static_cast<size_t>(i)];
    if (o.state.size() != d.state_dim() || o.cloud == nullptr ||
        o.cloud->rows() != kPointInput || o.cloud->cols() < 1) {
      throw std::invalid_argument("policy forward: observation " + std::to_string(i) +
                                  " does not match the network dimensions");
    }
    auto [it, inserted] = seen.emplace(o.cloud.get(), static_cast<int>(c.clouds.size()));
    if (inserted) c.clouds.push_back(o.cloud.get());
    c.cloud_of[static_cast<size_t>(i)] = it->second;
  }
  for (const CloudInput* x : c.clouds) {
    c.actor_points.push_back(PointForward(net, PolicyNet::kActorPoint1, *x));
    c.critic_points.push_back(PointForward(net, PolicyNet::kCriticPoint1, *x));
  }
  c.actor_in.resize(d.trunk_input(), b);
  c.critic_in.resize(d.trunk_input(), b);
  for (int i = 0; i < b; ++i) {
    const int k = c.cloud_of[static_cast<size_t>(i)];
    const VecX& s = obs[static_cast<size_t>(i)].state;
    AssembleInput(s, c.actor_points[static_cast<size_t>(k)].pooled, c.actor_in.col(i));
    AssembleInput(s, c.critic_points[static_cast<size_t>(k)].pooled, c.critic_in.col(i));
  }
  PolicyOutput out;
  c.actor_h1 = Affine(net, PolicyNet::kActorTrunk1, c.actor_in);
  Relu(c.actor_h1);
  c.actor_h2 = Affine(net, PolicyNet::kActorTrunk2, c.actor_h1);
  Relu(c.actor_h2);
  out.mean = Affine(net, PolicyNet::kActorMean, c.actor_h2);
  c.critic_h1 = Affine(net, PolicyNet::kCriticTrunk1, c.critic_in);
  Relu(c.critic_h1);
  c.critic_h2 = Affine(net, PolicyNet::kCriticTrunk2, c.critic_h1);
  Relu(c.critic_h2);
  out.value = Affine(net, PolicyNet::kCriticValue, c.critic_h2).row(0).transpose();
  out.log_std = net.LogStd();
  return out;
}

namespace {

bool SameGates(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         ((a.array() > 0.0) == (b.array() > 0.0)).all();
}

bool SamePointBranch(const std::vector<PointBranchCache>& a,
                     const std::vector<PointBranchCache>& b) {
  if (a.size() != b.size()) return false;
  for (size_t k = 0; k < a.size(); ++k) {
    if (!SameGates(a[k].h1, b[k].h1) || !SameGates(a[k].h2, b[k].h2) ||
        a[k].argmax != b[k].argmax) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool SameActivationPattern(const ForwardCache& a, const ForwardCache& b) {
  return a.cloud_of == b.cloud_of && SamePointBranch(a.actor_points, b.actor_points) &&
         SamePointBranch(a.critic_points, b.critic_points) &&
         SameGates(a.actor_h1, b.actor_h1) && SameGates(a.actor_h2, b.actor_h2) &&
         SameGates(a.critic_h1, b.critic_h1) && SameGates(a.critic_h2, b.critic_h2);
}

namespace {

// Accumulates dW, db for y = W x + b and returns dx = W^T dy.
Eigen::MatrixXd AffineBackward(const PolicyNet& net, PolicyNet::Layer l,
                               const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy,
                               VecX& grad) {
  const LinearLayer& L = net.layers()[l];
  Eigen::Map<Eigen::MatrixXd> dw(grad.data() + L.offset, L.out, L.in);
  Eigen::Map<VecX> db(grad.data() + L.offset + static_cast<std::size_t>(L.out) * L.in,
                      L.out);
  dw.noalias() += dy * x.transpose();
  db += dy.rowwise().sum();
  return net.Weights(l).transpose() * dy;
}

// Gate by the ReLU output: zero where the unit was inactive.
void ReluBackward(const Eigen::MatrixXd& h, Eigen::MatrixXd& dh) {
  dh = (h.array() > 0.0).select(dh, 0.0);
}

void PointBackward(const PolicyNet& net, PolicyNet::Layer first, const CloudInput& x,
                   const PointBranchCache& c, Eigen::MatrixXd d_h2, VecX& grad) {
  ReluBackward(c.h2, d_h2);
  Eigen::MatrixXd d_h1 =
      AffineBackward(net, static_cast<PolicyNet::Layer>(first + 1), c.h1, d_h2, grad);
  ReluBackward(c.h1, d_h1);
  AffineBackward(net, first, x, d_h1, grad);
}

}  // namespace

void PolicyBackward(const PolicyNet& net, const ForwardCache& c,
                    const Eigen::MatrixXd& d_mean, const VecX& d_log_std,
                    const VecX& d_value, VecX& grad) {
  const PolicyDims& d = net.dims();
  grad = VecX::Zero(static_cast<Eigen::Index>(net.num_params()));
  const Eigen::Index b = c.actor_in.cols();

  // Actor.
  Eigen::MatrixXd dh2 = AffineBackward(net, PolicyNet::kActorMean, c.actor_h2, d_mean, grad);
  ReluBackward(c.actor_h2, dh2);
  Eigen::MatrixXd dh1 = AffineBackward(net, PolicyNet::kActorTrunk2, c.actor_h1, dh2, grad);
  ReluBackward(c.actor_h1, dh1);
  const Eigen::MatrixXd d_actor_in =
      AffineBackward(net, PolicyNet::kActorTrunk1, c.actor_in, dh1, grad);

  // Critic.
  const Eigen::MatrixXd dv = d_value.transpose();
  Eigen::MatrixXd ch2 = AffineBackward(net, PolicyNet::kCriticValue, c.critic_h2, dv, grad);
  ReluBackward(c.critic_h2, ch2);
  Eigen::MatrixXd ch1 = AffineBackward(net, PolicyNet::kCriticTrunk2, c.critic_h1, ch2, grad);
  ReluBackward(c.critic_h1, ch1);
  const Eigen::MatrixXd d_critic_in =
      AffineBackward(net, PolicyNet::kCriticTrunk1, c.critic_in, ch1, grad);

  // Max-pool routing: each channel's gradient goes to its argmax point only.
  const size_t nc = c.clouds.size();
  std::vector<Eigen::MatrixXd> actor_dh2(nc), critic_dh2(nc);
  for (size_t k = 0; k < nc; ++k) {
    actor_dh2[k] = Eigen::MatrixXd::Zero(kCloudFeature, c.clouds[k]->cols());
    critic_dh2[k] = Eigen::MatrixXd::Zero(kCloudFeature, c.clouds[k]->cols());
  }
  for (Eigen::Index i = 0; i < b; ++i) {
    const size_t k = static_cast<size_t>(c.cloud_of[static_cast<size_t>(i)]);
    for (int ch = 0; ch < kCloudFeature; ++ch) {
      actor_dh2[k](ch, c.actor_points[k].argmax[static_cast<size_t>(ch)]) +=
          d_actor_in(14 + ch, i);
      critic_dh2[k](ch, c.critic_points[k].argmax[static_cast<size_t>(ch)]) +=
          d_critic_in(14 + ch, i);
    }
  }
  for (size_t k = 0; k < nc; ++k) {
    PointBackward(net, PolicyNet::kActorPoint1, *c.clouds[k], c.actor_points[k],
                  std::move(actor_dh2[k]), grad);
    PointBackward(net, PolicyNet::kCriticPoint1, *c.clouds[k], c.critic_points[k],
                  std::move(critic_dh2[k]), grad);
  }

  // log-std: the clamp passes gradient only inside [min, max].
  const VecX raw = net.params().segment(static_cast<Eigen::Index>(net.log_std_offset()),
                                        d.action_dim());
  for (int a = 0; a < d.action_dim(); ++a) {
    const bool inside = raw[a] > kLogStdMin && raw[a] < kLogStdMax;
    grad[static_cast<Eigen::Index>(net.log_std_offset()) + a] = inside ? d_log_std[a] : 0.0;
  }
}

ActionSpace MakeEditActionSpace(const ActionBounds& bounds, int num_joints) {
  ActionSpace s;
  const int a = 7 + num_joints;
  s.lo.resize(a);
  s.hi.resize(a);
  const double r = bounds.b_r / std::sqrt(3.0);
  s.lo << Vec3::Constant(-bounds.b_t), Vec3::Constant(-r),
      VecX::Constant(num_joints, -bounds.b_q), bounds.k_min;
  s.hi << Vec3::Constant(bounds.b_t), Vec3::Constant(r),
      VecX::Constant(num_joints, bounds.b_q), bounds.k_max;
  return s;
}

ActionSpace UniformActionSpace(int dim, double lo, double hi) {
  return ActionSpace{VecX::Constant(dim, lo), VecX::Constant(dim, hi)};
}

VecX Squash(const ActionSpace& space, const VecX& raw) {
  const VecX y = raw.array().tanh();
  return space.lo.array() + 0.5 * (space.hi - space.lo).array() * (y.array() + 1.0);
}

VecX Unsquash(const ActionSpace& space, const VecX& action, bool* clamped) {
  constexpr double kInterior = 1e-6;
  VecX raw(action.size());
  bool any = false;
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    double y = 2.0 * (action[i] - space.lo[i]) / (space.hi[i] - space.lo[i]) - 1.0;
    if (std::abs(y) > 1.0 - kInterior) {
      y = std::copysign(1.0 - kInterior, y);
      any = true;
    }
    raw[i] = std::atanh(y);
  }
  if (clamped != nullptr) *clamped = any;
  return raw;
}

EditAction ToEditAction(const VecX& a, int num_joints) {
  EditAction e;
  e.dt = a.segment<3>(0);
  e.dr.v = a.segment<3>(3);
  e.dq = a.segment(6, num_joints);
  e.k = a[6 + num_joints];
  return e;
}

VecX FromEditAction(const EditAction& e) {
  VecX a(7 + e.dq.size());
  a << e.dt, e.dr.v, e.dq, e.k;
  return a;
}

double GaussianLogProb(const VecX& mean, const VecX& log_std, const VecX& raw) {
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double z = (raw[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

double SquashLogJacobian(const ActionSpace& space, const VecX& raw) {
  // log(1 - tanh(u)^2) = 2 (log 2 - |u| - log1p(exp(-2|u|))).
  double s = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double u = std::abs(raw[i]);
    s += std::log(0.5 * (space.hi[i] - space.lo[i])) +
         2.0 * (M_LN2 - u - std::log1p(std::exp(-2.0 * u)));
  }
  return s;
}

double SquashedLogProb(const VecX& mean, const VecX& log_std,
                       const ActionSpace& space, const VecX& raw) {
  return GaussianLogProb(mean, log_std, raw) - SquashLogJacobian(space, raw);
}

double GaussianEntropy(const VecX& log_std) {
  constexpr double kHalfLog2PiE = 1.41893853320467274178;
  return (log_std.array() + kHalfLog2PiE).sum();
}

ActionSample SampleAction(const VecX& mean, const VecX& log_std,
                          const ActionSpace& space, Rng& rng) {
  ActionSample s;
  s.raw.resize(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    s.raw[i] = mean[i] + std::exp(log_std[i]) * StandardNormal(rng);
  }
  s.action = Squash(space, s.raw);
  s.log_prob = SquashedLogProb(mean, log_std, space, s.raw);
  return s;
}

double ActionLogProb(const PolicyNet& net, const Observation& obs,
                     const VecX& action, const ActionSpace& space, bool* clamped) {
  const PolicyOutput out = PolicyForward(net, std::span<const Observation>(&obs, 1));
  const VecX raw = Unsquash(space, action, clamped);
  return SquashedLogProb(out.mean.col(0), out.log_std, space, raw);
}

}  // namespace fungrasp
