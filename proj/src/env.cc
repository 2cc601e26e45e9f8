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

#include "fungrasp/env.h"

#include <exception>
#include <utility>

#include "fungrasp/error.h"

namespace fungrasp {

GraspEnv::GraspEnv(GraspSetup setup) : setup_(std::move(setup)) {
  if (setup_.objects.empty()) throw InputError("grasp env: no objects");
  if (setup_.demo.q0().size() != setup_.spec.num_joints) {
    throw InputError("grasp env: demonstration has " +
                     std::to_string(setup_.demo.q0().size()) + " joints but hand '" +
                     setup_.spec.name + "' has " +
                     std::to_string(setup_.spec.num_joints));
  }
  space_ = MakeEditActionSpace(setup_.bounds, setup_.spec.num_joints);
  for (const SceneObject& o : setup_.objects) {
    clouds_.push_back(std::make_shared<const CloudInput>(
        MakeCloudInput(o.model, setup_.num_points, setup_.cloud_seed)));
  }
}

PolicyDims GraspEnv::dims() const {
  return PolicyDims{setup_.styles.size(), setup_.spec.num_joints, setup_.num_points};
}

void GraspEnv::Encode(Episode& ep) const {
  const auto k = static_cast<size_t>(ep.env.object_index);
  ep.obs = EncodeObservation(ep.env, setup_.objects[k].model, setup_.demo,
                             setup_.styles.size(), clouds_[k]);
}

void GraspEnv::Reset(Episode& ep, bool train_mode) const {
  ep.env = ResetEnv(setup_.objects, setup_.styles, setup_.spec, setup_.sim,
                    setup_.sigma_style, ep.rng, train_mode);
  Encode(ep);
}

void GraspEnv::SetStyle(Episode& ep, int style) const {
  ep.env.condition.style = style;
  ep.env.condition.q_style_used = setup_.styles.styles[static_cast<size_t>(style)].q;
  Encode(ep);
}

void GraspEnv::Step(const Episode& ep, const VecX& action, StepResult& out) const {
  const auto k = static_cast<size_t>(ep.env.object_index);
  const EditAction edit = ToEditAction(action, setup_.spec.num_joints);
  out.record = Rollout(ep.env, setup_.objects[k].model, setup_.demo, edit, setup_.spec,
                       setup_.styles, setup_.sim);
  out.record.reward_terms = TotalReward(out.record, setup_.reward);
  out.has_record = true;
  out.success = out.record.success;
  out.reward = out.record.reward_terms.total;
}

BanditEnv::BanditEnv(int num_joints, std::uint64_t seed) {
  dims_ = PolicyDims{1, num_joints, 8};
  space_ = UniformActionSpace(dims_.action_dim(), -1.0, 1.0);
  Rng rng = SplitRng(seed, {0xba4d17ull});
  target_.resize(dims_.action_dim());
  for (Eigen::Index i = 0; i < target_.size(); ++i) {
    target_[i] = UniformRange(rng, -0.5, 0.5);
  }
  CloudInput cloud(kPointInput, dims_.num_points);
  for (Eigen::Index j = 0; j < cloud.cols(); ++j) {
    for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
      cloud(i, j) = UniformRange(rng, -0.5, 0.5);
    }
  }
  cloud_ = std::make_shared<const CloudInput>(std::move(cloud));
}

void BanditEnv::Reset(Episode& ep, bool /*train_mode*/) const {
  ep.obs.state = VecX::Zero(dims_.state_dim());
  ep.obs.state[14 + 3] = 1.0;  // the single style
  ep.obs.cloud = cloud_;
}

void BanditEnv::Step(const Episode& /*ep*/, const VecX& action, StepResult& out) const {
  out.reward = -(action - target_).squaredNorm();
  out.success = out.reward > -0.05;
}

}  // namespace fungrasp
