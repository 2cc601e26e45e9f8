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

#ifndef FUNGRASP_ENV_H_
#define FUNGRASP_ENV_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fungrasp/demo.h"
#include "fungrasp/grasp_sim.h"
#include "fungrasp/hand.h"
#include "fungrasp/policy.h"
#include "fungrasp/reward.h"
#include "fungrasp/rng.h"

namespace fungrasp {

struct Episode {
  int index = 0;
  EnvState env;
  Observation obs;
  Rng rng;  // seeded per episode, continues from reset into sampling
};

struct StepResult {
  VecX raw;
  VecX action;
  double log_prob = 0.0;
  double reward = 0.0;
  bool success = false;
  bool error = false;
  std::string diagnostic;
  bool has_record = false;
  RolloutRecord record;
};

// A one-step episodic task: reset draws a condition, the policy acts once,
// and the step returns a single reward.
class OneStepEnv {
 public:
  virtual ~OneStepEnv() = default;
  virtual PolicyDims dims() const = 0;
  virtual const ActionSpace& action_space() const = 0;
  virtual void Reset(Episode& ep, bool train_mode) const = 0;
  virtual void Step(const Episode& ep, const VecX& action, StepResult& out) const = 0;
};

struct GraspSetup {
  HandSpec spec;
  StyleSet styles;
  Demonstration demo;
  std::vector<SceneObject> objects;
  SimConfig sim;
  RewardConfig reward;
  ActionBounds bounds;
  double sigma_style = 0.05;
  int num_points = 128;
  std::uint64_t cloud_seed = 0;
};

class GraspEnv : public OneStepEnv {
 public:
  explicit GraspEnv(GraspSetup setup);

  PolicyDims dims() const override;
  const ActionSpace& action_space() const override { return space_; }
  void Reset(Episode& ep, bool train_mode) const override;
  void Step(const Episode& ep, const VecX& action, StepResult& out) const override;

  // Re-conditions an episode on another style with its canonical joints.
  void SetStyle(Episode& ep, int style) const;

  const GraspSetup& setup() const { return setup_; }

 private:
  void Encode(Episode& ep) const;

  GraspSetup setup_;
  ActionSpace space_;
  std::vector<std::shared_ptr<const CloudInput>> clouds_;
};

// Quadratic one-step bandit: reward = -|a - a*|^2 over a box [-1, 1]^A.
class BanditEnv : public OneStepEnv {
 public:
  BanditEnv(int num_joints, std::uint64_t seed);

  PolicyDims dims() const override { return dims_; }
  const ActionSpace& action_space() const override { return space_; }
  void Reset(Episode& ep, bool train_mode) const override;
  void Step(const Episode& ep, const VecX& action, StepResult& out) const override;

  const VecX& target() const { return target_; }

 private:
  PolicyDims dims_;
  ActionSpace space_;
  VecX target_;
  std::shared_ptr<const CloudInput> cloud_;
};

}  // namespace fungrasp

#endif  // FUNGRASP_ENV_H_
