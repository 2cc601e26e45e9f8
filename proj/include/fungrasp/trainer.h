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

#ifndef FUNGRASP_TRAINER_H_
#define FUNGRASP_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fungrasp/env.h"
#include "fungrasp/json_util.h"
#include "fungrasp/optimizer.h"
#include "fungrasp/policy.h"

namespace fungrasp {

struct TrainConfig {
  int envs_per_iter = 512;
  int iterations = 500;
  int minibatch = 128;
  int epochs = 4;
  double clip = 0.2;
  double entropy_coef = 0.005;
  double value_coef = 0.5;
  double lr = 3e-4;
  double max_grad_norm = 0.5;
  double init_log_std = -3.0;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // 0: final checkpoint only
};

TrainConfig ParseTrainConfig(const Json& j, const TrainConfig& defaults);
Json TrainConfigToJson(const TrainConfig& cfg);

struct Transition {
  Observation obs;
  VecX raw;
  VecX action;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double value_old = 0.0;
  double advantage = 0.0;
};

struct Batch {
  std::vector<Transition> items;
  std::vector<StepResult> results;
  std::vector<Episode> episodes;
  int errors = 0;
  double mean_reward = 0.0;
  double gsr = 0.0;
};

// Reset (parallel) -> one batched forward (serial) -> sample and roll out
// (parallel). serial_reference swaps in the serial kernels.
Batch CollectBatch(const PolicyNet& net, const OneStepEnv& env, const TrainConfig& cfg,
                   std::uint64_t iteration, int workers, bool serial_reference = false);

// advantage = reward - value_old, then normalized to mean 0 and std 1.
void ComputeAdvantages(Batch& batch);

// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double ClippedSurrogate(double ratio, double advantage, double clip);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int steps = 0;
  bool aborted = false;
};

// Loss for one minibatch and its parameter gradient.
struct MinibatchLoss {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  VecX grad;
};

MinibatchLoss PpoLoss(const PolicyNet& net, std::span<const Transition> items,
                      const ActionSpace& space, const TrainConfig& cfg);

UpdateStats PpoUpdate(PolicyNet& net, AdamState& adam, const Batch& batch,
                      const ActionSpace& space, const TrainConfig& cfg,
                      std::uint64_t iteration);

struct BatchSummary {
  double mean_reward = 0.0;
  double gsr = 0.0;
  std::optional<double> sad;
  std::optional<double> sa;
  int errors = 0;
};

BatchSummary SummarizeBatch(const Batch& batch);

struct TrainHooks {
  std::function<void(const Json& record)> on_log;
  std::function<void(const PolicyNet& net, int iteration)> on_checkpoint;
};

PolicyNet Train(const OneStepEnv& env, const TrainConfig& cfg, const TrainHooks& hooks,
                int workers);

// Central differences against an analytic gradient on selected coordinates.
// Relative error |a - n| / max(|a|, |n|, floor).
double FiniteDiffCheck(const std::function<double(const VecX&)>& loss, const VecX& x,
                       const VecX& analytic, std::span<const std::size_t> indices,
                       double h = 1e-5, double floor = 1e-6);

struct GradientCheckReport {
  double max_rel_error = 0.0;
  int num_checked = 0;
  int num_skipped = 0;  // stencil crossed a ReLU gate or max-pool route
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double floor = 0.0;  // relative-error denominator floor
};

// Smooth test loss on a random batch (log-likelihood, value and entropy
// terms) over a freshly initialized network. Coordinates whose +-h stencil
// changes the activation pattern are replaced by fresh draws. The relative
// error floor is floor_scale * max(1, |loss|).
GradientCheckReport PolicyGradientCheck(std::uint64_t seed, int num_params = 200,
                                        double h = 1e-5, double floor_scale = 1e-5);

}  // namespace fungrasp

#endif  // FUNGRASP_TRAINER_H_
