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

#ifndef FUNGRASP_EVALUATOR_H_
#define FUNGRASP_EVALUATOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fungrasp/env.h"
#include "fungrasp/json_util.h"
#include "fungrasp/policy.h"
#include "fungrasp/trainer.h"

namespace fungrasp {

// Affordance distance bound of the composite strict success.
inline constexpr double kStrictAffordRadius = 0.04;

struct Metrics {
  int n_episodes = 0;
  int n_success = 0;
  double gsr = 0.0;
  std::optional<double> sad;  // null without successes
  double sd = 0.0;
  double sd_normalized = 0.0;
  std::optional<double> sd_ratio;  // sd over a supplied baseline sd
  std::optional<double> sa;        // null without successes
  double strict_gsr = 0.0;
  bool strict = false;  // success above means strict success
};

Json MetricsToJson(const Metrics& m);

struct EpisodeResult {
  int episode = 0;
  int object_index = 0;
  std::string object;
  Pose object_pose;
  Vec3 p_afford = Vec3::Zero();        // object frame
  Vec3 p_afford_world = Vec3::Zero();
  int style = 0;                        // conditioned (or chosen) style
  int executed_style = -1;
  bool success = false;
  bool strict_success = false;
  double d_min = 0.0;
  double d_final = 0.0;
  VecX q_final;
  VecX q_star;
  VecX action;
  RewardTerms terms;
  std::string failure_reason;
  int styles_tried = 1;
};

Json EpisodeResultToJson(const EpisodeResult& e);

struct EvalOptions {
  int episodes = 200;
  std::uint64_t seed = 0;
  bool stochastic = false;
  bool exhaustive_styles = false;
  bool strict_success = false;
  int workers = 1;
  bool serial_reference = false;
};

struct EvalReport {
  Metrics metrics;
  std::vector<EpisodeResult> episodes;
};

// Mean L2 distance over unordered pairs; 0 with fewer than two entries.
double PairwiseStyleDiversity(std::span<const VecX> q);

Metrics ComputeMetrics(std::span<const EpisodeResult> episodes, const HandSpec& spec,
                       bool strict, std::optional<double> baseline_sd = std::nullopt);

// Deterministic squashed-mean actions unless options.stochastic.
EvalReport Evaluate(const PolicyNet& net, const GraspEnv& env, const EvalOptions& options);

// Actions drawn uniformly inside the action bounds.
EvalReport RandomBaseline(const GraspEnv& env, const EvalOptions& options);

// The same action for every episode (e.g. identity replay).
EvalReport EvaluateFixedAction(const GraspEnv& env, const VecX& action,
                               const EvalOptions& options);

enum class AblationComponent { kAfford, kClip, kClose, kQpos, kDisturbance };

AblationComponent ParseAblationComponent(const std::string& name);
std::string AblationComponentName(AblationComponent c);

// Disables one component: a reward flag, or sigma_style = 0.
GraspSetup AblateSetup(GraspSetup setup, AblationComponent c);

struct AblationResult {
  std::string component;
  Metrics full;
  Metrics ablated;
};

Json AblationResultToJson(const AblationResult& r);

// Trains the full and the ablated setup with identical seeds and evaluates
// both with the same options.
AblationResult AblationRun(const GraspSetup& base, const TrainConfig& cfg,
                           AblationComponent c, const EvalOptions& options,
                           int workers);

}  // namespace fungrasp

#endif  // FUNGRASP_EVALUATOR_H_
