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

#ifndef FUNGRASP_REWARD_H_
#define FUNGRASP_REWARD_H_

#include "fungrasp/geometry.h"
#include "fungrasp/json_util.h"

namespace fungrasp {

struct RolloutRecord;

struct RewardConfig {
  double lambda_afford = 2.0;
  double lambda_close = 0.5;
  double lambda_qpos = 0.5;
  double gamma = 4.0;             // afford radius = obj_bb / gamma
  double close_threshold = 0.03;  // meters
  double success_reward = 1.0;
  double fixed_afford_radius = 0.10;  // used when clip_on is false
  bool afford_on = true;
  bool close_on = true;
  bool qpos_on = true;
  bool clip_on = true;
};

RewardConfig ParseRewardConfig(const Json& j, const RewardConfig& defaults);
Json RewardConfigToJson(const RewardConfig& cfg);

struct RewardTerms {
  double r_afford = 0.0;
  double r_close = 0.0;
  double r_qpos = 0.0;
  double r_success = 0.0;
  double total = 0.0;
};

Json RewardTermsToJson(const RewardTerms& terms);

// exp(-||q_pos - q_star||_2), q_pos being the style's canonical joints.
double QposReward(const VecX& q_pos, const VecX& q_star);

// Acceptance radius of the sparse affordance term.
double AffordRadius(double obj_bb, const RewardConfig& cfg);

// 1(success) * 1(d_final < radius) * exp(-d_final).
double AffordReward(bool success, double d_final, double obj_bb,
                    const RewardConfig& cfg);

// 1(d_min < close_threshold), independent of success.
double CloseReward(double d_min, const RewardConfig& cfg);

RewardTerms CombineRewards(double r_afford, double r_close, double r_qpos,
                           bool success, const RewardConfig& cfg);

RewardTerms TotalReward(const RolloutRecord& record, const RewardConfig& cfg);

}  // namespace fungrasp

#endif  // FUNGRASP_REWARD_H_
