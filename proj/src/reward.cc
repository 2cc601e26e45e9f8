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

#include "fungrasp/error.h"
#include "fungrasp/grasp_sim.h"

namespace fungrasp {

RewardConfig ParseRewardConfig(const Json& j, const RewardConfig& defaults) {
  RewardConfig cfg = defaults;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw InputError("reward: expected an object");
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = RequireNumber(j.at(key), std::string("reward.") + key);
  };
  auto flag = [&](const char* key, bool& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) {
      throw InputError(std::string("reward.") + key + ": expected a boolean");
    }
    field = j.at(key).get<bool>();
  };
  num("lambda_afford", cfg.lambda_afford);
  num("lambda_close", cfg.lambda_close);
  num("lambda_qpos", cfg.lambda_qpos);
  num("gamma", cfg.gamma);
  num("close_threshold", cfg.close_threshold);
  num("success_reward", cfg.success_reward);
  num("fixed_afford_radius", cfg.fixed_afford_radius);
  flag("afford_on", cfg.afford_on);
  flag("close_on", cfg.close_on);
  flag("qpos_on", cfg.qpos_on);
  flag("clip_on", cfg.clip_on);
  if (!(cfg.gamma > 0.0)) throw InputError("reward.gamma: must be positive");
  if (!(cfg.close_threshold > 0.0)) {
    throw InputError("reward.close_threshold: must be positive");
  }
  if (cfg.lambda_afford < 0.0 || cfg.lambda_close < 0.0 || cfg.lambda_qpos < 0.0) {
    throw InputError("reward: weights must be non-negative");
  }
  return cfg;
}

Json RewardConfigToJson(const RewardConfig& cfg) {
  return Json{{"lambda_afford", cfg.lambda_afford},
              {"lambda_close", cfg.lambda_close},
              {"lambda_qpos", cfg.lambda_qpos},
              {"gamma", cfg.gamma},
              {"close_threshold", cfg.close_threshold},
              {"success_reward", cfg.success_reward},
              {"fixed_afford_radius", cfg.fixed_afford_radius},
              {"afford_on", cfg.afford_on},
              {"close_on", cfg.close_on},
              {"qpos_on", cfg.qpos_on},
              {"clip_on", cfg.clip_on}};
}

Json RewardTermsToJson(const RewardTerms& t) {
  return Json{{"r_afford", t.r_afford},
              {"r_close", t.r_close},
              {"r_qpos", t.r_qpos},
              {"r_success", t.r_success},
              {"total", t.total}};
}

double QposReward(const VecX& q_pos, const VecX& q_star) {
  if (q_pos.size() != q_star.size()) {
    throw std::invalid_argument("qpos reward: dimension mismatch");
  }
  return std::exp(-(q_pos - q_star).norm());
}

double AffordRadius(double obj_bb, const RewardConfig& cfg) {
  return cfg.clip_on ? obj_bb / cfg.gamma : cfg.fixed_afford_radius;
}

double AffordReward(bool success, double d_final, double obj_bb,
                    const RewardConfig& cfg) {
  if (!success) return 0.0;
  if (!(d_final < AffordRadius(obj_bb, cfg))) return 0.0;
  return std::exp(-d_final);
}

double CloseReward(double d_min, const RewardConfig& cfg) {
  return d_min < cfg.close_threshold ? 1.0 : 0.0;
}

RewardTerms CombineRewards(double r_afford, double r_close, double r_qpos,
                           bool success, const RewardConfig& cfg) {
  RewardTerms t;
  t.r_afford = r_afford;
  t.r_close = r_close;
  t.r_qpos = r_qpos;
  t.r_success = success ? cfg.success_reward : 0.0;
  // Summed in the order of r = la*ra + lc*rc + lq*rq + rs; a disabled term
  // contributes an exact zero.
  const double afford = cfg.afford_on ? cfg.lambda_afford * t.r_afford : 0.0;
  const double close = cfg.close_on ? cfg.lambda_close * t.r_close : 0.0;
  const double qpos = cfg.qpos_on ? cfg.lambda_qpos * t.r_qpos : 0.0;
  t.total = afford + close + qpos + t.r_success;
  return t;
}

RewardTerms TotalReward(const RolloutRecord& record, const RewardConfig& cfg) {
  return CombineRewards(
      AffordReward(record.success, record.d_final, record.obj_bb, cfg),
      CloseReward(record.d_min, cfg), QposReward(record.q_style, record.q_star),
      record.success, cfg);
}

}  // namespace fungrasp
