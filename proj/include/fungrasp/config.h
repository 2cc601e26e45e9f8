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

#ifndef FUNGRASP_CONFIG_H_
#define FUNGRASP_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fungrasp/demo.h"
#include "fungrasp/env.h"
#include "fungrasp/grasp_sim.h"
#include "fungrasp/json_util.h"
#include "fungrasp/object.h"
#include "fungrasp/reward.h"
#include "fungrasp/trainer.h"

namespace fungrasp {

// Everything a CLI run needs. Relative paths in a config file are resolved
// against the file's directory; command-line flags override file values.
struct RunConfig {
  std::filesystem::path hand;
  std::filesystem::path styles;
  std::filesystem::path demo;
  std::filesystem::path objects;
  std::filesystem::path cameras;  // optional
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  int workers = 1;  // 0: all available threads

  TrainConfig train;
  RewardConfig reward;
  SimConfig sim;
  ActionBounds bounds;
  AffordanceParams affordance;
  double sigma_style = 0.05;
  int num_points = 128;

  int eval_episodes = 500;
  bool eval_stochastic = false;
  bool exhaustive_styles = false;
  bool strict_success = false;
};

ActionBounds ParseActionBounds(const Json& j, const ActionBounds& defaults);
Json ActionBoundsToJson(const ActionBounds& b);
AffordanceParams ParseAffordanceParams(const Json& j, const AffordanceParams& defaults);
Json AffordanceParamsToJson(const AffordanceParams& p);

RunConfig ParseRunConfig(const Json& j, const std::filesystem::path& base_dir,
                         const std::string& context);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// The worker count is left out so that digests agree across thread counts.
Json RunConfigToJson(const RunConfig& cfg);
std::string ConfigDigest(const RunConfig& cfg);

// Throws InputError naming the first missing or unset asset path.
void ValidateAssetPaths(const RunConfig& cfg);

GraspSetup BuildSetup(const RunConfig& cfg);

}  // namespace fungrasp

#endif  // FUNGRASP_CONFIG_H_
