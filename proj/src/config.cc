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

#include "fungrasp/config.h"

#include <cmath>
#include <set>
#include <string>

#include "fungrasp/error.h"

namespace fungrasp {

namespace {

void ReadNumber(const Json& j, const char* key, const std::string& ctx, double& field) {
  if (j.contains(key)) field = RequireNumber(j.at(key), ctx + "." + key);
}

void ReadInt(const Json& j, const char* key, const std::string& ctx, int& field) {
  if (!j.contains(key)) return;
  const double v = RequireNumber(j.at(key), ctx + "." + key);
  if (v != std::floor(v)) throw InputError(ctx + "." + key + ": expected an integer");
  field = static_cast<int>(v);
}

void ReadBool(const Json& j, const char* key, const std::string& ctx, bool& field) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) throw InputError(ctx + "." + key + ": expected a boolean");
  field = j.at(key).get<bool>();
}

void ReadPath(const Json& j, const char* key, const std::filesystem::path& base,
              const std::string& ctx, std::filesystem::path& field) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) throw InputError(ctx + "." + key + ": expected a path string");
  const std::filesystem::path p = j.at(key).get<std::string>();
  if (p.empty()) {
    field.clear();
    return;
  }
  field = p.is_absolute() ? p : (base / p).lexically_normal();
}

const Json& Section(const Json& j, const char* key) {
  static const Json kNull;
  return j.contains(key) ? j.at(key) : kNull;
}

}  // namespace

ActionBounds ParseActionBounds(const Json& j, const ActionBounds& defaults) {
  ActionBounds b = defaults;
  if (j.is_null()) return b;
  if (!j.is_object()) throw InputError("bounds: expected an object");
  ReadNumber(j, "b_t", "bounds", b.b_t);
  ReadNumber(j, "b_r", "bounds", b.b_r);
  ReadNumber(j, "b_q", "bounds", b.b_q);
  ReadNumber(j, "k_min", "bounds", b.k_min);
  ReadNumber(j, "k_max", "bounds", b.k_max);
  if (b.b_t < 0.0 || b.b_r < 0.0 || b.b_q < 0.0) {
    throw InputError("bounds: b_t, b_r and b_q must be non-negative");
  }
  if (!(b.k_min <= b.k_max)) throw InputError("bounds: k_min must not exceed k_max");
  return b;
}

Json ActionBoundsToJson(const ActionBounds& b) {
  return Json{{"b_t", b.b_t}, {"b_r", b.b_r}, {"b_q", b.b_q}, {"k_min", b.k_min},
              {"k_max", b.k_max}};
}

AffordanceParams ParseAffordanceParams(const Json& j, const AffordanceParams& defaults) {
  AffordanceParams p = defaults;
  if (j.is_null()) return p;
  if (!j.is_object()) throw InputError("affordance: expected an object");
  ReadNumber(j, "beta", "affordance", p.beta);
  ReadNumber(j, "h_min", "affordance", p.h_min);
  ReadNumber(j, "up_weight", "affordance", p.up_weight);
  return p;
}

Json AffordanceParamsToJson(const AffordanceParams& p) {
  return Json{{"beta", p.beta}, {"h_min", p.h_min}, {"up_weight", p.up_weight}};
}

RunConfig ParseRunConfig(const Json& j, const std::filesystem::path& base_dir,
                         const std::string& context) {
  if (!j.is_object()) throw InputError(context + ": expected a JSON object");
  static const std::set<std::string> kKeys = {
      "hand",   "styles", "demo",   "objects",    "cameras",     "out",        "seed", "workers",
      "train",  "reward", "sim",    "bounds",     "affordance",  "sigma_style", "num_points",
      "eval"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw InputError(context + ": unknown key '" + key + "'");
  }
  RunConfig cfg;
  ReadPath(j, "hand", base_dir, context, cfg.hand);
  ReadPath(j, "styles", base_dir, context, cfg.styles);
  ReadPath(j, "demo", base_dir, context, cfg.demo);
  ReadPath(j, "objects", base_dir, context, cfg.objects);
  ReadPath(j, "cameras", base_dir, context, cfg.cameras);
  ReadPath(j, "out", base_dir, context, cfg.out);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    if (!IsNonNegativeInteger(j.at("seed"))) {
      throw InputError(context + ".seed: expected a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  ReadInt(j, "workers", context, cfg.workers);
  cfg.train = ParseTrainConfig(Section(j, "train"), cfg.train);
  cfg.reward = ParseRewardConfig(Section(j, "reward"), cfg.reward);
  cfg.sim = ParseSimConfig(Section(j, "sim"), cfg.sim);
  cfg.bounds = ParseActionBounds(Section(j, "bounds"), cfg.bounds);
  cfg.affordance = ParseAffordanceParams(Section(j, "affordance"), cfg.affordance);
  ReadNumber(j, "sigma_style", context, cfg.sigma_style);
  ReadInt(j, "num_points", context, cfg.num_points);
  const Json& eval = Section(j, "eval");
  if (!eval.is_null()) {
    const std::string ctx = context + ".eval";
    ReadInt(eval, "episodes", ctx, cfg.eval_episodes);
    ReadBool(eval, "stochastic", ctx, cfg.eval_stochastic);
    ReadBool(eval, "exhaustive_styles", ctx, cfg.exhaustive_styles);
    ReadBool(eval, "strict_success", ctx, cfg.strict_success);
  }
  if (cfg.sigma_style < 0.0) throw InputError(context + ".sigma_style: must be non-negative");
  if (cfg.num_points < 1) throw InputError(context + ".num_points: must be positive");
  if (cfg.eval_episodes < 1) throw InputError(context + ".eval.episodes: must be positive");
  if (cfg.workers < 0) throw InputError(context + ".workers: must be non-negative");
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadJsonFile(path), path.parent_path(), path.string());
}

Json RunConfigToJson(const RunConfig& cfg) {
  return Json{{"hand", cfg.hand.string()},
              {"styles", cfg.styles.string()},
              {"demo", cfg.demo.string()},
              {"objects", cfg.objects.string()},
              {"cameras", cfg.cameras.string()},
              {"out", cfg.out.string()},
              {"seed", cfg.seed ? Json(*cfg.seed) : Json(nullptr)},
              {"train", TrainConfigToJson(cfg.train)},
              {"reward", RewardConfigToJson(cfg.reward)},
              {"sim", SimConfigToJson(cfg.sim)},
              {"bounds", ActionBoundsToJson(cfg.bounds)},
              {"affordance", AffordanceParamsToJson(cfg.affordance)},
              {"sigma_style", cfg.sigma_style},
              {"num_points", cfg.num_points},
              {"eval",
               {{"episodes", cfg.eval_episodes},
                {"stochastic", cfg.eval_stochastic},
                {"exhaustive_styles", cfg.exhaustive_styles},
                {"strict_success", cfg.strict_success}}}};
}

std::string ConfigDigest(const RunConfig& cfg) { return Fnv1aHex(RunConfigToJson(cfg).dump()); }

void ValidateAssetPaths(const RunConfig& cfg) {
  auto check = [](const std::filesystem::path& p, const char* what, bool required) {
    if (p.empty()) {
      if (required) throw InputError(std::string("no ") + what + " path given");
      return;
    }
    if (!std::filesystem::exists(p)) {
      throw InputError(std::string(what) + " path '" + p.string() + "' does not exist");
    }
  };
  check(cfg.hand, "hand", true);
  check(cfg.styles, "styles", true);
  check(cfg.demo, "demo", true);
  check(cfg.objects, "objects", true);
  check(cfg.cameras, "cameras", false);
}

GraspSetup BuildSetup(const RunConfig& cfg) {
  ValidateAssetPaths(cfg);
  GraspSetup g;
  g.spec = LoadHandSpec(cfg.hand);
  g.styles = LoadStyles(cfg.styles, g.spec);
  g.demo = LoadDemo(cfg.demo, g.spec);
  const std::vector<ObjectModel> objects = LoadObjectDir(cfg.objects);
  if (objects.empty()) {
    throw InputError("object directory '" + cfg.objects.string() + "' holds no objects");
  }
  for (const ObjectModel& o : objects) {
    g.objects.push_back(SceneObject{o, ComputeAffordance(o, cfg.affordance)});
  }
  g.sim = cfg.sim;
  g.reward = cfg.reward;
  g.bounds = cfg.bounds;
  g.sigma_style = cfg.sigma_style;
  g.num_points = cfg.num_points;
  g.cloud_seed = SplitMix64(cfg.seed.value_or(0) ^ 0xc10dULL);
  return g;
}

}  // namespace fungrasp
