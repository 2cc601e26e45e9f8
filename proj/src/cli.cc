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

#include "fungrasp/cli.h"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fungrasp/assets.h"
#include "fungrasp/config.h"
#include "fungrasp/datasets_io.h"
#include "fungrasp/error.h"
#include "fungrasp/evaluator.h"

namespace fungrasp {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string objects, demo, hand, styles, out;
  std::optional<int> episodes;
  std::string component;
  bool exhaustive_styles = false;
  bool strict_success = false;
  bool success_only = false;
  std::string checkpoint;
  std::string object;
  int samples = 1;
};

void SetupLogging() {
  auto logger = spdlog::get("fungrasp");
  if (!logger) logger = spdlog::stderr_color_mt("fungrasp");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("FUNGRASP_LOG");
  spdlog::level::level_enum level = spdlog::level::info;
  if (env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off.
    if (level == spdlog::level::off && std::string(env) != "off") {
      level = spdlog::level::info;
      spdlog::warn("unknown FUNGRASP_LOG level '{}', using info", env);
    }
  }
  spdlog::set_level(level);
}

RunConfig ResolveConfig(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    if (!std::filesystem::exists(f.config)) {
      throw InputError("config file '" + f.config + "' does not exist");
    }
    cfg = LoadRunConfig(f.config);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) {
    if (*f.workers < 0) throw InputError("--workers must be non-negative");
    cfg.workers = *f.workers;
  }
  if (!f.objects.empty()) cfg.objects = f.objects;
  if (!f.demo.empty()) cfg.demo = f.demo;
  if (!f.hand.empty()) cfg.hand = f.hand;
  if (!f.styles.empty()) cfg.styles = f.styles;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.episodes) {
    if (*f.episodes < 1) throw InputError("--episodes must be positive");
    cfg.eval_episodes = *f.episodes;
  }
  if (f.exhaustive_styles) cfg.exhaustive_styles = true;
  if (f.strict_success) cfg.strict_success = true;
  cfg.train.seed = cfg.seed.value_or(0);
  return cfg;
}

std::uint64_t RequireSeed(const RunConfig& cfg, const char* command) {
  if (!cfg.seed) {
    throw InputError(std::string(command) + " needs a seed (--seed or \"seed\" in the config)");
  }
  return *cfg.seed;
}

void EnsureOutDir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw InputError("cannot create output directory '" + cfg.out.string() + "'");
}

EvalOptions MakeEvalOptions(const RunConfig& cfg) {
  EvalOptions o;
  o.episodes = cfg.eval_episodes;
  o.seed = cfg.seed.value_or(0);
  o.stochastic = cfg.eval_stochastic;
  o.exhaustive_styles = cfg.exhaustive_styles;
  o.strict_success = cfg.strict_success;
  o.workers = cfg.workers;
  return o;
}

std::filesystem::path CheckpointPath(const Flags& f, const RunConfig& cfg) {
  return f.checkpoint.empty() ? cfg.out / "checkpoint.json"
                              : std::filesystem::path(f.checkpoint);
}

PolicyNet LoadPolicy(const Flags& f, const RunConfig& cfg, const GraspEnv& env) {
  const std::filesystem::path path = CheckpointPath(f, cfg);
  if (!std::filesystem::exists(path)) {
    throw InputError("checkpoint '" + path.string() + "' does not exist");
  }
  return LoadCheckpoint(path, env.setup().spec.name, env.dims()).net;
}

int CmdTrain(const Flags& f) {
  const RunConfig cfg = ResolveConfig(f);
  RequireSeed(cfg, "train");
  const GraspEnv env(BuildSetup(cfg));
  EnsureOutDir(cfg);
  const std::string digest = ConfigDigest(cfg);
  Json resolved = RunConfigToJson(cfg);
  resolved["config_digest"] = digest;
  WriteFileAtomic(cfg.out / "run_config.json", resolved.dump(2) + "\n");

  std::ostringstream log;
  TrainHooks hooks;
  hooks.on_log = [&](const Json& record) {
    log << record.dump() << "\n";
  };
  hooks.on_checkpoint = [&](const PolicyNet& net, int it) {
    CheckpointMeta meta{env.setup().spec.name, cfg.train.seed, it, it};
    const std::filesystem::path path =
        it == cfg.train.iterations ? cfg.out / "checkpoint.json"
                                   : cfg.out / ("checkpoint_" + std::to_string(it) + ".json");
    SaveCheckpoint(net, meta, path);
    WriteFileAtomic(cfg.out / "metrics.jsonl", log.str());
  };
  Train(env, cfg.train, hooks, cfg.workers);
  WriteFileAtomic(cfg.out / "metrics.jsonl", log.str());
  std::cout << Json{{"checkpoint", (cfg.out / "checkpoint.json").string()},
                    {"metrics_log", (cfg.out / "metrics.jsonl").string()},
                    {"config_digest", digest}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int CmdEval(const Flags& f) {
  const RunConfig cfg = ResolveConfig(f);
  RequireSeed(cfg, "eval");
  const GraspEnv env(BuildSetup(cfg));
  const PolicyNet net = LoadPolicy(f, cfg, env);
  EnsureOutDir(cfg);
  const EvalOptions options = MakeEvalOptions(cfg);
  EvalReport report = Evaluate(net, env, options);
  const EvalReport baseline = RandomBaseline(env, options);
  report.metrics = ComputeMetrics(report.episodes, env.setup().spec, options.strict_success,
                                  baseline.metrics.sd);
  const std::filesystem::path episodes = cfg.out / "eval_episodes.jsonl";
  WriteEpisodeJsonl(episodes, report.episodes);
  const Json out{{"metrics", MetricsToJson(report.metrics)},
                 {"random_baseline", MetricsToJson(baseline.metrics)},
                 {"config_digest", ConfigDigest(cfg)},
                 {"checkpoint", CheckpointPath(f, cfg).string()},
                 {"episodes_file", episodes.string()}};
  WriteFileAtomic(cfg.out / "eval_report.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int CmdAblate(const Flags& f) {
  if (f.component.empty()) throw InputError("ablate needs --component");
  const AblationComponent component = ParseAblationComponent(f.component);
  const RunConfig cfg = ResolveConfig(f);
  RequireSeed(cfg, "ablate");
  const GraspSetup setup = BuildSetup(cfg);
  EnsureOutDir(cfg);
  const AblationResult r =
      AblationRun(setup, cfg.train, component, MakeEvalOptions(cfg), cfg.workers);
  Json out = AblationResultToJson(r);
  out["config_digest"] = ConfigDigest(cfg);
  WriteFileAtomic(cfg.out / ("ablation_" + r.component + ".json"), out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int CmdCollect(const Flags& f) {
  const RunConfig cfg = ResolveConfig(f);
  RequireSeed(cfg, "collect");
  const GraspEnv env(BuildSetup(cfg));
  const PolicyNet net = LoadPolicy(f, cfg, env);
  const std::vector<CameraModel> cameras =
      cfg.cameras.empty() ? ParseCameras(DefaultCamerasJson(), "default cameras")
                          : LoadCameras(cfg.cameras);
  EnsureOutDir(cfg);
  const EvalReport report = Evaluate(net, env, MakeEvalOptions(cfg));
  const std::vector<RolloutExportRecord> records = BuildExportRecords(env, report.episodes);
  const std::filesystem::path path = cfg.out / "rollouts.jsonl";
  const ExportManifest m = ExportRollouts(records, cameras, path, f.success_only, ConfigDigest(cfg));
  std::cout << Json{{"file", path.string()},
                    {"manifest", ManifestPath(path).string()},
                    {"records", m.n_records},
                    {"exported", m.n_exported},
                    {"success", m.n_success},
                    {"frames", m.n_frames}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int CmdSampleAffordance(const Flags& f) {
  const RunConfig cfg = ResolveConfig(f);
  if (cfg.objects.empty()) throw InputError("sample-affordance needs --objects or a config");
  if (f.samples < 1) throw InputError("--samples must be positive");
  const std::vector<ObjectModel> objects = LoadObjectDir(cfg.objects);
  const std::uint64_t seed = cfg.seed.value_or(0);
  bool found = f.object.empty();
  for (size_t k = 0; k < objects.size(); ++k) {
    const ObjectModel& obj = objects[k];
    if (!f.object.empty() && obj.name != f.object) continue;
    found = true;
    const AffordanceDistribution dist = ComputeAffordance(obj, cfg.affordance);
    if (dist.uniform_fallback) spdlog::warn("{}: no support points, sampling uniformly", obj.name);
    Rng rng = SplitRng(seed, {k});
    for (int i = 0; i < f.samples; ++i) {
      const AffordanceSample s = SampleAffordance(dist, obj, rng);
      const Json line{{"object", obj.name}, {"seed", seed}, {"point", ToJson(s.point)},
                      {"index", s.index}};
      std::cout << line.dump() << "\n";
    }
  }
  if (!found) throw InputError("no object named '" + f.object + "' in " + cfg.objects.string());
  return kExitOk;
}

int CmdDemoInspect(const Flags& f) {
  const RunConfig cfg = ResolveConfig(f);
  if (cfg.hand.empty() || cfg.demo.empty()) {
    throw InputError("demo inspect needs --hand and --demo (or a config)");
  }
  const HandSpec spec = LoadHandSpec(cfg.hand);
  const Demonstration demo = LoadDemo(cfg.demo, spec);
  const DemoSummary s = SummarizeDemo(demo, spec);
  std::cout << Json{{"hand", demo.hand},
                    {"num_frames", s.num_frames},
                    {"grasp_index", s.grasp_index},
                    {"num_joints", s.num_joints},
                    {"path_length", s.path_length},
                    {"approach_height", s.approach_height},
                    {"lift_height", s.lift_height},
                    {"static_joints", s.static_joints},
                    {"clamped_values", demo.clamped_values},
                    {"q_min", ToJson(s.q_min)},
                    {"q_max", ToJson(s.q_max)}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int CmdCheckGradients(const Flags& f) {
  const GradientCheckReport r = PolicyGradientCheck(f.seed.value_or(0));
  constexpr double kGate = 1e-4;
  const bool pass = r.max_rel_error < kGate && r.num_checked >= 200;
  std::cout << Json{{"max_rel_error", r.max_rel_error},
                    {"num_checked", r.num_checked},
                    {"num_skipped", r.num_skipped},
                    {"worst_index", r.worst_index},
                    {"worst_analytic", r.worst_analytic},
                    {"worst_numeric", r.worst_numeric},
                    {"floor", r.floor},
                    {"gate", kGate},
                    {"pass", pass}}
                   .dump(2)
            << "\n";
  return pass ? kExitOk : kExitInternalError;
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"Demonstration-editing dexterous grasp learning on the desk."};
  app.name("fungrasp");
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Run config (JSON); flags override its values");
  app.add_option("--seed", f.seed, "Root seed for all randomness");
  app.add_option("--workers", f.workers, "Worker threads (0: all available)");
  app.add_option("--objects", f.objects, "Directory of .ply objects");
  app.add_option("--demo", f.demo, "Demonstration file");
  app.add_option("--hand", f.hand, "Hand description file");
  app.add_option("--styles", f.styles, "Grasp style file");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--episodes", f.episodes, "Evaluation episodes");
  app.add_option("--component", f.component,
                 "Ablated component: afford, clip, close, qpos or disturbance (ablate)");
  app.add_flag("--exhaustive-styles", f.exhaustive_styles,
               "Try every style per episode and keep a successful one");
  app.add_flag("--strict-success", f.strict_success,
               "Count success only within 4 cm of the affordance point and with a style match");
  app.add_flag("--success-only", f.success_only, "Export successful episodes only (collect)");
  app.add_option("--checkpoint", f.checkpoint, "Checkpoint file (default <out>/checkpoint.json)");
  app.add_option("--object", f.object, "Restrict to one object by name (sample-affordance)");
  app.add_option("--samples", f.samples, "Samples per object (sample-affordance)");

  auto* train = app.add_subcommand("train", "Train a policy with PPO");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint and a random baseline");
  auto* ablate = app.add_subcommand("ablate", "Train and evaluate with one component disabled");
  auto* collect = app.add_subcommand("collect", "Export rollouts of a checkpoint as JSONL");
  auto* sample = app.add_subcommand("sample-affordance", "Draw affordance points per object");
  auto* demo = app.add_subcommand("demo", "Demonstration tools");
  auto* inspect = demo->add_subcommand("inspect", "Summarize a demonstration");
  demo->require_subcommand(1);
  auto* gradients = app.add_subcommand("check-gradients", "Finite-difference gradient check");
  for (CLI::App* sub : {train, eval, ablate, collect, sample, demo, inspect, gradients}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUserError;
  }

  SetupLogging();
  try {
    if (train->parsed()) return CmdTrain(f);
    if (eval->parsed()) return CmdEval(f);
    if (ablate->parsed()) return CmdAblate(f);
    if (collect->parsed()) return CmdCollect(f);
    if (sample->parsed()) return CmdSampleAffordance(f);
    if (inspect->parsed()) return CmdDemoInspect(f);
    if (gradients->parsed()) return CmdCheckGradients(f);
    std::cerr << app.help();
    return kExitUserError;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitUserError;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternalError;
  }
}

}  // namespace fungrasp
