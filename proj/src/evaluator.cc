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

#include "fungrasp/evaluator.h"

#include <algorithm>
#include <cmath>

#include "fungrasp/error.h"
#include "fungrasp/kernels.h"

namespace fungrasp {

Json MetricsToJson(const Metrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"n_episodes", m.n_episodes},
              {"n_success", m.n_success},
              {"gsr", m.gsr},
              {"sad", opt(m.sad)},
              {"sd", m.sd},
              {"sd_normalized", m.sd_normalized},
              {"sd_ratio", opt(m.sd_ratio)},
              {"sa", opt(m.sa)},
              {"strict_gsr", m.strict_gsr},
              {"strict", m.strict}};
}

Json EpisodeResultToJson(const EpisodeResult& e) {
  return Json{{"episode", e.episode},
              {"object_index", e.object_index},
              {"object", e.object},
              {"object_pose", ToJson(e.object_pose)},
              {"p_afford", ToJson(e.p_afford)},
              {"p_afford_world", ToJson(e.p_afford_world)},
              {"style", e.style},
              {"executed_style", e.executed_style},
              {"success", e.success},
              {"strict_success", e.strict_success},
              {"d_min", e.d_min},
              {"d_final", e.d_final},
              {"q_final", ToJson(e.q_final)},
              {"q_star", ToJson(e.q_star)},
              {"action", ToJson(e.action)},
              {"reward_terms", RewardTermsToJson(e.terms)},
              {"failure_reason", e.failure_reason},
              {"styles_tried", e.styles_tried}};
}

double PairwiseStyleDiversity(std::span<const VecX> q) {
  if (q.size() < 2) return 0.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      sum += (q[i] - q[j]).norm();
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

Metrics ComputeMetrics(std::span<const EpisodeResult> episodes, const HandSpec& spec,
                       bool strict, std::optional<double> baseline_sd) {
  Metrics m;
  m.strict = strict;
  m.n_episodes = static_cast<int>(episodes.size());
  std::vector<VecX> q, qn;
  double d_sum = 0.0;
  int matched = 0, strict_count = 0;
  for (const EpisodeResult& e : episodes) {
    if (e.strict_success) ++strict_count;
    if (!(strict ? e.strict_success : e.success)) continue;
    ++m.n_success;
    d_sum += e.d_final;
    if (e.executed_style == e.style) ++matched;
    q.push_back(e.q_final);
    qn.push_back(NormalizeJoints(spec, e.q_final));
  }
  if (m.n_episodes > 0) {
    m.gsr = static_cast<double>(m.n_success) / m.n_episodes;
    m.strict_gsr = static_cast<double>(strict_count) / m.n_episodes;
  }
  if (m.n_success > 0) {
    m.sad = d_sum / m.n_success;
    m.sa = static_cast<double>(matched) / m.n_success;
  }
  m.sd = PairwiseStyleDiversity(q);
  m.sd_normalized = PairwiseStyleDiversity(qn);
  if (baseline_sd && *baseline_sd > 0.0) m.sd_ratio = m.sd / *baseline_sd;
  return m;
}

namespace {

EpisodeResult ToEpisodeResult(const GraspEnv& env, const Episode& ep,
                              const StepResult& r) {
  const GraspSetup& g = env.setup();
  EpisodeResult e;
  e.episode = ep.index;
  e.object_index = ep.env.object_index;
  e.object = g.objects[static_cast<size_t>(ep.env.object_index)].model.name;
  e.object_pose = ep.env.object_pose;
  e.p_afford = ep.env.condition.p_afford;
  e.p_afford_world = TransformPoint(ep.env.object_pose, e.p_afford);
  e.style = ep.env.condition.style;
  e.action = r.action;
  if (r.has_record) {
    e.executed_style = r.record.executed_style;
    e.success = r.success;
    e.d_min = r.record.d_min;
    e.d_final = r.record.d_final;
    e.q_final = r.record.q_final;
    e.q_star = r.record.q_star;
    e.terms = r.record.reward_terms;
    e.failure_reason = r.record.failure_reason;
  } else {
    e.q_final = VecX::Zero(g.spec.num_joints);
    e.q_star = VecX::Zero(g.spec.num_joints);
  }
  if (r.error) e.failure_reason = "episode error: " + r.diagnostic;
  e.strict_success = e.success && e.d_final < kStrictAffordRadius &&
                     e.executed_style == e.style;
  return e;
}

// Runs one result per (episode, style) candidate, then reduces per episode.
template <typename ActFn>
EvalReport RunEvaluation(const GraspEnv& env, const EvalOptions& options, ActFn&& act) {
  if (options.episodes < 1) throw InputError("evaluation needs at least one episode");
  std::vector<Episode> base =
      options.serial_reference
          ? ResetBatchSerial(env, options.seed, kEvalStream, options.episodes, false)
          : ResetBatch(env, options.seed, kEvalStream, options.episodes, false,
                       options.workers);
  const int num_styles = env.setup().styles.size();
  const int per = options.exhaustive_styles ? num_styles : 1;
  std::vector<Episode> runs;
  runs.reserve(base.size() * static_cast<size_t>(per));
  for (const Episode& ep : base) {
    for (int s = 0; s < per; ++s) {
      Episode e = ep;
      if (options.exhaustive_styles) env.SetStyle(e, s);
      e.index = static_cast<int>(runs.size());
      runs.push_back(std::move(e));
    }
  }
  const std::vector<StepResult> results = act(runs);

  EvalReport report;
  for (size_t i = 0; i < base.size(); ++i) {
    const size_t first = i * static_cast<size_t>(per);
    size_t pick = first;
    if (options.exhaustive_styles) {
      // The conditioned style if it works, otherwise the lowest working one.
      const size_t conditioned =
          first + static_cast<size_t>(base[i].env.condition.style);
      pick = conditioned;
      if (!results[conditioned].success) {
        for (size_t k = first; k < first + static_cast<size_t>(per); ++k) {
          if (results[k].success) {
            pick = k;
            break;
          }
        }
      }
    }
    EpisodeResult e = ToEpisodeResult(env, runs[pick], results[pick]);
    e.episode = static_cast<int>(i);
    e.styles_tried = per;
    report.episodes.push_back(std::move(e));
  }
  report.metrics = ComputeMetrics(report.episodes, env.setup().spec, options.strict_success);
  return report;
}

}  // namespace

EvalReport Evaluate(const PolicyNet& net, const GraspEnv& env, const EvalOptions& options) {
  return RunEvaluation(env, options, [&](std::vector<Episode>& runs) {
    const PolicyOutput out = PolicyForward(net, Observations(runs));
    return options.serial_reference
               ? ActBatchSerial(env, runs, out, options.stochastic)
               : ActBatch(env, runs, out, options.stochastic, options.workers);
  });
}

EvalReport RandomBaseline(const GraspEnv& env, const EvalOptions& options) {
  return RunEvaluation(env, options, [&](std::vector<Episode>& runs) {
    const ActionSpace& space = env.action_space();
    std::vector<VecX> actions;
    actions.reserve(runs.size());
    for (Episode& ep : runs) {
      VecX a(space.dim());
      for (int k = 0; k < space.dim(); ++k) {
        a[k] = space.lo[k] + (space.hi[k] - space.lo[k]) * Uniform01(ep.rng);
      }
      actions.push_back(std::move(a));
    }
    return options.serial_reference ? StepBatchSerial(env, runs, actions)
                                    : StepBatch(env, runs, actions, options.workers);
  });
}

EvalReport EvaluateFixedAction(const GraspEnv& env, const VecX& action,
                               const EvalOptions& options) {
  return RunEvaluation(env, options, [&](std::vector<Episode>& runs) {
    const std::vector<VecX> actions(runs.size(), action);
    return options.serial_reference ? StepBatchSerial(env, runs, actions)
                                    : StepBatch(env, runs, actions, options.workers);
  });
}

AblationComponent ParseAblationComponent(const std::string& name) {
  if (name == "afford") return AblationComponent::kAfford;
  if (name == "clip") return AblationComponent::kClip;
  if (name == "close") return AblationComponent::kClose;
  if (name == "qpos") return AblationComponent::kQpos;
  if (name == "disturbance") return AblationComponent::kDisturbance;
  throw InputError("unknown ablation component '" + name +
                   "' (expected afford, clip, close, qpos or disturbance)");
}

std::string AblationComponentName(AblationComponent c) {
  switch (c) {
    case AblationComponent::kAfford: return "afford";
    case AblationComponent::kClip: return "clip";
    case AblationComponent::kClose: return "close";
    case AblationComponent::kQpos: return "qpos";
    case AblationComponent::kDisturbance: return "disturbance";
  }
  return "";
}

GraspSetup AblateSetup(GraspSetup setup, AblationComponent c) {
  switch (c) {
    case AblationComponent::kAfford: setup.reward.afford_on = false; break;
    case AblationComponent::kClip: setup.reward.clip_on = false; break;
    case AblationComponent::kClose: setup.reward.close_on = false; break;
    case AblationComponent::kQpos: setup.reward.qpos_on = false; break;
    case AblationComponent::kDisturbance: setup.sigma_style = 0.0; break;
  }
  return setup;
}

Json AblationResultToJson(const AblationResult& r) {
  auto delta = [](const std::optional<double>& a, const std::optional<double>& b) {
    return a && b ? Json(*b - *a) : Json(nullptr);
  };
  return Json{{"component", r.component},
              {"full", MetricsToJson(r.full)},
              {"ablated", MetricsToJson(r.ablated)},
              {"delta", Json{{"gsr", r.ablated.gsr - r.full.gsr},
                             {"sad", delta(r.full.sad, r.ablated.sad)},
                             {"sd", r.ablated.sd - r.full.sd},
                             {"sa", delta(r.full.sa, r.ablated.sa)}}}};
}

AblationResult AblationRun(const GraspSetup& base, const TrainConfig& cfg,
                           AblationComponent c, const EvalOptions& options,
                           int workers) {
  AblationResult result;
  result.component = AblationComponentName(c);
  const GraspEnv full_env(base);
  const PolicyNet full = Train(full_env, cfg, {}, workers);
  result.full = Evaluate(full, full_env, options).metrics;
  const GraspEnv ablated_env(AblateSetup(base, c));
  const PolicyNet ablated = Train(ablated_env, cfg, {}, workers);
  result.ablated = Evaluate(ablated, ablated_env, options).metrics;
  return result;
}

}  // namespace fungrasp
