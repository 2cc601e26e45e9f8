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

#include "fungrasp/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "fungrasp/error.h"
#include "fungrasp/kernels.h"

namespace fungrasp {

TrainConfig ParseTrainConfig(const Json& j, const TrainConfig& defaults) {
  TrainConfig cfg = defaults;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw InputError("train: expected an object");
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = RequireNumber(j.at(key), std::string("train.") + key);
  };
  auto integer = [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    const double v = RequireNumber(j.at(key), std::string("train.") + key);
    if (v != std::floor(v)) throw InputError(std::string("train.") + key + ": expected an integer");
    field = static_cast<int>(v);
  };
  integer("envs_per_iter", cfg.envs_per_iter);
  integer("iterations", cfg.iterations);
  integer("minibatch", cfg.minibatch);
  integer("epochs", cfg.epochs);
  integer("checkpoint_every", cfg.checkpoint_every);
  num("clip", cfg.clip);
  num("entropy_coef", cfg.entropy_coef);
  num("value_coef", cfg.value_coef);
  num("lr", cfg.lr);
  num("max_grad_norm", cfg.max_grad_norm);
  num("init_log_std", cfg.init_log_std);
  if (j.contains("seed")) {
    if (!IsNonNegativeInteger(j.at("seed"))) throw InputError("train.seed: expected an unsigned integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (cfg.envs_per_iter < 1 || cfg.minibatch < 1 || cfg.epochs < 1 || cfg.iterations < 0) {
    throw InputError("train: counts must be positive");
  }
  if (cfg.envs_per_iter < cfg.minibatch) {
    throw InputError("train: envs_per_iter must be at least the minibatch size");
  }
  if (!(cfg.lr > 0.0) || !(cfg.clip > 0.0) || cfg.entropy_coef < 0.0 || cfg.value_coef < 0.0) {
    throw InputError("train: rates must be positive");
  }
  return cfg;
}

Json TrainConfigToJson(const TrainConfig& cfg) {
  return Json{{"envs_per_iter", cfg.envs_per_iter},
              {"iterations", cfg.iterations},
              {"minibatch", cfg.minibatch},
              {"epochs", cfg.epochs},
              {"clip", cfg.clip},
              {"entropy_coef", cfg.entropy_coef},
              {"value_coef", cfg.value_coef},
              {"lr", cfg.lr},
              {"max_grad_norm", cfg.max_grad_norm},
              {"init_log_std", cfg.init_log_std},
              {"seed", cfg.seed},
              {"checkpoint_every", cfg.checkpoint_every}};
}

Batch CollectBatch(const PolicyNet& net, const OneStepEnv& env, const TrainConfig& cfg,
                   std::uint64_t iteration, int workers, bool serial_reference) {
  Batch batch;
  const int n = cfg.envs_per_iter;
  batch.episodes = serial_reference
                       ? ResetBatchSerial(env, cfg.seed, iteration, n, true)
                       : ResetBatch(env, cfg.seed, iteration, n, true, workers);
  const std::vector<Observation> obs = Observations(batch.episodes);
  const PolicyOutput out = PolicyForward(net, obs);
  batch.results = serial_reference ? ActBatchSerial(env, batch.episodes, out, true)
                                   : ActBatch(env, batch.episodes, out, true, workers);
  batch.items.resize(static_cast<size_t>(n));
  int successes = 0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    StepResult& r = batch.results[k];
    if (!std::isfinite(r.reward)) {
      r.error = true;
      r.diagnostic = "non-finite reward";
      r.reward = 0.0;
      r.success = false;
    }
    if (r.error) ++batch.errors;
    if (r.success) ++successes;
    total += r.reward;
    Transition& t = batch.items[k];
    t.obs = obs[k];
    t.raw = r.raw;
    t.action = r.action;
    t.log_prob_old = r.log_prob;
    t.reward = r.reward;
    t.value_old = out.value[i];
  }
  batch.mean_reward = total / n;
  batch.gsr = static_cast<double>(successes) / n;
  if (batch.errors > 0) {
    spdlog::warn("iteration {}: {} episodes failed and were scored 0", iteration,
                 batch.errors);
  }
  return batch;
}

void ComputeAdvantages(Batch& batch) {
  const auto n = static_cast<double>(batch.items.size());
  if (batch.items.empty()) return;
  double mean = 0.0;
  for (Transition& t : batch.items) {
    t.advantage = t.reward - t.value_old;
    mean += t.advantage;
  }
  mean /= n;
  double var = 0.0;
  for (const Transition& t : batch.items) var += (t.advantage - mean) * (t.advantage - mean);
  const double std = std::sqrt(var / n);
  for (Transition& t : batch.items) t.advantage = (t.advantage - mean) / (std + 1e-8);
}

double ClippedSurrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

MinibatchLoss PpoLoss(const PolicyNet& net, std::span<const Transition> items,
                      const ActionSpace& space, const TrainConfig& cfg) {
  const int b = static_cast<int>(items.size());
  const int a = net.dims().action_dim();
  std::vector<Observation> obs;
  obs.reserve(items.size());
  for (const Transition& t : items) obs.push_back(t.obs);
  ForwardCache cache;
  const PolicyOutput out = PolicyForward(net, obs, &cache);
  const VecX inv_var = (-2.0 * out.log_std).array().exp();

  MinibatchLoss res;
  Eigen::MatrixXd d_mean = Eigen::MatrixXd::Zero(a, b);
  VecX d_log_std = VecX::Zero(a);
  VecX d_value = VecX::Zero(b);
  double surrogate = 0.0, value_loss = 0.0, kl = 0.0;
  int clipped = 0;
  for (int i = 0; i < b; ++i) {
    const Transition& t = items[static_cast<size_t>(i)];
    const VecX mean = out.mean.col(i);
    const double lp = SquashedLogProb(mean, out.log_std, space, t.raw);
    const double ratio = std::exp(lp - t.log_prob_old);
    const double unclipped = ratio * t.advantage;
    const double l = ClippedSurrogate(ratio, t.advantage, cfg.clip);
    surrogate += l;
    kl += t.log_prob_old - lp;
    if (std::abs(ratio - 1.0) > cfg.clip) ++clipped;
    // d(-L)/d logp, nonzero only where the unclipped branch is selected.
    const double g = unclipped <= l ? -t.advantage * ratio / b : 0.0;
    const VecX diff = t.raw - mean;
    d_mean.col(i) = g * diff.cwiseProduct(inv_var);
    d_log_std.array() += g * (diff.array().square() * inv_var.array() - 1.0);
    const double err = out.value[i] - t.reward;
    value_loss += err * err;
    d_value[i] = cfg.value_coef * 2.0 * err / b;
  }
  res.entropy = GaussianEntropy(out.log_std);
  d_log_std.array() -= cfg.entropy_coef;
  res.policy_loss = -surrogate / b;
  res.value_loss = value_loss / b;
  res.clip_fraction = static_cast<double>(clipped) / b;
  res.approx_kl = kl / b;
  res.loss = res.policy_loss + cfg.value_coef * res.value_loss - cfg.entropy_coef * res.entropy;
  PolicyBackward(net, cache, d_mean, d_log_std, d_value, res.grad);
  return res;
}

UpdateStats PpoUpdate(PolicyNet& net, AdamState& adam, const Batch& batch,
                      const ActionSpace& space, const TrainConfig& cfg,
                      std::uint64_t iteration) {
  UpdateStats stats;
  const VecX backup = net.params();
  const AdamState adam_backup = adam;
  const int n = static_cast<int>(batch.items.size());
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = SplitRng(cfg.seed, {iteration, 0x5u});
  const AdamConfig adam_cfg{cfg.lr};
  std::vector<Transition> mb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[static_cast<size_t>(i)],
                order[static_cast<size_t>(UniformIndex(rng, i + 1))]);
    }
    for (int start = 0; start < n; start += cfg.minibatch) {
      const int end = std::min(n, start + cfg.minibatch);
      mb.clear();
      for (int k = start; k < end; ++k) {
        mb.push_back(batch.items[static_cast<size_t>(order[static_cast<size_t>(k)])]);
      }
      MinibatchLoss ml;
      try {
        ml = PpoLoss(net, mb, space, cfg);
      } catch (const std::runtime_error& e) {
        ml.loss = std::numeric_limits<double>::quiet_NaN();
        spdlog::error("iteration {}: {}", iteration, e.what());
      }
      if (!std::isfinite(ml.loss) || !ml.grad.allFinite()) {
        spdlog::error("iteration {}: non-finite loss, update discarded", iteration);
        net.params() = backup;
        adam = adam_backup;
        stats.aborted = true;
        return stats;
      }
      ClipGradNorm(ml.grad, cfg.max_grad_norm);
      AdamStep(adam_cfg, adam, ml.grad, net.params());
      net.ClampLogStd();
      stats.policy_loss += ml.policy_loss;
      stats.value_loss += ml.value_loss;
      stats.clip_fraction += ml.clip_fraction;
      stats.approx_kl += ml.approx_kl;
      ++stats.steps;
    }
  }
  if (stats.steps > 0) {
    stats.policy_loss /= stats.steps;
    stats.value_loss /= stats.steps;
    stats.clip_fraction /= stats.steps;
    stats.approx_kl /= stats.steps;
  }
  stats.entropy = GaussianEntropy(net.LogStd());
  return stats;
}

BatchSummary SummarizeBatch(const Batch& batch) {
  BatchSummary s;
  s.mean_reward = batch.mean_reward;
  s.gsr = batch.gsr;
  s.errors = batch.errors;
  int n_success = 0, matched = 0;
  double d_sum = 0.0;
  bool records = false;
  for (size_t k = 0; k < batch.results.size(); ++k) {
    const StepResult& r = batch.results[k];
    if (!r.has_record) continue;
    records = true;
    if (!r.success) continue;
    ++n_success;
    d_sum += r.record.d_final;
    if (r.record.executed_style == batch.episodes[k].env.condition.style) ++matched;
  }
  if (records && n_success > 0) {
    s.sad = d_sum / n_success;
    s.sa = static_cast<double>(matched) / n_success;
  }
  return s;
}

namespace {

Json OptionalJson(const std::optional<double>& v) {
  return v.has_value() ? Json(*v) : Json(nullptr);
}

}  // namespace

PolicyNet Train(const OneStepEnv& env, const TrainConfig& cfg, const TrainHooks& hooks,
                int workers) {
  PolicyNet net(env.dims());
  net.Initialize(SplitMix64(cfg.seed), cfg.init_log_std);
  AdamState adam;
  int it = 0;
  try {
    for (; it < cfg.iterations; ++it) {
      const auto iteration = static_cast<std::uint64_t>(it);
      Batch batch = CollectBatch(net, env, cfg, iteration, workers);
      ComputeAdvantages(batch);
      const UpdateStats stats =
          PpoUpdate(net, adam, batch, env.action_space(), cfg, iteration);
      const BatchSummary summary = SummarizeBatch(batch);
      spdlog::info("iter {:4d}  reward {:.4f}  gsr {:.3f}  entropy {:.3f}", it,
                   summary.mean_reward, summary.gsr, stats.entropy);
      if (hooks.on_log) {
        hooks.on_log(Json{{"iteration", it},
                          {"mean_reward", summary.mean_reward},
                          {"gsr", summary.gsr},
                          {"sad", OptionalJson(summary.sad)},
                          {"sa", OptionalJson(summary.sa)},
                          {"entropy", stats.entropy},
                          {"clip_fraction", stats.clip_fraction},
                          {"value_loss", stats.value_loss},
                          {"policy_loss", stats.policy_loss},
                          {"approx_kl", stats.approx_kl},
                          {"errors", summary.errors},
                          {"update_aborted", stats.aborted}});
      }
      if (hooks.on_checkpoint && cfg.checkpoint_every > 0 &&
          (it + 1) % cfg.checkpoint_every == 0 && it + 1 < cfg.iterations) {
        hooks.on_checkpoint(net, it + 1);
      }
    }
  } catch (...) {
    if (hooks.on_checkpoint) {
      spdlog::error("training failed at iteration {}; writing a checkpoint", it);
      hooks.on_checkpoint(net, it);
    }
    throw;
  }
  if (hooks.on_checkpoint) hooks.on_checkpoint(net, cfg.iterations);
  return net;
}

double FiniteDiffCheck(const std::function<double(const VecX&)>& loss, const VecX& x,
                       const VecX& analytic, std::span<const std::size_t> indices,
                       double h, double floor) {
  double worst = 0.0;
  VecX p = x;
  for (std::size_t i : indices) {
    const auto k = static_cast<Eigen::Index>(i);
    p[k] = x[k] + h;
    const double up = loss(p);
    p[k] = x[k] - h;
    const double down = loss(p);
    p[k] = x[k];
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[k] - numeric) / denom;
    if (!std::isfinite(rel)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, rel);
  }
  return worst;
}

GradientCheckReport PolicyGradientCheck(std::uint64_t seed, int num_params, double h,
                                        double floor_scale) {
  const PolicyDims dims{4, 6, 16};
  PolicyNet net(dims);
  net.Initialize(seed, -0.5);
  Rng rng = SplitRng(seed, {0x6c4ull});
  // Heads with O(1) outputs so every layer receives a sizeable gradient while
  // the loss stays small enough for central differences to resolve it.
  for (PolicyNet::Layer l : {PolicyNet::kActorMean, PolicyNet::kCriticValue}) {
    const LinearLayer& L = net.layers()[l];
    const double scale = 1.0 / std::sqrt(static_cast<double>(L.in));
    for (std::size_t i = 0; i < L.size(); ++i) {
      net.params()[static_cast<Eigen::Index>(L.offset + i)] = scale * StandardNormal(rng);
    }
  }
  for (int a = 0; a < dims.action_dim(); ++a) {
    net.params()[static_cast<Eigen::Index>(net.log_std_offset()) + a] =
        UniformRange(rng, -1.0, 0.0);
  }

  const int b = 4;
  std::vector<std::shared_ptr<const CloudInput>> clouds;
  for (int c = 0; c < 2; ++c) {
    CloudInput x(kPointInput, dims.num_points);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = StandardNormal(rng);
    }
    clouds.push_back(std::make_shared<const CloudInput>(std::move(x)));
  }
  std::vector<Observation> obs(b);
  VecX w(b), c(b);
  std::vector<VecX> raw(b);
  for (int i = 0; i < b; ++i) {
    obs[static_cast<size_t>(i)].state.resize(dims.state_dim());
    for (Eigen::Index k = 0; k < dims.state_dim(); ++k) {
      obs[static_cast<size_t>(i)].state[k] = StandardNormal(rng);
    }
    obs[static_cast<size_t>(i)].cloud = clouds[static_cast<size_t>(i % 2)];
    w[i] = StandardNormal(rng);
    c[i] = StandardNormal(rng);
    raw[static_cast<size_t>(i)].resize(dims.action_dim());
    for (int a = 0; a < dims.action_dim(); ++a) {
      raw[static_cast<size_t>(i)][a] = StandardNormal(rng);
    }
  }
  const double e = 0.3;

  auto loss_of = [&](const PolicyNet& n) {
    const PolicyOutput out = PolicyForward(n, obs);
    double l = e * GaussianEntropy(out.log_std);
    for (int i = 0; i < b; ++i) {
      l += w[i] * GaussianLogProb(out.mean.col(i), out.log_std, raw[static_cast<size_t>(i)]);
      l += c[i] * out.value[i] * out.value[i];
    }
    return l;
  };

  ForwardCache cache;
  const PolicyOutput out = PolicyForward(net, obs, &cache);
  const VecX inv_var = (-2.0 * out.log_std).array().exp();
  Eigen::MatrixXd d_mean(dims.action_dim(), b);
  VecX d_log_std = VecX::Constant(dims.action_dim(), e);
  VecX d_value(b);
  for (int i = 0; i < b; ++i) {
    const VecX diff = raw[static_cast<size_t>(i)] - out.mean.col(i);
    d_mean.col(i) = w[i] * diff.cwiseProduct(inv_var);
    d_log_std.array() += w[i] * (diff.array().square() * inv_var.array() - 1.0);
    d_value[i] = 2.0 * c[i] * out.value[i];
  }
  VecX grad;
  PolicyBackward(net, cache, d_mean, d_log_std, d_value, grad);

  std::vector<std::size_t> order(net.num_params());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const int total = static_cast<int>(order.size());

  PolicyNet probe = net;
  auto loss = [&](const VecX& p) {
    probe.params() = p;
    return loss_of(probe);
  };
  auto stencil_is_smooth = [&](std::size_t idx) {
    const auto k = static_cast<Eigen::Index>(idx);
    ForwardCache side;
    for (double step : {h, -h}) {
      probe.params() = net.params();
      probe.params()[k] += step;
      PolicyForward(probe, obs, &side);
      if (!SameActivationPattern(cache, side)) return false;
    }
    return true;
  };
  GradientCheckReport report;
  // Central differences carry roundoff of order eps * |L| / h; gradients
  // below the floor are compared against it instead of their own size.
  const double floor = floor_scale * std::max(1.0, std::abs(loss_of(net)));
  report.floor = floor;
  for (int i = 0; i < total && report.num_checked < num_params; ++i) {
    const int j = i + UniformIndex(rng, total - i);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    const std::size_t idx = order[static_cast<size_t>(i)];
    if (!stencil_is_smooth(idx)) {
      ++report.num_skipped;
      continue;
    }
    ++report.num_checked;
    const std::size_t one[] = {idx};
    const double rel = FiniteDiffCheck(loss, net.params(), grad, one, h, floor);
    if (rel > report.max_rel_error || report.worst_index < 0) {
      const auto k = static_cast<Eigen::Index>(idx);
      VecX p = net.params();
      p[k] += h;
      const double up = loss(p);
      p[k] -= 2.0 * h;
      const double down = loss(p);
      report.max_rel_error = std::max(report.max_rel_error, rel);
      report.worst_index = static_cast<int>(idx);
      report.worst_analytic = grad[k];
      report.worst_numeric = (up - down) / (2.0 * h);
    }
  }
  return report;
}

}  // namespace fungrasp
