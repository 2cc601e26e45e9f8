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

#include "fungrasp/kernels.h"

#include <exception>

#include <omp.h>

namespace fungrasp {

int ResolveWorkers(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

namespace {

void ResetOne(const OneStepEnv& env, std::uint64_t seed, std::uint64_t stream,
              int i, bool train_mode, Episode& ep) {
  ep.index = i;
  ep.rng = SplitRng(seed, {stream, static_cast<std::uint64_t>(i)});
  env.Reset(ep, train_mode);
}

void StepOne(const OneStepEnv& env, const Episode& ep, const VecX& action,
             StepResult& r) {
  r.action = action;
  try {
    env.Step(ep, action, r);
  } catch (const std::exception& e) {
    r.reward = 0.0;
    r.success = false;
    r.error = true;
    r.diagnostic = e.what();
  }
}

void ActOne(const OneStepEnv& env, Episode& ep, const PolicyOutput& out,
            bool stochastic, StepResult& r) {
  const VecX mean = out.mean.col(ep.index);
  const ActionSpace& space = env.action_space();
  if (stochastic) {
    ActionSample s = SampleAction(mean, out.log_std, space, ep.rng);
    r.raw = std::move(s.raw);
    r.log_prob = s.log_prob;
    StepOne(env, ep, s.action, r);
  } else {
    r.raw = mean;
    r.log_prob = SquashedLogProb(mean, out.log_std, space, mean);
    StepOne(env, ep, Squash(space, mean), r);
  }
}

// Runs body(i) for i in [0, n) on the given number of threads and rethrows
// the first exception afterwards.
template <typename Body>
void ParallelFor(int n, int workers, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(ResolveWorkers(workers))
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<Episode> ResetBatch(const OneStepEnv& env, std::uint64_t seed,
                                std::uint64_t stream, int count, bool train_mode,
                                int workers) {
  std::vector<Episode> eps(static_cast<size_t>(count));
  ParallelFor(count, workers, [&](int i) {
    ResetOne(env, seed, stream, i, train_mode, eps[static_cast<size_t>(i)]);
  });
  return eps;
}

std::vector<Episode> ResetBatchSerial(const OneStepEnv& env, std::uint64_t seed,
                                      std::uint64_t stream, int count,
                                      bool train_mode) {
  std::vector<Episode> eps(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    ResetOne(env, seed, stream, i, train_mode, eps[static_cast<size_t>(i)]);
  }
  return eps;
}

std::vector<StepResult> ActBatch(const OneStepEnv& env, std::vector<Episode>& episodes,
                                 const PolicyOutput& out, bool stochastic,
                                 int workers) {
  std::vector<StepResult> results(episodes.size());
  ParallelFor(static_cast<int>(episodes.size()), workers, [&](int i) {
    const auto k = static_cast<size_t>(i);
    ActOne(env, episodes[k], out, stochastic, results[k]);
  });
  return results;
}

std::vector<StepResult> ActBatchSerial(const OneStepEnv& env,
                                       std::vector<Episode>& episodes,
                                       const PolicyOutput& out, bool stochastic) {
  std::vector<StepResult> results(episodes.size());
  for (size_t k = 0; k < episodes.size(); ++k) {
    ActOne(env, episodes[k], out, stochastic, results[k]);
  }
  return results;
}

std::vector<StepResult> StepBatch(const OneStepEnv& env,
                                  const std::vector<Episode>& episodes,
                                  const std::vector<VecX>& actions, int workers) {
  std::vector<StepResult> results(episodes.size());
  ParallelFor(static_cast<int>(episodes.size()), workers, [&](int i) {
    const auto k = static_cast<size_t>(i);
    StepOne(env, episodes[k], actions[k], results[k]);
  });
  return results;
}

std::vector<StepResult> StepBatchSerial(const OneStepEnv& env,
                                        const std::vector<Episode>& episodes,
                                        const std::vector<VecX>& actions) {
  std::vector<StepResult> results(episodes.size());
  for (size_t k = 0; k < episodes.size(); ++k) {
    StepOne(env, episodes[k], actions[k], results[k]);
  }
  return results;
}

std::vector<Observation> Observations(const std::vector<Episode>& episodes) {
  std::vector<Observation> obs;
  obs.reserve(episodes.size());
  for (const Episode& e : episodes) obs.push_back(e.obs);
  return obs;
}

}  // namespace fungrasp
