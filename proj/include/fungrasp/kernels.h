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

#ifndef FUNGRASP_KERNELS_H_
#define FUNGRASP_KERNELS_H_

// Batched episode kernels. Each has an OpenMP version and a serial reference
// with identical results: every episode owns an rng split from
// (seed, stream, episode index) and writes only its own slot.

#include <cstdint>
#include <vector>

#include "fungrasp/env.h"
#include "fungrasp/policy.h"

namespace fungrasp {

// Stream tag for evaluation episodes, disjoint from training iterations.
inline constexpr std::uint64_t kEvalStream = 0xe7a1000000000000ull;

// workers <= 0 uses every available thread.
int ResolveWorkers(int workers);

std::vector<Episode> ResetBatch(const OneStepEnv& env, std::uint64_t seed,
                                std::uint64_t stream, int count, bool train_mode,
                                int workers);
std::vector<Episode> ResetBatchSerial(const OneStepEnv& env, std::uint64_t seed,
                                      std::uint64_t stream, int count,
                                      bool train_mode);

// Acts on every episode with the policy output column of the same index:
// a sample drawn from the episode rng when stochastic, otherwise the squashed
// mean. Step errors become zero-reward results with a diagnostic.
std::vector<StepResult> ActBatch(const OneStepEnv& env, std::vector<Episode>& episodes,
                                 const PolicyOutput& out, bool stochastic,
                                 int workers);
std::vector<StepResult> ActBatchSerial(const OneStepEnv& env,
                                       std::vector<Episode>& episodes,
                                       const PolicyOutput& out, bool stochastic);

// Steps fixed actions, one per episode.
std::vector<StepResult> StepBatch(const OneStepEnv& env,
                                  const std::vector<Episode>& episodes,
                                  const std::vector<VecX>& actions, int workers);
std::vector<StepResult> StepBatchSerial(const OneStepEnv& env,
                                        const std::vector<Episode>& episodes,
                                        const std::vector<VecX>& actions);

std::vector<Observation> Observations(const std::vector<Episode>& episodes);

}  // namespace fungrasp

#endif  // FUNGRASP_KERNELS_H_
