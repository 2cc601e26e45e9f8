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

// Serial reference vs OpenMP batch kernels on the bundled inspire-like setup.
// The range argument is the worker count; 0 runs the serial reference.

#include <vector>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "fungrasp/config.h"
#include "fungrasp/kernels.h"

namespace fungrasp {
namespace {

constexpr int kBatch = 256;
constexpr std::uint64_t kSeed = 1;

const GraspEnv& Env() {
  static const GraspEnv* env = [] {
    spdlog::set_level(spdlog::level::warn);
    const RunConfig cfg =
        LoadRunConfig(std::filesystem::path(FUNGRASP_SOURCE_DIR) / "configs/inspire_toy.json");
    return new GraspEnv(BuildSetup(cfg));
  }();
  return *env;
}

const PolicyNet& Net() {
  static const PolicyNet* net = [] {
    auto* n = new PolicyNet(Env().dims());
    n->Initialize(kSeed, -3.0);
    return n;
  }();
  return *net;
}

std::vector<Episode> Reset(int workers) {
  return workers == 0 ? ResetBatchSerial(Env(), kSeed, 0, kBatch, true)
                      : ResetBatch(Env(), kSeed, 0, kBatch, true, workers);
}

void BM_ResetBatch(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Reset(workers));
  state.SetItemsProcessed(state.iterations() * kBatch);
}

void BM_ActBatch(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  const std::vector<Episode> fresh = Reset(1);
  const std::vector<Observation> obs = Observations(fresh);
  const PolicyOutput out = PolicyForward(Net(), obs);
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<Episode> episodes = fresh;
    state.ResumeTiming();
    benchmark::DoNotOptimize(workers == 0 ? ActBatchSerial(Env(), episodes, out, true)
                                          : ActBatch(Env(), episodes, out, true, workers));
  }
  state.SetItemsProcessed(state.iterations() * kBatch);
}

void BM_StepBatch(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  const std::vector<Episode> episodes = Reset(1);
  const ActionSpace& space = Env().action_space();
  const std::vector<VecX> actions(kBatch, 0.5 * (space.lo + space.hi));
  for (auto _ : state) {
    benchmark::DoNotOptimize(workers == 0 ? StepBatchSerial(Env(), episodes, actions)
                                          : StepBatch(Env(), episodes, actions, workers));
  }
  state.SetItemsProcessed(state.iterations() * kBatch);
}

BENCHMARK(BM_ResetBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ActBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fungrasp

BENCHMARK_MAIN();
