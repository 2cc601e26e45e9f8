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

#ifndef FUNGRASP_OPTIMIZER_H_
#define FUNGRASP_OPTIMIZER_H_

#include <cstdint>

#include "fungrasp/geometry.h"

namespace fungrasp {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  VecX m;
  VecX v;
  std::int64_t step = 0;

  void Reset(Eigen::Index n) {
    m = VecX::Zero(n);
    v = VecX::Zero(n);
    step = 0;
  }
};

void AdamStep(const AdamConfig& cfg, AdamState& state, const VecX& grad, VecX& params);

// Rescales grad in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
double ClipGradNorm(VecX& grad, double max_norm);

}  // namespace fungrasp

#endif  // FUNGRASP_OPTIMIZER_H_
