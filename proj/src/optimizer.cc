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

#include "fungrasp/optimizer.h"

#include <cmath>

namespace fungrasp {

void AdamStep(const AdamConfig& cfg, AdamState& state, const VecX& grad, VecX& params) {
  if (state.m.size() != params.size()) state.Reset(params.size());
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= cfg.lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + cfg.eps);
}

double ClipGradNorm(VecX& grad, double max_norm) {
  const double n = grad.norm();
  if (max_norm > 0.0 && n > max_norm) grad *= max_norm / n;
  return n;
}

}  // namespace fungrasp
