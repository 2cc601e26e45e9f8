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

#ifndef FUNGRASP_ASSETS_H_
#define FUNGRASP_ASSETS_H_

// Generators for the bundled hands, styles, demonstrations and cameras. The
// files under assets/ are written from these by tools/generate_assets.

#include "fungrasp/geometry.h"
#include "fungrasp/json_util.h"

namespace fungrasp {

// Hand frame: +x along the straight fingers, +z is the palm normal (fingers
// flex toward +z), +y lateral.
Json InspireLikeHandJson();
Json InspireLikeStylesJson();
Json ShadowLikeHandJson();
Json ShadowLikeStylesJson();

struct TopDownDemoParams {
  Vec3 grasp_position = Vec3::Zero();  // wrist at T_l, object frame
  double approach_height = 0.15;
  double lift_height = 0.10;
  int descend_frames = 20;
  int grasp_index = 30;
  int num_frames = 41;  // T_D + 1
};

// Palm-down approach, linear finger closure from q_open to q_grasp, lift.
Json TopDownDemoJson(const std::string& hand, const VecX& q_open,
                     const VecX& q_grasp, const TopDownDemoParams& params);

Json InspireLikeDemoJson();
Json ShadowLikeDemoJson();

// Two cameras looking at the workspace origin from opposite diagonals.
Json DefaultCamerasJson();

}  // namespace fungrasp

#endif  // FUNGRASP_ASSETS_H_
