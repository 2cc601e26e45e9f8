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

#ifndef FUNGRASP_DEMO_H_
#define FUNGRASP_DEMO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "fungrasp/geometry.h"
#include "fungrasp/hand.h"
#include "fungrasp/json_util.h"
#include "fungrasp/rng.h"

namespace fungrasp {

struct DemoFrame {
  Pose ee_in_object;  // end effector expressed in the object frame
  VecX q;             // reference hand joints
};

// A single recorded grasp: frames 0..T_D with the grasp closing at frame
// grasp_index (T_l).
struct Demonstration {
  std::string hand;
  std::vector<DemoFrame> frames;
  int grasp_index = 0;
  int clamped_values = 0;  // joints pulled back inside limits at load time

  int last_index() const { return static_cast<int>(frames.size()) - 1; }
  const VecX& q0() const { return frames.front().q; }
  const VecX& q_grasp() const { return frames[static_cast<size_t>(grasp_index)].q; }
};

Demonstration ParseDemo(const Json& j, const HandSpec& spec,
                        const std::string& context);
Demonstration LoadDemo(const std::filesystem::path& path, const HandSpec& spec);
Json DemoToJson(const Demonstration& demo);

struct ActionBounds {
  double b_t = 0.10;  // meters, per axis
  double b_r = 0.8;   // radians, bound on |dr|
  double b_q = 0.3;   // radians, per joint
  double k_min = 0.6;
  double k_max = 1.4;
};

// The policy's edit: a rigid wrist offset in the object frame plus a joint
// residual and a scale on the style's canonical joints.
struct EditAction {
  Vec3 dt = Vec3::Zero();
  AxisAngle dr;
  VecX dq;
  double k = 1.0;

  static EditAction Identity(int num_joints) {
    EditAction a;
    a.dq = VecX::Zero(num_joints);
    return a;
  }
  Pose WristOffset() const { return Pose{dt, AxisAngleToQuat(dr)}; }
};

bool WithinBounds(const EditAction& a, const ActionBounds& bounds,
                  double tol = 1e-12);

// q* = clamp(k * style_q + dq).
VecX TargetJointConfig(const VecX& style_q, double k, const VecX& dq,
                       const HandSpec& spec);

inline constexpr double kStaticJointEps = 1e-9;

// Per-joint fraction f = (q* - q0) / (q_Tl - q0). Joints the demonstration
// never moves between frame 0 and T_l are flagged static and carry f = 0.
struct InterpolationFraction {
  VecX f;
  std::vector<bool> is_static;
};

InterpolationFraction ComputeInterpolationFraction(const VecX& q0,
                                                   const VecX& q_grasp,
                                                   const VecX& q_star);

// Joint targets at frame t before clamping. Moving joints follow
// q0 + f * (q_t^ref - q0) over the whole demo (the lift phase keeps the
// demo's post-grasp deltas scaled by f). Static joints ramp linearly from q0
// to q* and reach it at T_l.
VecX InterpolateJointsUnclamped(const Demonstration& demo,
                                const InterpolationFraction& frac, int t,
                                const VecX& q_star);
VecX InterpolateJoints(const Demonstration& demo,
                       const InterpolationFraction& frac, int t,
                       const VecX& q_star, const HandSpec& spec);

// World end-effector poses: object_pose * wrist_offset * p_t for every frame.
std::vector<Pose> EditWrist(const Demonstration& demo, const EditAction& action,
                            const Pose& object_pose);

// style_q + N(0, sigma^2) per joint, clamped.
VecX DisturbStyle(const VecX& style_q, double sigma, Rng& rng,
                  const HandSpec& spec);

struct EditedFrame {
  Pose ee_world;
  VecX q;
};

struct EditedTrajectory {
  std::vector<EditedFrame> frames;
  VecX q_star;
  InterpolationFraction fraction;
};

EditedTrajectory EditDemonstration(const Demonstration& demo,
                                   const EditAction& action,
                                   const VecX& style_q, const Pose& object_pose,
                                   const HandSpec& spec);

struct DemoSummary {
  int num_frames = 0;
  int grasp_index = 0;
  int num_joints = 0;
  double path_length = 0.0;        // end-effector path in the object frame
  double approach_height = 0.0;    // ee z at frame 0 minus ee z at T_l
  double lift_height = 0.0;        // ee z at the last frame minus at T_l
  std::vector<std::string> static_joints;
  VecX q_min, q_max;
};

DemoSummary SummarizeDemo(const Demonstration& demo, const HandSpec& spec);

}  // namespace fungrasp

#endif  // FUNGRASP_DEMO_H_
