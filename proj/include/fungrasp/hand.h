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

#ifndef FUNGRASP_HAND_H_
#define FUNGRASP_HAND_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fungrasp/geometry.h"
#include "fungrasp/json_util.h"

namespace fungrasp {

// One link of a finger chain: a revolute joint about `axis` (chain-local
// frame) followed by a rigid offset of `length` along the local +x axis.
// A collision sphere sits at the link's distal end.
struct Segment {
  std::string name;
  double length = 0.0;
  Vec3 axis = Vec3::UnitY();
  double radius = 0.0;
  // Active joints index into the hand joint vector. Passive joints follow
  // angle = coupling * q[source_joint].
  int joint = -1;
  bool passive = false;
  int source_joint = -1;
  double coupling = 1.0;
};

struct Finger {
  std::string name;
  Pose base;  // wrist-relative
  std::vector<Segment> segments;
  double tip_radius = 0.0;
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct HandSpec {
  std::string name;
  int num_joints = 0;
  std::vector<Finger> fingers;
  std::vector<Sphere> palm;  // wrist-relative centers
  std::vector<std::string> joint_names;
  VecX lower;
  VecX upper;

  int num_fingers() const { return static_cast<int>(fingers.size()); }
  int FingerIndex(const std::string& name) const;
};

struct Style {
  std::string id;
  int index = 0;
  VecX q;
  std::vector<int> contact_mask;  // finger indices, ascending
};

struct StyleSet {
  std::string hand;
  std::vector<Style> styles;

  int size() const { return static_cast<int>(styles.size()); }
};

struct SphereFrame {
  int finger = 0;
  int segment = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

// World-frame realization of a hand configuration.
struct HandFrames {
  Pose wrist;
  std::vector<SphereFrame> spheres;  // finger spheres, chain order
  std::vector<Vec3> fingertips;      // one per finger
  std::vector<Sphere> palm;
};

HandSpec ParseHandSpec(const Json& j, const std::string& context);
HandSpec LoadHandSpec(const std::filesystem::path& path);
Json HandSpecToJson(const HandSpec& spec);

StyleSet ParseStyles(const Json& j, const HandSpec& spec,
                     const std::string& context);
StyleSet LoadStyles(const std::filesystem::path& path, const HandSpec& spec);
Json StylesToJson(const StyleSet& styles);

HandFrames ForwardKinematics(const HandSpec& spec, const Pose& wrist,
                             const VecX& q);
// In-place variant reusing `out`'s storage; the rollout loop calls FK for
// every frame.
void ForwardKinematicsInto(const HandSpec& spec, const Pose& wrist,
                           const VecX& q, HandFrames& out);

VecX ClampToLimits(const HandSpec& spec, const VecX& q);

// Joint vector mapped to [0, 1] per joint by the limits.
VecX NormalizeJoints(const HandSpec& spec, const VecX& q);

// Nearest canonical style in limit-normalized joint space; ties go to the
// lowest index.
int ClassifyStyle(const HandSpec& spec, const VecX& q_final,
                  std::span<const Style> styles);

// One-hot encoding of a style index.
VecX StyleOneHot(int index, int num_styles);

}  // namespace fungrasp

#endif  // FUNGRASP_HAND_H_
