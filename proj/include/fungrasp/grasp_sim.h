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

#ifndef FUNGRASP_GRASP_SIM_H_
#define FUNGRASP_GRASP_SIM_H_

#include <span>
#include <string>
#include <vector>

#include "fungrasp/demo.h"
#include "fungrasp/force_closure.h"
#include "fungrasp/geometry.h"
#include "fungrasp/hand.h"
#include "fungrasp/json_util.h"
#include "fungrasp/object.h"
#include "fungrasp/reward.h"
#include "fungrasp/rng.h"

namespace fungrasp {

struct SimConfig {
  double mu = 0.5;
  double eta = 0.2;
  double delta_c = 0.005;        // contact margin, meters
  double table_tol = 0.002;      // meters
  double crush_factor = 1.5;     // max penetration / sphere radius before T_l
  double square_half_width = 0.25;
  int min_mask_contacts = 2;
};

SimConfig ParseSimConfig(const Json& j, const SimConfig& defaults);
Json SimConfigToJson(const SimConfig& cfg);

// An object ready for episodes: the model and its affordance weights.
struct SceneObject {
  ObjectModel model;
  AffordanceDistribution affordance;
};

struct Condition {
  Vec3 p_afford = Vec3::Zero();  // object frame
  int afford_index = 0;
  int style = 0;
  VecX q_style_used;  // canonical style joints, disturbed in training
};

struct EnvState {
  int object_index = 0;
  Pose object_pose;
  Condition condition;
};

// Randomizes the object (uniform over the set), its planar pose, the
// affordance point and the style. In training mode the style joints are
// perturbed by N(0, sigma_style^2).
EnvState ResetEnv(std::span<const SceneObject> objects, const StyleSet& styles,
                  const HandSpec& spec, const SimConfig& cfg,
                  double sigma_style, Rng& rng, bool train_mode);

struct Contact {
  int finger = 0;
  Vec3 point = Vec3::Zero();   // world
  Vec3 normal = Vec3::UnitZ(); // world, outward object normal
  double penetration = 0.0;
};

// Nearest cloud point for each finger sphere; a contact is emitted when the
// signed distance is within radius + delta_c, keeping the deepest one per
// finger. Sorted by finger.
std::vector<Contact> DetectContacts(const HandFrames& frames,
                                    const ObjectModel& obj,
                                    const Pose& object_pose, double delta_c);

// Largest penetration / radius ratio over all hand spheres (finger and palm).
double MaxPenetrationRatio(const HandFrames& frames, const ObjectModel& obj,
                           const Pose& object_pose);

// Mean fingertip position of the fingers in `mask`.
Vec3 StyleContactPoint(const HandFrames& frames, std::span<const int> mask);

// True iff any sphere center is lower than its radius - tol.
bool CheckTableCollision(const HandFrames& frames, double tol);

struct SuccessReport {
  bool success = false;
  std::string reason;  // empty on success
};

// Quasi-static grasp test at the grasp frame: enough contact-mask fingers in
// contact, friction-pyramid wrench feasibility for gravity and perturbed
// loads, no table collision.
SuccessReport GraspSuccess(std::span<const Contact> contacts,
                           std::span<const int> contact_mask,
                           const Vec3& object_center_world, double obj_bb,
                           bool table_collision, const SimConfig& cfg);

struct RolloutRecord {
  bool success = false;
  std::vector<double> d_series;
  double d_min = 0.0;
  double d_final = 0.0;
  VecX q_final;
  VecX q_star;
  VecX q_style;  // canonical joints of the conditioned style
  std::vector<Contact> contacts_at_grasp;
  int executed_style = 0;
  bool table_collision = false;
  bool crushed = false;
  double obj_bb = 0.0;
  std::string failure_reason;
  RewardTerms reward_terms;
};

// Replays the edited demonstration against the object. Pure: identical
// inputs give identical records. After a successful grasp the object is
// carried rigidly with the wrist for the remaining frames.
RolloutRecord Rollout(const EnvState& env, const ObjectModel& obj,
                      const Demonstration& demo, const EditAction& action,
                      const HandSpec& spec, const StyleSet& styles,
                      const SimConfig& cfg);

// Same, also returning the executed trajectory (world ee poses and joints).
RolloutRecord Rollout(const EnvState& env, const ObjectModel& obj,
                      const Demonstration& demo, const EditAction& action,
                      const HandSpec& spec, const StyleSet& styles,
                      const SimConfig& cfg, EditedTrajectory* trajectory);

}  // namespace fungrasp

#endif  // FUNGRASP_GRASP_SIM_H_
