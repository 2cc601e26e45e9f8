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

#include "fungrasp/grasp_sim.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fungrasp/error.h"

namespace fungrasp {

SimConfig ParseSimConfig(const Json& j, const SimConfig& defaults) {
  SimConfig cfg = defaults;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw InputError("sim: expected an object");
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = RequireNumber(j.at(key), std::string("sim.") + key);
  };
  num("mu", cfg.mu);
  num("eta", cfg.eta);
  num("delta_c", cfg.delta_c);
  num("table_tol", cfg.table_tol);
  num("crush_factor", cfg.crush_factor);
  num("square_half_width", cfg.square_half_width);
  if (j.contains("min_mask_contacts")) {
    cfg.min_mask_contacts = static_cast<int>(
        RequireNumber(j.at("min_mask_contacts"), "sim.min_mask_contacts"));
  }
  if (cfg.mu < 0.0 || cfg.eta < 0.0 || cfg.delta_c < 0.0 ||
      cfg.square_half_width < 0.0 || cfg.crush_factor <= 0.0) {
    throw InputError("sim: parameters must be non-negative");
  }
  return cfg;
}

Json SimConfigToJson(const SimConfig& cfg) {
  return Json{{"mu", cfg.mu},
              {"eta", cfg.eta},
              {"delta_c", cfg.delta_c},
              {"table_tol", cfg.table_tol},
              {"crush_factor", cfg.crush_factor},
              {"square_half_width", cfg.square_half_width},
              {"min_mask_contacts", cfg.min_mask_contacts}};
}

EnvState ResetEnv(std::span<const SceneObject> objects, const StyleSet& styles,
                  const HandSpec& spec, const SimConfig& cfg,
                  double sigma_style, Rng& rng, bool train_mode) {
  if (objects.empty()) throw std::invalid_argument("reset: empty object set");
  EnvState env;
  env.object_index = UniformIndex(rng, static_cast<int>(objects.size()));
  const double h = cfg.square_half_width;
  const double x = UniformRange(rng, -h, h);
  const double y = UniformRange(rng, -h, h);
  const double yaw_draw = UniformRange(rng, -M_PI, M_PI);
  // A zero-size square pins the object at the origin with no yaw.
  const double yaw = h > 0.0 ? yaw_draw : 0.0;
  env.object_pose = Pose{Vec3(x, y, 0.0), YawQuat(yaw)};

  const SceneObject& obj = objects[static_cast<size_t>(env.object_index)];
  const AffordanceSample sample = SampleAffordance(obj.affordance, obj.model, rng);
  env.condition.p_afford = sample.point;
  env.condition.afford_index = sample.index;
  env.condition.style = UniformIndex(rng, styles.size());
  const VecX& q = styles.styles[static_cast<size_t>(env.condition.style)].q;
  env.condition.q_style_used =
      train_mode ? DisturbStyle(q, sigma_style, rng, spec) : q;
  return env;
}

namespace {

struct NearestHit {
  int index = -1;
  double signed_distance = std::numeric_limits<double>::infinity();
};

// Signed distance from `p` (object frame) to the nearest cloud point, the
// sign taken from that point's normal. Points farther than `cutoff` outside
// the bounding box are skipped.
NearestHit NearestSurfacePoint(const ObjectModel& obj, const Vec3& p,
                               double cutoff) {
  NearestHit hit;
  if ((p.array() < obj.bb_min.array() - cutoff).any() ||
      (p.array() > obj.bb_max.array() + cutoff).any()) {
    return hit;
  }
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Index n = obj.points.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (obj.points.col(i) - p).squaredNorm();
    if (d < best) {
      best = d;
      hit.index = static_cast<int>(i);
    }
  }
  const Vec3 diff = p - obj.points.col(hit.index);
  const double dist = std::sqrt(best);
  hit.signed_distance = diff.dot(obj.normals.col(hit.index)) < 0.0 ? -dist : dist;
  return hit;
}

}  // namespace

std::vector<Contact> DetectContacts(const HandFrames& frames,
                                    const ObjectModel& obj,
                                    const Pose& object_pose, double delta_c) {
  const Pose to_object = InvertPose(object_pose);
  std::vector<Contact> best;
  for (const SphereFrame& s : frames.spheres) {
    const Vec3 local = TransformPoint(to_object, s.center);
    const NearestHit hit = NearestSurfacePoint(obj, local, s.radius + delta_c);
    if (hit.index < 0 || hit.signed_distance > s.radius + delta_c) continue;
    Contact c;
    c.finger = s.finger;
    c.point = TransformPoint(object_pose, obj.points.col(hit.index));
    c.normal = RotateVector(object_pose, obj.normals.col(hit.index));
    c.penetration = std::max(0.0, s.radius - hit.signed_distance);
    auto it = std::find_if(best.begin(), best.end(),
                           [&](const Contact& o) { return o.finger == c.finger; });
    if (it == best.end()) {
      best.push_back(c);
    } else if (c.penetration > it->penetration) {
      *it = c;
    }
  }
  std::sort(best.begin(), best.end(),
            [](const Contact& a, const Contact& b) { return a.finger < b.finger; });
  return best;
}

double MaxPenetrationRatio(const HandFrames& frames, const ObjectModel& obj,
                           const Pose& object_pose) {
  const Pose to_object = InvertPose(object_pose);
  double worst = 0.0;
  auto visit = [&](const Vec3& center, double radius) {
    const NearestHit hit =
        NearestSurfacePoint(obj, TransformPoint(to_object, center), radius);
    if (hit.index < 0 || hit.signed_distance >= radius) return;
    worst = std::max(worst, (radius - hit.signed_distance) / radius);
  };
  for (const SphereFrame& s : frames.spheres) visit(s.center, s.radius);
  for (const Sphere& s : frames.palm) visit(s.center, s.radius);
  return worst;
}

Vec3 StyleContactPoint(const HandFrames& frames, std::span<const int> mask) {
  if (mask.empty()) throw std::invalid_argument("style contact point: empty mask");
  Vec3 sum = Vec3::Zero();
  for (int f : mask) sum += frames.fingertips[static_cast<size_t>(f)];
  return sum / static_cast<double>(mask.size());
}

bool CheckTableCollision(const HandFrames& frames, double tol) {
  for (const SphereFrame& s : frames.spheres) {
    if (s.center.z() < s.radius - tol) return true;
  }
  for (const Sphere& s : frames.palm) {
    if (s.center.z() < s.radius - tol) return true;
  }
  return false;
}

SuccessReport GraspSuccess(std::span<const Contact> contacts,
                           std::span<const int> contact_mask,
                           const Vec3& object_center_world, double obj_bb,
                           bool table_collision, const SimConfig& cfg) {
  for (const Contact& c : contacts) {
    if (!c.normal.allFinite() || !c.point.allFinite() || c.normal.norm() < 1e-9) {
      return {false, "degenerate contact normal at finger " + std::to_string(c.finger)};
    }
  }
  int mask_fingers = 0;
  for (int f : contact_mask) {
    if (std::any_of(contacts.begin(), contacts.end(),
                    [&](const Contact& c) { return c.finger == f; })) {
      ++mask_fingers;
    }
  }
  if (mask_fingers < cfg.min_mask_contacts) {
    return {false, "only " + std::to_string(mask_fingers) +
                       " contact-mask fingers in contact"};
  }
  if (table_collision) return {false, "table collision"};
  std::vector<ContactPoint> points;
  points.reserve(contacts.size());
  for (const Contact& c : contacts) points.push_back({c.point, c.normal});
  ClosureQuery query;
  query.mu = cfg.mu;
  query.eta = cfg.eta;
  query.object_center = object_center_world;
  query.torque_scale = 0.5 * obj_bb;
  const ClosureReport closure = CheckGraspWrenches(points, query);
  if (!closure.feasible) {
    return {false, "wrench infeasible for load " + std::to_string(closure.failed_load)};
  }
  return {true, ""};
}

RolloutRecord Rollout(const EnvState& env, const ObjectModel& obj,
                      const Demonstration& demo, const EditAction& action,
                      const HandSpec& spec, const StyleSet& styles,
                      const SimConfig& cfg) {
  return Rollout(env, obj, demo, action, spec, styles, cfg, nullptr);
}

RolloutRecord Rollout(const EnvState& env, const ObjectModel& obj,
                      const Demonstration& demo, const EditAction& action,
                      const HandSpec& spec, const StyleSet& styles,
                      const SimConfig& cfg, EditedTrajectory* trajectory) {
  if (demo.q0().size() != spec.num_joints ||
      env.condition.q_style_used.size() != spec.num_joints ||
      action.dq.size() != spec.num_joints) {
    throw std::invalid_argument("rollout: joint dimension mismatch");
  }
  RolloutRecord rec;
  rec.obj_bb = obj.obj_bb;
  EditedTrajectory traj =
      EditDemonstration(demo, action, env.condition.q_style_used,
                        env.object_pose, spec);
  rec.q_star = traj.q_star;
  const Style& style = styles.styles[static_cast<size_t>(env.condition.style)];
  rec.q_style = style.q;
  const Vec3 afford_world = TransformPoint(env.object_pose, env.condition.p_afford);
  const Vec3 center_world = TransformPoint(env.object_pose, obj.centroid);

  const int grasp_t = demo.grasp_index;
  const int last_t = demo.last_index();
  rec.d_series.reserve(static_cast<size_t>(last_t + 1));
  HandFrames frames;
  Pose release;  // maps the grasp-frame wrist onto the current wrist
  bool holding = false;
  for (int t = 0; t <= last_t; ++t) {
    const EditedFrame& f = traj.frames[static_cast<size_t>(t)];
    ForwardKinematicsInto(spec, f.ee_world, f.q, frames);
    if (t <= grasp_t) {
      if (!rec.crushed &&
          MaxPenetrationRatio(frames, obj, env.object_pose) > cfg.crush_factor) {
        rec.crushed = true;
      }
      if (!rec.table_collision && CheckTableCollision(frames, cfg.table_tol)) {
        rec.table_collision = true;
      }
    }
    if (t == grasp_t) {
      rec.contacts_at_grasp =
          DetectContacts(frames, obj, env.object_pose, cfg.delta_c);
      if (rec.crushed) {
        rec.failure_reason = "hand penetrates the object before the grasp closes";
      } else {
        const SuccessReport report =
            GraspSuccess(rec.contacts_at_grasp, style.contact_mask, center_world,
                         obj.obj_bb, rec.table_collision, cfg);
        rec.success = report.success;
        rec.failure_reason = report.reason;
      }
      holding = rec.success;
      release = InvertPose(f.ee_world);
    }
    Vec3 target = afford_world;
    if (holding && t > grasp_t) {
      target = TransformPoint(ComposePose(f.ee_world, release), afford_world);
    }
    rec.d_series.push_back(
        (StyleContactPoint(frames, style.contact_mask) - target).norm());
  }
  rec.d_min = *std::min_element(rec.d_series.begin(), rec.d_series.end());
  rec.d_final = rec.d_series.back();
  rec.q_final = traj.frames.back().q;
  rec.executed_style = ClassifyStyle(spec, rec.q_final, styles.styles);
  if (!std::isfinite(rec.d_min) || !std::isfinite(rec.d_final)) {
    rec.success = false;
    rec.failure_reason = "non-finite affordance distance";
  }
  if (trajectory != nullptr) *trajectory = std::move(traj);
  return rec;
}

}  // namespace fungrasp
