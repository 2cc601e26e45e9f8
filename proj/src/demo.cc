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

#include "fungrasp/demo.h"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "fungrasp/error.h"

namespace fungrasp {

Demonstration ParseDemo(const Json& j, const HandSpec& spec,
                        const std::string& context) {
  Demonstration demo;
  const Json& hand = RequireField(j, "hand", context);
  if (!hand.is_string()) throw InputError(context + ".hand: expected a string");
  demo.hand = hand.get<std::string>();
  const Json& frames = RequireField(j, "frames", context);
  if (!frames.is_array()) throw InputError(context + ".frames: expected an array");
  if (frames.size() < 3) {
    throw InputError(context + ": demonstration needs T_D >= 2 (got " +
                     std::to_string(frames.size()) + " frames)");
  }
  constexpr double kMarginal = 1e-6;
  for (size_t i = 0; i < frames.size(); ++i) {
    const std::string fctx = context + ".frames[" + std::to_string(i) + "]";
    DemoFrame f;
    f.ee_in_object = ParsePose(RequireField(frames[i], "p", fctx), fctx + ".p");
    f.q = ParseVecX(RequireField(frames[i], "q", fctx), fctx + ".q");
    if (f.q.size() != spec.num_joints) {
      throw InputError(fctx + ".q: joint dimension " + std::to_string(f.q.size()) +
                       " does not match hand '" + spec.name + "' (" +
                       std::to_string(spec.num_joints) + " joints)");
    }
    for (int k = 0; k < spec.num_joints; ++k) {
      const double over = std::max(spec.lower[k] - f.q[k], f.q[k] - spec.upper[k]);
      if (over > kMarginal) {
        throw InputError(fctx + ".q: joint '" +
                         spec.joint_names[static_cast<size_t>(k)] +
                         "' outside its limits");
      }
      if (over > 0.0) {
        f.q[k] = std::clamp(f.q[k], spec.lower[k], spec.upper[k]);
        ++demo.clamped_values;
      }
    }
    demo.frames.push_back(std::move(f));
  }
  if (demo.clamped_values > 0) {
    spdlog::warn("{}: clamped {} marginally out-of-limit joint values", context,
                 demo.clamped_values);
  }
  demo.grasp_index = static_cast<int>(
      RequireNumber(RequireField(j, "T_l", context), context + ".T_l"));
  if (demo.grasp_index <= 0 || demo.grasp_index > demo.last_index()) {
    throw InputError(context + ".T_l: must satisfy 0 < T_l <= T_D = " +
                     std::to_string(demo.last_index()));
  }
  return demo;
}

Demonstration LoadDemo(const std::filesystem::path& path, const HandSpec& spec) {
  return ParseDemo(ReadJsonFile(path), spec, path.string());
}

Json DemoToJson(const Demonstration& demo) {
  Json frames = Json::array();
  for (const DemoFrame& f : demo.frames) {
    frames.push_back(Json{{"p", ToJson(f.ee_in_object)}, {"q", ToJson(f.q)}});
  }
  return Json{{"hand", demo.hand}, {"T_l", demo.grasp_index}, {"frames", frames}};
}

bool WithinBounds(const EditAction& a, const ActionBounds& bounds, double tol) {
  if ((a.dt.array().abs() > bounds.b_t + tol).any()) return false;
  if (a.dr.angle() > bounds.b_r + tol) return false;
  if ((a.dq.array().abs() > bounds.b_q + tol).any()) return false;
  return a.k >= bounds.k_min - tol && a.k <= bounds.k_max + tol;
}

VecX TargetJointConfig(const VecX& style_q, double k, const VecX& dq,
                       const HandSpec& spec) {
  return ClampToLimits(spec, k * style_q + dq);
}

InterpolationFraction ComputeInterpolationFraction(const VecX& q0,
                                                   const VecX& q_grasp,
                                                   const VecX& q_star) {
  InterpolationFraction out;
  out.f = VecX::Zero(q0.size());
  out.is_static.assign(static_cast<size_t>(q0.size()), false);
  for (Eigen::Index j = 0; j < q0.size(); ++j) {
    const double span = q_grasp[j] - q0[j];
    if (std::abs(span) < kStaticJointEps) {
      out.is_static[static_cast<size_t>(j)] = true;
    } else {
      out.f[j] = (q_star[j] - q0[j]) / span;
    }
  }
  return out;
}

VecX InterpolateJointsUnclamped(const Demonstration& demo,
                                const InterpolationFraction& frac, int t,
                                const VecX& q_star) {
  const VecX& q0 = demo.q0();
  const VecX& q_ref = demo.frames[static_cast<size_t>(t)].q;
  const double ramp =
      std::min(static_cast<double>(t) / demo.grasp_index, 1.0);
  VecX q(q0.size());
  for (Eigen::Index j = 0; j < q0.size(); ++j) {
    if (frac.is_static[static_cast<size_t>(j)]) {
      q[j] = q0[j] + ramp * (q_star[j] - q0[j]);
    } else {
      q[j] = q0[j] + frac.f[j] * (q_ref[j] - q0[j]);
    }
  }
  return q;
}

VecX InterpolateJoints(const Demonstration& demo,
                       const InterpolationFraction& frac, int t,
                       const VecX& q_star, const HandSpec& spec) {
  return ClampToLimits(spec, InterpolateJointsUnclamped(demo, frac, t, q_star));
}

std::vector<Pose> EditWrist(const Demonstration& demo, const EditAction& action,
                            const Pose& object_pose) {
  const Pose offset = ComposePose(object_pose, action.WristOffset());
  std::vector<Pose> out;
  out.reserve(demo.frames.size());
  for (const DemoFrame& f : demo.frames) {
    out.push_back(ComposePose(offset, f.ee_in_object));
  }
  return out;
}

VecX DisturbStyle(const VecX& style_q, double sigma, Rng& rng,
                  const HandSpec& spec) {
  if (sigma <= 0.0) return style_q;
  VecX q = style_q;
  for (Eigen::Index j = 0; j < q.size(); ++j) q[j] += sigma * StandardNormal(rng);
  return ClampToLimits(spec, q);
}

EditedTrajectory EditDemonstration(const Demonstration& demo,
                                   const EditAction& action,
                                   const VecX& style_q, const Pose& object_pose,
                                   const HandSpec& spec) {
  EditedTrajectory out;
  out.q_star = TargetJointConfig(style_q, action.k, action.dq, spec);
  out.fraction = ComputeInterpolationFraction(demo.q0(), demo.q_grasp(), out.q_star);
  const std::vector<Pose> ee = EditWrist(demo, action, object_pose);
  out.frames.reserve(ee.size());
  for (int t = 0; t <= demo.last_index(); ++t) {
    out.frames.push_back(
        {ee[static_cast<size_t>(t)],
         InterpolateJoints(demo, out.fraction, t, out.q_star, spec)});
  }
  return out;
}

DemoSummary SummarizeDemo(const Demonstration& demo, const HandSpec& spec) {
  DemoSummary s;
  s.num_frames = static_cast<int>(demo.frames.size());
  s.grasp_index = demo.grasp_index;
  s.num_joints = spec.num_joints;
  s.q_min = demo.q0();
  s.q_max = demo.q0();
  for (size_t i = 0; i < demo.frames.size(); ++i) {
    s.q_min = s.q_min.cwiseMin(demo.frames[i].q);
    s.q_max = s.q_max.cwiseMax(demo.frames[i].q);
    if (i > 0) {
      s.path_length +=
          (demo.frames[i].ee_in_object.t - demo.frames[i - 1].ee_in_object.t).norm();
    }
  }
  const double z_grasp = demo.frames[static_cast<size_t>(demo.grasp_index)].ee_in_object.t.z();
  s.approach_height = demo.frames.front().ee_in_object.t.z() - z_grasp;
  s.lift_height = demo.frames.back().ee_in_object.t.z() - z_grasp;
  const InterpolationFraction frac =
      ComputeInterpolationFraction(demo.q0(), demo.q_grasp(), demo.q_grasp());
  for (int j = 0; j < spec.num_joints; ++j) {
    if (frac.is_static[static_cast<size_t>(j)]) {
      s.static_joints.push_back(spec.joint_names[static_cast<size_t>(j)]);
    }
  }
  return s;
}

}  // namespace fungrasp
