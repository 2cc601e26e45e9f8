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

#include "fungrasp/hand.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "fungrasp/error.h"

namespace fungrasp {

int HandSpec::FingerIndex(const std::string& finger_name) const {
  for (int i = 0; i < num_fingers(); ++i) {
    if (fingers[static_cast<size_t>(i)].name == finger_name) return i;
  }
  return -1;
}

HandSpec ParseHandSpec(const Json& j, const std::string& context) {
  HandSpec spec;
  const Json& name = RequireField(j, "name", context);
  if (!name.is_string()) throw InputError(context + ".name: expected a string");
  spec.name = name.get<std::string>();

  // Coupled segments first, so joint numbering can skip them.
  struct CouplingRow {
    std::string source;
    double c = 1.0;
  };
  std::map<std::pair<std::string, int>, CouplingRow> coupled;
  if (j.contains("coupling")) {
    const Json& rows = j.at("coupling");
    if (!rows.is_array()) throw InputError(context + ".coupling: expected an array");
    for (size_t i = 0; i < rows.size(); ++i) {
      const std::string ctx = context + ".coupling[" + std::to_string(i) + "]";
      const Json& row = rows[i];
      const Json& finger = RequireField(row, "finger", ctx);
      const Json& source = RequireField(row, "source", ctx);
      if (!finger.is_string() || !source.is_string()) {
        throw InputError(ctx + ": finger and source must be strings");
      }
      const int seg = static_cast<int>(
          RequireNumber(RequireField(row, "segment", ctx), ctx + ".segment"));
      CouplingRow c;
      c.source = source.get<std::string>();
      c.c = row.contains("c") ? RequireNumber(row.at("c"), ctx + ".c") : 1.0;
      coupled[{finger.get<std::string>(), seg}] = c;
    }
  }

  const Json& fingers = RequireField(j, "fingers", context);
  if (!fingers.is_array() || fingers.empty()) {
    throw InputError(context + ".fingers: expected a non-empty array");
  }
  std::vector<double> lower, upper;
  std::set<std::string> finger_names;
  for (size_t fi = 0; fi < fingers.size(); ++fi) {
    const std::string fctx = context + ".fingers[" + std::to_string(fi) + "]";
    const Json& fj = fingers[fi];
    Finger finger;
    const Json& fname = RequireField(fj, "name", fctx);
    if (!fname.is_string()) throw InputError(fctx + ".name: expected a string");
    finger.name = fname.get<std::string>();
    if (!finger_names.insert(finger.name).second) {
      throw InputError(fctx + ": duplicate finger name '" + finger.name + "'");
    }
    finger.base = ParsePose(RequireField(fj, "base", fctx), fctx + ".base");
    finger.tip_radius =
        RequireNumber(RequireField(fj, "tip_radius", fctx), fctx + ".tip_radius");
    if (finger.tip_radius <= 0.0) {
      throw InputError(fctx + ".tip_radius: must be positive");
    }
    const Json& segs = RequireField(fj, "segments", fctx);
    if (!segs.is_array() || segs.empty()) {
      throw InputError(fctx + ".segments: expected a non-empty array");
    }
    for (size_t si = 0; si < segs.size(); ++si) {
      const std::string sctx = fctx + ".segments[" + std::to_string(si) + "]";
      const Json& sj = segs[si];
      Segment seg;
      seg.name = sj.contains("name") && sj.at("name").is_string()
                     ? sj.at("name").get<std::string>()
                     : finger.name + "_" + std::to_string(si);
      seg.length =
          RequireNumber(RequireField(sj, "length", sctx), sctx + ".length");
      if (!(seg.length > 0.0)) {
        throw InputError(sctx + ": segment length must be positive (joint '" +
                         seg.name + "')");
      }
      seg.axis = ParseVec3(RequireField(sj, "axis", sctx), sctx + ".axis");
      if (seg.axis.norm() < 1e-12) {
        throw InputError(sctx + ".axis: zero axis (joint '" + seg.name + "')");
      }
      seg.axis.normalize();
      seg.radius = sj.contains("radius")
                       ? RequireNumber(sj.at("radius"), sctx + ".radius")
                       : finger.tip_radius;
      if (seg.radius <= 0.0) throw InputError(sctx + ".radius: must be positive");
      const auto key = std::make_pair(finger.name, static_cast<int>(si));
      if (auto it = coupled.find(key); it != coupled.end()) {
        seg.passive = true;
        seg.coupling = it->second.c;
        seg.source_joint = -1;  // resolved below, once all joints are named
        finger.segments.push_back(seg);
        continue;
      }
      const Eigen::Vector2d lim = [&] {
        const Json& l = RequireField(sj, "limits", sctx);
        if (!l.is_array() || l.size() != 2) {
          throw InputError(sctx + ".limits: expected [lo, hi]");
        }
        return Eigen::Vector2d(RequireNumber(l[0], sctx + ".limits[0]"),
                               RequireNumber(l[1], sctx + ".limits[1]"));
      }();
      if (!(lim[0] < lim[1])) {
        throw InputError(sctx + ": joint '" + seg.name +
                         "' has lower limit >= upper limit");
      }
      seg.joint = static_cast<int>(lower.size());
      lower.push_back(lim[0]);
      upper.push_back(lim[1]);
      spec.joint_names.push_back(seg.name);
      finger.segments.push_back(seg);
    }
    spec.fingers.push_back(std::move(finger));
  }

  // Resolve coupling sources by joint name.
  for (auto& [key, row] : coupled) {
    const int fi = spec.FingerIndex(key.first);
    if (fi < 0) {
      throw InputError(context + ".coupling: unknown finger '" + key.first + "'");
    }
    auto& finger = spec.fingers[static_cast<size_t>(fi)];
    if (key.second < 0 || key.second >= static_cast<int>(finger.segments.size())) {
      throw InputError(context + ".coupling: finger '" + key.first +
                       "' has no segment " + std::to_string(key.second));
    }
    const auto it = std::find(spec.joint_names.begin(), spec.joint_names.end(),
                              row.source);
    if (it == spec.joint_names.end()) {
      throw InputError(context + ".coupling: unknown source joint '" +
                       row.source + "'");
    }
    finger.segments[static_cast<size_t>(key.second)].source_joint =
        static_cast<int>(it - spec.joint_names.begin());
  }

  spec.num_joints = static_cast<int>(lower.size());
  if (spec.num_joints == 0) throw InputError(context + ": hand has no active joints");
  spec.lower = Eigen::Map<VecX>(lower.data(), spec.num_joints);
  spec.upper = Eigen::Map<VecX>(upper.data(), spec.num_joints);

  if (j.contains("palm")) {
    const Json& palm = j.at("palm");
    if (!palm.is_array()) throw InputError(context + ".palm: expected an array");
    for (size_t i = 0; i < palm.size(); ++i) {
      const std::string pctx = context + ".palm[" + std::to_string(i) + "]";
      Sphere s;
      s.center = ParseVec3(RequireField(palm[i], "t", pctx), pctx + ".t");
      s.radius = RequireNumber(RequireField(palm[i], "radius", pctx),
                               pctx + ".radius");
      if (s.radius <= 0.0) throw InputError(pctx + ".radius: must be positive");
      spec.palm.push_back(s);
    }
  }
  if (j.contains("dof")) {
    const int dof = static_cast<int>(RequireNumber(j.at("dof"), context + ".dof"));
    if (dof != spec.num_joints) {
      throw InputError(context + ": declared dof " + std::to_string(dof) +
                       " but chains define " + std::to_string(spec.num_joints) +
                       " active joints");
    }
  }
  return spec;
}

HandSpec LoadHandSpec(const std::filesystem::path& path) {
  return ParseHandSpec(ReadJsonFile(path), path.string());
}

Json HandSpecToJson(const HandSpec& spec) {
  Json fingers = Json::array();
  Json coupling = Json::array();
  for (const Finger& f : spec.fingers) {
    Json segs = Json::array();
    for (size_t si = 0; si < f.segments.size(); ++si) {
      const Segment& s = f.segments[si];
      Json sj{{"name", s.name},
              {"length", s.length},
              {"axis", ToJson(s.axis)},
              {"radius", s.radius}};
      if (s.passive) {
        coupling.push_back(Json{{"finger", f.name},
                                {"segment", si},
                                {"source", spec.joint_names[static_cast<size_t>(
                                               s.source_joint)]},
                                {"c", s.coupling}});
      } else {
        sj["limits"] = Json::array({spec.lower[s.joint], spec.upper[s.joint]});
      }
      segs.push_back(sj);
    }
    fingers.push_back(Json{{"name", f.name},
                           {"base", ToJson(f.base)},
                           {"segments", segs},
                           {"tip_radius", f.tip_radius}});
  }
  Json palm = Json::array();
  for (const Sphere& s : spec.palm) {
    palm.push_back(Json{{"t", ToJson(s.center)}, {"radius", s.radius}});
  }
  return Json{{"name", spec.name},
              {"dof", spec.num_joints},
              {"fingers", fingers},
              {"palm", palm},
              {"coupling", coupling}};
}

StyleSet ParseStyles(const Json& j, const HandSpec& spec,
                     const std::string& context) {
  StyleSet set;
  const Json& hand = RequireField(j, "hand", context);
  if (!hand.is_string()) throw InputError(context + ".hand: expected a string");
  set.hand = hand.get<std::string>();
  if (set.hand != spec.name) {
    throw InputError(context + ": styles are for hand '" + set.hand +
                     "' but the configured hand is '" + spec.name + "'");
  }
  const Json& styles = RequireField(j, "styles", context);
  if (!styles.is_array() || styles.empty()) {
    throw InputError(context + ".styles: expected a non-empty array");
  }
  for (size_t i = 0; i < styles.size(); ++i) {
    const std::string sctx = context + ".styles[" + std::to_string(i) + "]";
    Style s;
    const Json& id = RequireField(styles[i], "id", sctx);
    if (!id.is_string()) throw InputError(sctx + ".id: expected a string");
    s.id = id.get<std::string>();
    s.index = static_cast<int>(i);
    s.q = ParseVecX(RequireField(styles[i], "q", sctx), sctx + ".q");
    if (s.q.size() != spec.num_joints) {
      throw InputError(sctx + ".q: expected " + std::to_string(spec.num_joints) +
                       " joints, got " + std::to_string(s.q.size()));
    }
    for (int k = 0; k < spec.num_joints; ++k) {
      if (s.q[k] < spec.lower[k] || s.q[k] > spec.upper[k]) {
        throw InputError(sctx + ".q: joint '" +
                         spec.joint_names[static_cast<size_t>(k)] +
                         "' outside its limits");
      }
    }
    const Json& mask = RequireField(styles[i], "contact_mask", sctx);
    if (!mask.is_array() || mask.empty()) {
      throw InputError(sctx + ".contact_mask: expected a non-empty array");
    }
    std::set<int> fingers;
    for (const Json& m : mask) {
      int fi = -1;
      if (m.is_string()) {
        fi = spec.FingerIndex(m.get<std::string>());
      } else if (m.is_number_integer()) {
        fi = m.get<int>();
      }
      if (fi < 0 || fi >= spec.num_fingers()) {
        throw InputError(sctx + ".contact_mask: unknown finger " + m.dump());
      }
      fingers.insert(fi);
    }
    s.contact_mask.assign(fingers.begin(), fingers.end());
    set.styles.push_back(std::move(s));
  }
  return set;
}

StyleSet LoadStyles(const std::filesystem::path& path, const HandSpec& spec) {
  return ParseStyles(ReadJsonFile(path), spec, path.string());
}

Json StylesToJson(const StyleSet& set) {
  Json styles = Json::array();
  for (const Style& s : set.styles) {
    styles.push_back(Json{
        {"id", s.id}, {"q", ToJson(s.q)}, {"contact_mask", s.contact_mask}});
  }
  return Json{{"hand", set.hand}, {"styles", styles}};
}

void ForwardKinematicsInto(const HandSpec& spec, const Pose& wrist,
                           const VecX& q, HandFrames& out) {
  if (q.size() != spec.num_joints) {
    throw std::invalid_argument("forward kinematics: expected " +
                                std::to_string(spec.num_joints) +
                                " joints, got " + std::to_string(q.size()));
  }
  out.wrist = wrist;
  out.spheres.clear();
  out.fingertips.clear();
  out.palm.clear();
  for (int fi = 0; fi < spec.num_fingers(); ++fi) {
    const Finger& finger = spec.fingers[static_cast<size_t>(fi)];
    Pose link = ComposePose(wrist, finger.base);
    for (size_t si = 0; si < finger.segments.size(); ++si) {
      const Segment& seg = finger.segments[si];
      const double angle = seg.passive ? seg.coupling * q[seg.source_joint]
                                       : q[seg.joint];
      link.r = QuatNormalize(QuatMultiply(link.r, QuatFromAxis(seg.axis, angle)));
      link.t += QuatRotate(link.r, Vec3(seg.length, 0.0, 0.0));
      const bool last = si + 1 == finger.segments.size();
      out.spheres.push_back(SphereFrame{fi, static_cast<int>(si), link.t,
                                        last ? finger.tip_radius : seg.radius});
    }
    out.fingertips.push_back(link.t);
  }
  for (const Sphere& s : spec.palm) {
    out.palm.push_back(Sphere{TransformPoint(wrist, s.center), s.radius});
  }
}

HandFrames ForwardKinematics(const HandSpec& spec, const Pose& wrist,
                             const VecX& q) {
  HandFrames out;
  ForwardKinematicsInto(spec, wrist, q, out);
  return out;
}

VecX ClampToLimits(const HandSpec& spec, const VecX& q) {
  return q.cwiseMax(spec.lower).cwiseMin(spec.upper);
}

VecX NormalizeJoints(const HandSpec& spec, const VecX& q) {
  return (q - spec.lower).cwiseQuotient(spec.upper - spec.lower);
}

int ClassifyStyle(const HandSpec& spec, const VecX& q_final,
                  std::span<const Style> styles) {
  if (styles.empty()) throw std::invalid_argument("classify_style: no styles");
  const VecX x = NormalizeJoints(spec, q_final);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Style& s : styles) {
    const double d = (x - NormalizeJoints(spec, s.q)).norm();
    if (d < best_d || (d == best_d && s.index < best)) {
      best_d = d;
      best = s.index;
    }
  }
  return best;
}

VecX StyleOneHot(int index, int num_styles) {
  VecX v = VecX::Zero(num_styles);
  v[index] = 1.0;
  return v;
}

}  // namespace fungrasp
