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

#include "fungrasp/assets.h"

#include <cmath>
#include <string>
#include <vector>

namespace fungrasp {
namespace {

Json PoseJson(const Vec3& t, const Quat& r) {
  return Json{{"t", ToJson(t)}, {"r", ToJson(r)}};
}

Json Revolute(const std::string& name, double length, const Vec3& axis,
              double radius, double lo, double hi) {
  return Json{{"name", name},
              {"length", length},
              {"axis", ToJson(axis)},
              {"radius", radius},
              {"limits", Json::array({lo, hi})}};
}

Json Passive(const std::string& name, double length, const Vec3& axis,
             double radius) {
  return Json{{"name", name},
              {"length", length},
              {"axis", ToJson(axis)},
              {"radius", radius}};
}

// Thumb chains start pointing along the palm normal: local x = hand +z,
// local z = hand +x.
Quat ThumbBaseRotation() {
  Mat3 r;
  r.col(0) = Vec3::UnitZ();
  r.col(1) = -Vec3::UnitY();
  r.col(2) = Vec3::UnitX();
  return MatrixToQuat(r);
}

const Vec3 kFlexAxis(0.0, -1.0, 0.0);

Json PalmGrid(double x0, double x1, double half_width, double radius) {
  Json palm = Json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double x = x0 + (x1 - x0) * i / 2.0;
      const double y = -half_width + half_width * j;
      palm.push_back(Json{{"t", ToJson(Vec3(x, y, 0.0))}, {"radius", radius}});
    }
  }
  return palm;
}

VecX ToVec(const std::vector<double>& v) {
  return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json StyleJson(const std::string& id, const std::vector<double>& q,
               const std::vector<std::string>& mask) {
  return Json{{"id", id}, {"q", ToJson(ToVec(q))}, {"contact_mask", mask}};
}

const char* const kFingerNames[] = {"index", "middle", "ring", "little"};
const double kFingerY[] = {0.0225, 0.0075, -0.0075, -0.0225};

}  // namespace

Json InspireLikeHandJson() {
  Json fingers = Json::array();
  Json coupling = Json::array();
  fingers.push_back(Json{
      {"name", "thumb"},
      {"base", PoseJson(Vec3(0.0, 0.0, 0.0), ThumbBaseRotation())},
      {"segments",
       Json::array({Revolute("thumb_yaw", 0.015, Vec3::UnitZ(), 0.010, -0.6, 0.6),
                    Revolute("thumb_flex", 0.040, kFlexAxis, 0.010, -0.3, 1.2),
                    Passive("thumb_distal", 0.030, kFlexAxis, 0.009)})},
      {"tip_radius", 0.009}});
  coupling.push_back(
      Json{{"finger", "thumb"}, {"segment", 2}, {"source", "thumb_flex"}, {"c", 1.0}});
  for (int i = 0; i < 4; ++i) {
    const std::string name = kFingerNames[i];
    fingers.push_back(Json{
        {"name", name},
        {"base", PoseJson(Vec3(0.10, kFingerY[i], 0.0), IdentityQuat())},
        {"segments",
         Json::array({Revolute(name + "_flex", 0.045, kFlexAxis, 0.009, 0.0, 1.7),
                      Passive(name + "_distal", 0.035, kFlexAxis, 0.008)})},
        {"tip_radius", 0.008}});
    coupling.push_back(Json{
        {"finger", name}, {"segment", 1}, {"source", name + "_flex"}, {"c", 1.0}});
  }
  return Json{{"name", "inspire_like"},
              {"dof", 6},
              {"fingers", fingers},
              {"palm", PalmGrid(0.02, 0.08, 0.018, 0.012)},
              {"coupling", coupling}};
}

Json InspireLikeStylesJson() {
  Json styles = Json::array();
  styles.push_back(StyleJson("power", {0.0, 0.25, 1.2, 1.2, 1.2, 1.2},
                             {"thumb", "index", "middle", "ring", "little"}));
  styles.push_back(StyleJson("tripod", {-0.25, 0.25, 1.2, 1.2, 0.35, 0.35},
                             {"thumb", "index", "middle"}));
  styles.push_back(StyleJson("ulnar", {0.25, 0.25, 0.35, 1.2, 1.2, 1.2},
                             {"thumb", "middle", "ring", "little"}));
  styles.push_back(StyleJson("quad", {-0.1, 0.25, 1.2, 1.2, 1.2, 0.35},
                             {"thumb", "index", "middle", "ring"}));
  return Json{{"hand", "inspire_like"}, {"styles", styles}};
}

Json ShadowLikeHandJson() {
  Json fingers = Json::array();
  fingers.push_back(Json{
      {"name", "thumb"},
      {"base", PoseJson(Vec3(0.01, 0.0, 0.0), ThumbBaseRotation())},
      {"segments",
       Json::array({Revolute("th_rot", 0.005, Vec3::UnitZ(), 0.010, -0.8, 0.8),
                    Revolute("th_abd", 0.012, Vec3::UnitY(), 0.010, -0.5, 0.5),
                    Revolute("th_mcp", 0.030, kFlexAxis, 0.010, -0.3, 1.2),
                    Revolute("th_pip", 0.025, kFlexAxis, 0.009, -0.3, 1.2),
                    Revolute("th_dip", 0.020, kFlexAxis, 0.009, -0.3, 1.2)})},
      {"tip_radius", 0.009}});
  for (int i = 0; i < 4; ++i) {
    const std::string name = kFingerNames[i];
    Json segs = Json::array();
    Vec3 base(0.10, kFingerY[i], 0.0);
    if (i == 3) {
      // The little finger carries an extra metacarpal joint.
      base.x() = 0.075;
      segs.push_back(Revolute("little_meta", 0.025, Vec3::UnitX(), 0.009, 0.0, 0.7));
    }
    segs.push_back(Revolute(name + "_abd", 0.005, Vec3::UnitZ(), 0.009, -0.35, 0.35));
    segs.push_back(Revolute(name + "_mcp", 0.040, kFlexAxis, 0.009, 0.0, 1.57));
    segs.push_back(Revolute(name + "_pip", 0.022, kFlexAxis, 0.008, 0.0, 1.57));
    segs.push_back(Revolute(name + "_dip", 0.018, kFlexAxis, 0.008, 0.0, 1.57));
    fingers.push_back(Json{{"name", name},
                           {"base", PoseJson(base, IdentityQuat())},
                           {"segments", segs},
                           {"tip_radius", 0.008}});
  }
  return Json{{"name", "shadow_like"},
              {"dof", 22},
              {"fingers", fingers},
              {"palm", PalmGrid(0.02, 0.08, 0.018, 0.012)},
              {"coupling", Json::array()}};
}

namespace {

// Joint layout: thumb (rot, abd, mcp, pip, dip), index/middle/ring
// (abd, mcp, pip, dip), little (meta, abd, mcp, pip, dip).
std::vector<double> ShadowPose(const std::vector<double>& thumb,
                               const std::vector<double>& flex,
                               double little_meta) {
  std::vector<double> q(thumb);
  for (int f = 0; f < 4; ++f) {
    if (f == 3) q.push_back(little_meta);
    q.push_back(0.0);
    const double a = flex[static_cast<size_t>(f)];
    q.insert(q.end(), {a, 0.5 * a, 0.5 * a});
  }
  return q;
}

}  // namespace

Json ShadowLikeStylesJson() {
  const std::vector<double> th = {0.0, 0.0, 0.15, 0.1, 0.1};
  const std::vector<double> th_in = {0.3, 0.0, 0.15, 0.1, 0.1};
  const std::vector<double> th_out = {-0.3, 0.0, 0.15, 0.1, 0.1};
  const double c = 1.1, o = 0.3;
  Json styles = Json::array();
  const std::vector<std::string> all = {"thumb", "index", "middle", "ring", "little"};
  styles.push_back(StyleJson("power", ShadowPose(th, {c, c, c, c}, 0.0), all));
  styles.push_back(StyleJson("power_cupped", ShadowPose(th, {c, c, c, c}, 0.5), all));
  styles.push_back(StyleJson("tripod", ShadowPose(th_in, {c, c, o, o}, 0.0),
                             {"thumb", "index", "middle"}));
  styles.push_back(StyleJson("tripod_wide", ShadowPose(th_in, {c, c, o, o}, 0.5),
                             {"thumb", "index", "middle"}));
  styles.push_back(StyleJson("quad", ShadowPose(th, {c, c, c, o}, 0.0),
                             {"thumb", "index", "middle", "ring"}));
  styles.push_back(StyleJson("ulnar", ShadowPose(th_out, {o, c, c, c}, 0.0),
                             {"thumb", "middle", "ring", "little"}));
  styles.push_back(StyleJson("ulnar_cupped", ShadowPose(th_out, {o, c, c, c}, 0.5),
                             {"thumb", "middle", "ring", "little"}));
  styles.push_back(StyleJson("middle_ring", ShadowPose(th, {o, c, c, o}, 0.0),
                             {"thumb", "middle", "ring"}));
  styles.push_back(StyleJson("index_ring", ShadowPose(th, {c, o, c, o}, 0.0),
                             {"thumb", "index", "ring"}));
  return Json{{"hand", "shadow_like"}, {"styles", styles}};
}

Json TopDownDemoJson(const std::string& hand, const VecX& q_open,
                     const VecX& q_grasp, const TopDownDemoParams& params) {
  // Palm down: 180 degrees about x.
  const Quat palm_down(0.0, 1.0, 0.0, 0.0);
  Json frames = Json::array();
  const int last = params.num_frames - 1;
  for (int t = 0; t <= last; ++t) {
    Vec3 p = params.grasp_position;
    VecX q = q_open;
    if (t < params.descend_frames) {
      const double s = static_cast<double>(t) / params.descend_frames;
      p.z() += (1.0 - s) * params.approach_height;
    } else if (t <= params.grasp_index) {
      const double s = static_cast<double>(t - params.descend_frames) /
                       (params.grasp_index - params.descend_frames);
      q = q_open + s * (q_grasp - q_open);
    } else {
      const double s = static_cast<double>(t - params.grasp_index) /
                       (last - params.grasp_index);
      p.z() += s * params.lift_height;
      q = q_grasp;
    }
    frames.push_back(Json{{"p", PoseJson(p, palm_down)}, {"q", ToJson(q)}});
  }
  return Json{{"hand", hand}, {"T_l", params.grasp_index}, {"frames", frames}};
}

Json InspireLikeDemoJson() {
  TopDownDemoParams params;
  params.grasp_position = Vec3(-0.0575, 0.0, 0.13);
  const Json styles = InspireLikeStylesJson();
  const VecX q_grasp = ParseVecX(styles["styles"][0]["q"], "power");
  return TopDownDemoJson("inspire_like", VecX::Zero(q_grasp.size()), q_grasp,
                         params);
}

Json ShadowLikeDemoJson() {
  TopDownDemoParams params;
  params.grasp_position = Vec3(-0.0575, 0.0, 0.13);
  const Json styles = ShadowLikeStylesJson();
  const VecX q_grasp = ParseVecX(styles["styles"][0]["q"], "power");
  return TopDownDemoJson("shadow_like", VecX::Zero(q_grasp.size()), q_grasp,
                         params);
}

namespace {

Json LookAtCamera(const std::string& name, const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
  const Vec3 y = z.cross(x);
  Mat3 cam_to_world;
  cam_to_world << x, y, z;
  const Pose world_to_cam =
      InvertPose(Pose{eye, MatrixToQuat(cam_to_world)});
  return Json{{"name", name},
              {"fx", 300.0},
              {"fy", 300.0},
              {"cx", 128.0},
              {"cy", 128.0},
              {"width", 256},
              {"height", 256},
              {"extrinsic", ToJson(world_to_cam)}};
}

}  // namespace

Json DefaultCamerasJson() {
  const Vec3 target(0.0, 0.0, 0.05);
  return Json{{"cameras",
               Json::array({LookAtCamera("cam_front_left", Vec3(0.6, 0.6, 0.5), target),
                            LookAtCamera("cam_back_right", Vec3(-0.6, -0.6, 0.5),
                                         target)})}};
}

}  // namespace fungrasp
