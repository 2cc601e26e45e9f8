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

#ifndef FUNGRASP_GEOMETRY_H_
#define FUNGRASP_GEOMETRY_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fungrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;

// Quaternion convention used throughout the project: (w, x, y, z) component
// order, right-handed, active rotations (q rotates vectors, it does not
// re-express them). Stored as Eigen::Vector4d in that order so serialization
// and the math agree without going through Eigen's (x, y, z, w) storage.
using Quat = Eigen::Vector4d;

Quat IdentityQuat();
Quat QuatMultiply(const Quat& a, const Quat& b);
Quat QuatConjugate(const Quat& q);
Quat QuatNormalize(const Quat& q);
Vec3 QuatRotate(const Quat& q, const Vec3& v);
Mat3 QuatToMatrix(const Quat& q);
Quat MatrixToQuat(const Mat3& m);

// Angle between two rotations in radians; insensitive to the q / -q sign.
double QuatAngularDistance(const Quat& a, const Quat& b);

// Rotation vector (axis * angle, radians).
struct AxisAngle {
  Vec3 v = Vec3::Zero();

  double angle() const { return v.norm(); }
};

// Below this rotation angle the first-order series is used.
inline constexpr double kSmallAngle = 1e-8;

Quat AxisAngleToQuat(const AxisAngle& aa);
AxisAngle QuatToAxisAngle(const Quat& q);
Quat QuatFromAxis(const Vec3& axis, double angle);

// Rigid transform. Applying a pose to a point rotates by r, then translates
// by t.
struct Pose {
  Vec3 t = Vec3::Zero();
  Quat r = IdentityQuat();

  static Pose Identity() { return Pose{}; }
  static Pose FromTranslation(const Vec3& t) { return Pose{t, IdentityQuat()}; }
  static Pose FromRotation(const Quat& r) { return Pose{Vec3::Zero(), r}; }
};

// compose(a, b) applies b first, then a. The result quaternion is
// renormalized on every call.
Pose ComposePose(const Pose& a, const Pose& b);
Pose InvertPose(const Pose& p);
Vec3 TransformPoint(const Pose& p, const Vec3& x);
Vec3 RotateVector(const Pose& p, const Vec3& v);

// Rotation about +z by yaw radians.
Quat YawQuat(double yaw);

}  // namespace fungrasp

#endif  // FUNGRASP_GEOMETRY_H_
