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

#include "fungrasp/geometry.h"

#include <algorithm>
#include <cmath>

namespace fungrasp {

Quat IdentityQuat() { return Quat(1.0, 0.0, 0.0, 0.0); }

Quat QuatMultiply(const Quat& a, const Quat& b) {
  const double aw = a[0], ax = a[1], ay = a[2], az = a[3];
  const double bw = b[0], bx = b[1], by = b[2], bz = b[3];
  return Quat(aw * bw - ax * bx - ay * by - az * bz,
              aw * bx + ax * bw + ay * bz - az * by,
              aw * by - ax * bz + ay * bw + az * bx,
              aw * bz + ax * by - ay * bx + az * bw);
}

Quat QuatConjugate(const Quat& q) { return Quat(q[0], -q[1], -q[2], -q[3]); }

Quat QuatNormalize(const Quat& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return IdentityQuat();
  return q / n;
}

Vec3 QuatRotate(const Quat& q, const Vec3& v) {
  // v' = v + 2w (u x v) + 2 u x (u x v), u = vector part.
  const Vec3 u(q[1], q[2], q[3]);
  const Vec3 uv = u.cross(v);
  return v + 2.0 * q[0] * uv + 2.0 * u.cross(uv);
}

Mat3 QuatToMatrix(const Quat& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

Quat MatrixToQuat(const Mat3& m) {
  // Shepperd's method, picking the largest diagonal term for stability.
  const double trace = m.trace();
  Quat q;
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q << 0.25 * s, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s,
        (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    q << (m(2, 1) - m(1, 2)) / s, 0.25 * s, (m(0, 1) + m(1, 0)) / s,
        (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
    q << (m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, 0.25 * s,
        (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
    q << (m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s,
        (m(1, 2) + m(2, 1)) / s, 0.25 * s;
  }
  if (q[0] < 0.0) q = -q;
  return QuatNormalize(q);
}

double QuatAngularDistance(const Quat& a, const Quat& b) {
  const double d = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(d);
}

Quat AxisAngleToQuat(const AxisAngle& aa) {
  const double angle = aa.v.norm();
  if (angle < kSmallAngle) {
    // sin(x/2)/x ~ 1/2 for small x.
    return QuatNormalize(Quat(1.0, 0.5 * aa.v[0], 0.5 * aa.v[1], 0.5 * aa.v[2]));
  }
  const double s = std::sin(0.5 * angle) / angle;
  return QuatNormalize(
      Quat(std::cos(0.5 * angle), s * aa.v[0], s * aa.v[1], s * aa.v[2]));
}

AxisAngle QuatToAxisAngle(const Quat& q_in) {
  Quat q = QuatNormalize(q_in);
  if (q[0] < 0.0) q = -q;
  const Vec3 u(q[1], q[2], q[3]);
  const double s = u.norm();
  if (s < 0.5 * kSmallAngle) return AxisAngle{2.0 * u};
  const double angle = 2.0 * std::atan2(s, q[0]);
  return AxisAngle{u * (angle / s)};
}

Quat QuatFromAxis(const Vec3& axis, double angle) {
  return AxisAngleToQuat(AxisAngle{axis.normalized() * angle});
}

Pose ComposePose(const Pose& a, const Pose& b) {
  Pose out;
  out.t = a.t + QuatRotate(a.r, b.t);
  out.r = QuatNormalize(QuatMultiply(a.r, b.r));
  return out;
}

Pose InvertPose(const Pose& p) {
  Pose out;
  out.r = QuatNormalize(QuatConjugate(p.r));
  out.t = -QuatRotate(out.r, p.t);
  return out;
}

Vec3 TransformPoint(const Pose& p, const Vec3& x) {
  return QuatRotate(p.r, x) + p.t;
}

Vec3 RotateVector(const Pose& p, const Vec3& v) { return QuatRotate(p.r, v); }

Quat YawQuat(double yaw) {
  return Quat(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
}

}  // namespace fungrasp
