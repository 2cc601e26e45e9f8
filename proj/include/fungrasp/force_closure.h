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

#ifndef FUNGRASP_FORCE_CLOSURE_H_
#define FUNGRASP_FORCE_CLOSURE_H_

#include <span>
#include <vector>

#include "fungrasp/geometry.h"

namespace fungrasp {

using Wrench = Eigen::Matrix<double, 6, 1>;

// Dense phase-one simplex: is there x >= 0 with A x = b? Bland's rule keeps
// it cycle-free; intended for the small systems produced by grasp checks
// (6 rows, a few dozen columns).
struct LpResult {
  bool feasible = false;
  double residual = 0.0;  // phase-one objective at termination
  int iterations = 0;
  Eigen::VectorXd x;
};

LpResult SolveNonnegativeFeasibility(const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& b,
                                     double tol = 1e-9);

struct ContactPoint {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // outward surface normal of the object
};

// Two unit tangents completing `n` to an orthonormal frame.
void TangentBasis(const Vec3& n, Vec3& t1, Vec3& t2);

// Columns are the wrenches of the friction-pyramid edge forces at every
// contact. Forces push into the object (along -normal); torques are taken
// about `torque_origin` and divided by `torque_scale`.
Eigen::MatrixXd FrictionPyramidWrenches(std::span<const ContactPoint> contacts,
                                        double mu, const Vec3& torque_origin,
                                        double torque_scale, int edges = 4);

// Wrench (force, scaled torque) of a force applied at `point`.
Wrench PointForceWrench(const Vec3& force, const Vec3& point,
                        const Vec3& torque_origin, double torque_scale);

struct ClosureQuery {
  double mu = 0.5;
  double eta = 0.2;       // perturbation size relative to |gravity|
  Vec3 object_center = Vec3::Zero();
  double torque_scale = 1.0;  // obj_bb / 2
  Vec3 gravity_dir = -Vec3::UnitZ();
};

// The contacts must supply the wrench that cancels gravity, and the six
// loads obtained by adding +-eta along each force axis at the object
// center. Torques are taken about the contact centroid.
struct ClosureReport {
  bool feasible = false;
  int failed_load = -1;  // 0 = gravity, 1..6 = perturbations
};

ClosureReport CheckGraspWrenches(std::span<const ContactPoint> contacts,
                                 const ClosureQuery& query);

}  // namespace fungrasp

#endif  // FUNGRASP_FORCE_CLOSURE_H_
