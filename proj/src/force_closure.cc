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

#include "fungrasp/force_closure.h"

#include <cmath>
#include <limits>

namespace fungrasp {

LpResult SolveNonnegativeFeasibility(const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& b, double tol) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  LpResult result;
  result.x = Eigen::VectorXd::Zero(n);

  // Tableau [A' | I | b'] with rows flipped so b' >= 0. Columns n..n+m-1 are
  // the artificial variables; the last row holds the reduced costs of
  // min sum(artificials).
  const int cols = n + m + 1;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.row(i).head(n) = sign * a.row(i);
    tab(i, n + i) = 1.0;
    tab(i, cols - 1) = sign * b[i];
    basis[static_cast<size_t>(i)] = n + i;
  }
  for (int i = 0; i < m; ++i) tab.row(m) -= tab.row(i);
  for (int i = 0; i < m; ++i) tab(m, n + i) = 0.0;

  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  const int max_iter = 50 * (n + m) + 100;
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    // Bland: lowest-index column with a negative reduced cost.
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (tab(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double piv = tab(i, enter);
      if (piv <= tol) continue;
      const double ratio = tab(i, cols - 1) / piv;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 &&
           basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen in phase one
    tab.row(leave) /= tab(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = tab(i, enter);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(leave);
    }
    basis[static_cast<size_t>(leave)] = enter;
  }

  result.residual = -tab(m, cols - 1);
  for (int i = 0; i < m; ++i) {
    const int var = basis[static_cast<size_t>(i)];
    if (var < n) result.x[var] = std::max(0.0, tab(i, cols - 1));
  }
  // Confirm against the original system rather than trusting the tableau.
  const double err = (a * result.x - b).cwiseAbs().maxCoeff();
  result.feasible = result.residual <= tol * scale && err <= 1e-7 * scale;
  return result;
}

void TangentBasis(const Vec3& n, Vec3& t1, Vec3& t2) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  t1 = n.cross(helper).normalized();
  t2 = n.cross(t1).normalized();
}

Wrench PointForceWrench(const Vec3& force, const Vec3& point,
                        const Vec3& torque_origin, double torque_scale) {
  Wrench w;
  w.head<3>() = force;
  w.tail<3>() = (point - torque_origin).cross(force) / torque_scale;
  return w;
}

Eigen::MatrixXd FrictionPyramidWrenches(std::span<const ContactPoint> contacts,
                                        double mu, const Vec3& torque_origin,
                                        double torque_scale, int edges) {
  Eigen::MatrixXd g(6, static_cast<Eigen::Index>(contacts.size()) * edges);
  Eigen::Index col = 0;
  for (const ContactPoint& c : contacts) {
    const Vec3 inward = -c.normal.normalized();
    Vec3 t1, t2;
    TangentBasis(inward, t1, t2);
    for (int e = 0; e < edges; ++e) {
      const double a = 2.0 * M_PI * e / edges;
      const Vec3 f = inward + mu * (std::cos(a) * t1 + std::sin(a) * t2);
      g.col(col++) = PointForceWrench(f, c.point, torque_origin, torque_scale);
    }
  }
  return g;
}

ClosureReport CheckGraspWrenches(std::span<const ContactPoint> contacts,
                                 const ClosureQuery& query) {
  ClosureReport report;
  if (contacts.empty()) {
    report.failed_load = 0;
    return report;
  }
  Vec3 origin = Vec3::Zero();
  for (const ContactPoint& c : contacts) origin += c.point;
  origin /= static_cast<double>(contacts.size());
  const Eigen::MatrixXd g = FrictionPyramidWrenches(
      contacts, query.mu, origin, query.torque_scale);

  // The contacts supply the negative of the external load.
  const Vec3 support = -query.gravity_dir.normalized();
  for (int load = 0; load <= 6; ++load) {
    Vec3 force = support;
    if (load > 0) {
      const int axis = (load - 1) / 2;
      const double sign = (load - 1) % 2 == 0 ? 1.0 : -1.0;
      force[axis] += sign * query.eta;
    }
    const Wrench w =
        PointForceWrench(force, query.object_center, origin, query.torque_scale);
    if (!SolveNonnegativeFeasibility(g, w).feasible) {
      report.failed_load = load;
      return report;
    }
  }
  report.feasible = true;
  return report;
}

}  // namespace fungrasp
