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
#include <vector>

#include <gtest/gtest.h>

#include "fungrasp/grasp_sim.h"
#include "test_util.h"

namespace fungrasp {
namespace {

// Lawson-Hanson non-negative least squares, used as an independent oracle:
// A x = b has a solution x >= 0 iff the NNLS residual is zero.
double NnlsResidual(const Eigen::MatrixXd& a, const VecX& b) {
  const int n = static_cast<int>(a.cols());
  std::vector<bool> passive(static_cast<size_t>(n), false);
  VecX x = VecX::Zero(n);
  for (int outer = 0; outer < 10 * n; ++outer) {
    const VecX w = a.transpose() * (b - a * x);
    int best = -1;
    double wmax = 1e-12;
    for (int j = 0; j < n; ++j) {
      if (!passive[static_cast<size_t>(j)] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;
    for (int inner = 0; inner < 10 * n; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)]) idx.push_back(j);
      }
      Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
      const VecX z = ap.colPivHouseholderQr().solve(b);
      if ((z.array() > 0).all()) {
        x.setZero();
        for (size_t k = 0; k < idx.size(); ++k) x[idx[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }
      double alpha = 1.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)];
        if (zk <= 0) alpha = std::min(alpha, x[idx[k]] / (x[idx[k]] - zk));
      }
      for (size_t k = 0; k < idx.size(); ++k) {
        x[idx[k]] += alpha * (z[static_cast<Eigen::Index>(k)] - x[idx[k]]);
        if (x[idx[k]] <= 1e-14) {
          x[idx[k]] = 0.0;
          passive[static_cast<size_t>(idx[k])] = false;
        }
      }
    }
  }
  return (a * x - b).norm();
}

TEST(Simplex, AgreesWithNnlsOracle) {
  Rng rng(1);
  int checked = 0, feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int cols = 4 + UniformIndex(rng, 20);
    Eigen::MatrixXd a(6, cols);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = StandardNormal(rng);
    VecX b(6);
    for (int i = 0; i < 6; ++i) b[i] = StandardNormal(rng);
    const double residual = NnlsResidual(a, b);
    // Skip near-boundary instances where tolerances could disagree.
    if (residual > 1e-9 && residual < 1e-3) continue;
    ++checked;
    feasible += residual <= 1e-9;
    EXPECT_EQ(SolveNonnegativeFeasibility(a, b).feasible, residual <= 1e-9)
        << "trial " << trial << " residual " << residual;
  }
  EXPECT_GT(checked, 300);
  EXPECT_GT(feasible, 20);
  EXPECT_GT(checked - feasible, 20);
}

TEST(Simplex, FeasibleByConstructionAndSolutionValid) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd a(6, 12);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = StandardNormal(rng);
    VecX x0(12);
    for (int i = 0; i < 12; ++i) x0[i] = Uniform01(rng);
    const VecX b = a * x0;
    const LpResult r = SolveNonnegativeFeasibility(a, b);
    ASSERT_TRUE(r.feasible);
    EXPECT_TRUE((r.x.array() >= -1e-12).all());
    EXPECT_LT((a * r.x - b).norm(), 1e-7);
  }
}

TEST(Simplex, SignObstructionInfeasible) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 10);
  a.row(0) = a.row(0).cwiseAbs().array() + 0.1;
  VecX b = VecX::Random(6);
  b[0] = -1.0;
  EXPECT_FALSE(SolveNonnegativeFeasibility(a, b).feasible);
}

TEST(TangentBasis, Orthonormal) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 n = testing::RandomVec3(rng).normalized();
    Vec3 t1, t2;
    TangentBasis(n, t1, t2);
    EXPECT_NEAR(t1.norm(), 1.0, 1e-12);
    EXPECT_NEAR(t2.norm(), 1.0, 1e-12);
    EXPECT_NEAR(t1.dot(n), 0.0, 1e-12);
    EXPECT_NEAR(t2.dot(n), 0.0, 1e-12);
    EXPECT_NEAR(t1.dot(t2), 0.0, 1e-12);
  }
}

TEST(FrictionPyramid, EdgesLieOnConeBoundary) {
  const ContactPoint c{Vec3(0.1, 0, 0), Vec3::UnitX()};
  const double mu = 0.5;
  const Eigen::MatrixXd w = FrictionPyramidWrenches(std::span(&c, 1), mu, Vec3::Zero(), 1.0);
  ASSERT_EQ(w.cols(), 4);
  for (int k = 0; k < 4; ++k) {
    const Vec3 f = w.col(k).head<3>();
    const double normal = -f.dot(c.normal);
    const double tangential = (f + normal * c.normal).norm();
    EXPECT_GT(normal, 0.0);
    EXPECT_NEAR(tangential / normal, mu, 1e-12);
    EXPECT_LT((w.col(k).tail<3>() - c.point.cross(f)).norm(), 1e-15);
  }
}

std::vector<ContactPoint> Antipodal(double r) {
  return {ContactPoint{Vec3(r, 0, 0), Vec3::UnitX()}, ContactPoint{Vec3(-r, 0, 0), -Vec3::UnitX()}};
}

TEST(CheckGraspWrenches, AntipodalSphereHolds) {
  ClosureQuery q;
  q.mu = 0.5;
  q.torque_scale = 0.05;
  EXPECT_TRUE(CheckGraspWrenches(Antipodal(0.05), q).feasible);
}

TEST(CheckGraspWrenches, SingleContactFails) {
  ClosureQuery q;
  const std::vector<ContactPoint> one{ContactPoint{Vec3(0, 0, 0.05), Vec3::UnitZ()}};
  EXPECT_FALSE(CheckGraspWrenches(one, q).feasible);
}

TEST(CheckGraspWrenches, ParallelSameDirectionNormalsFail) {
  ClosureQuery q;
  q.mu = 0.1;
  const std::vector<ContactPoint> top{ContactPoint{Vec3(0.02, 0, 0.05), Vec3::UnitZ()},
                                      ContactPoint{Vec3(-0.02, 0, 0.05), Vec3::UnitZ()}};
  const ClosureReport r = CheckGraspWrenches(top, q);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.failed_load, 0);
}

TEST(CheckGraspWrenches, MonotoneInFriction) {
  Rng rng(4);
  const std::vector<double> grid{0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5};
  int flips = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<ContactPoint> contacts;
    const int n = 2 + UniformIndex(rng, 3);
    for (int i = 0; i < n; ++i) {
      const Vec3 dir = testing::RandomVec3(rng).normalized();
      contacts.push_back(ContactPoint{0.05 * dir, dir});
    }
    ClosureQuery q;
    q.torque_scale = 0.05;
    bool prev = false;
    for (double mu : grid) {
      q.mu = mu;
      const bool ok = CheckGraspWrenches(contacts, q).feasible;
      EXPECT_TRUE(!prev || ok) << "trial " << trial << " lost closure at mu " << mu;
      flips += ok && !prev;
      prev = ok;
    }
  }
  EXPECT_GT(flips, 0);
}

Contact MakeContact(int finger, const Vec3& p, const Vec3& n) {
  return Contact{finger, p, n, 0.0};
}

TEST(GraspSuccess, NeedsTwoMaskFingers) {
  const SimConfig cfg;
  const std::vector<int> mask{0, 1};
  std::vector<Contact> c{MakeContact(0, Vec3(0.05, 0, 0.05), Vec3::UnitX()),
                         MakeContact(2, Vec3(-0.05, 0, 0.05), -Vec3::UnitX())};
  EXPECT_FALSE(GraspSuccess(c, mask, Vec3(0, 0, 0.05), 0.1, false, cfg).success);
  c[1].finger = 1;
  EXPECT_TRUE(GraspSuccess(c, mask, Vec3(0, 0, 0.05), 0.1, false, cfg).success);
  EXPECT_FALSE(GraspSuccess(c, mask, Vec3(0, 0, 0.05), 0.1, true, cfg).success);
}

TEST(GraspSuccess, NonFiniteNormalReported) {
  const SimConfig cfg;
  const std::vector<int> mask{0, 1};
  const std::vector<Contact> c{
      MakeContact(0, Vec3(0.05, 0, 0.05), Vec3(std::nan(""), 0, 0)),
      MakeContact(1, Vec3(-0.05, 0, 0.05), -Vec3::UnitX())};
  const SuccessReport r = GraspSuccess(c, mask, Vec3(0, 0, 0.05), 0.1, false, cfg);
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.reason.empty());
}

}  // namespace
}  // namespace fungrasp
