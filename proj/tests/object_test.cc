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

#include "fungrasp/object.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fungrasp/error.h"
#include "test_util.h"

namespace fungrasp {
namespace {

using testing::ScratchDir;

// Points on the surface of an axis-aligned cube [0, 1]^3 with face normals.
ObjectModel UnitCube() {
  std::vector<Vec3> p, n;
  const int k = 6;
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const double side = face % 2 == 0 ? 0.0 : 1.0;
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; j <= k; ++j) {
        Vec3 x;
        x[axis] = side;
        x[(axis + 1) % 3] = static_cast<double>(i) / k;
        x[(axis + 2) % 3] = static_cast<double>(j) / k;
        Vec3 nn = Vec3::Zero();
        nn[axis] = side > 0 ? 1.0 : -1.0;
        p.push_back(x);
        n.push_back(nn);
      }
    }
  }
  Eigen::Matrix3Xd pts(3, p.size()), nrm(3, n.size());
  for (size_t i = 0; i < p.size(); ++i) {
    pts.col(static_cast<Eigen::Index>(i)) = p[i];
    nrm.col(static_cast<Eigen::Index>(i)) = n[i];
  }
  return MakeObjectModel("cube", pts, nrm);
}

TEST(ObjectModel, UnitCubeStatistics) {
  const ObjectModel cube = UnitCube();
  EXPECT_LT((cube.bb_edges - Vec3(1, 1, 1)).norm(), 1e-15);
  EXPECT_EQ(cube.obj_bb, 1.0);
  EXPECT_EQ(cube.obj_bb, cube.bb_edges.maxCoeff());
  for (int i = 0; i < cube.size(); ++i) EXPECT_NEAR(cube.normals.col(i).norm(), 1.0, 1e-6);
}

TEST(ObjectModel, CylinderBoundingBox) {
  const ObjectModel cyl = MakeCylinder("c", 0.03, 0.20, 0.005);
  EXPECT_NEAR(cyl.obj_bb, 0.20, 1e-12);
  EXPECT_EQ(cyl.obj_bb, cyl.bb_edges.maxCoeff());
}

TEST(ObjectModel, DroppedOntoTable) {
  ObjectModel cube = UnitCube();
  Eigen::Matrix3Xd pts = cube.points;
  pts.row(2).array() -= 0.05 + 0.0;
  pts.row(2).array() -= pts.row(2).minCoeff() + 0.05;
  ASSERT_NEAR(pts.row(2).minCoeff(), -0.05, 1e-15);
  const ObjectModel moved = MakeObjectModel("moved", pts, cube.normals);
  EXPECT_EQ(moved.points.row(2).minCoeff(), 0.0);
}

TEST(ObjectModel, RejectsTooFewOrNonFinitePoints) {
  Eigen::Matrix3Xd few = Eigen::Matrix3Xd::Random(3, 10);
  EXPECT_THROW(MakeObjectModel("few", few, Eigen::Matrix3Xd()), InputError);
  Eigen::Matrix3Xd bad = UnitCube().points;
  bad(1, 5) = std::nan("");
  EXPECT_THROW(MakeObjectModel("bad", bad, Eigen::Matrix3Xd()), InputError);
}

TEST(ObjectModel, EstimatesMissingNormals) {
  const ObjectModel sphere = MakeSphere("s", 0.05, 400);
  const ObjectModel est = MakeObjectModel("est", sphere.points, Eigen::Matrix3Xd());
  EXPECT_TRUE(est.normals_estimated);
  const Vec3 c = est.centroid;
  int aligned = 0;
  for (int i = 0; i < est.size(); ++i) {
    const Vec3 radial = (est.points.col(i) - Vec3(c.x(), c.y(), 0.05)).normalized();
    if (std::abs(radial.dot(est.normals.col(i))) > 0.95) ++aligned;
  }
  EXPECT_GT(aligned, est.size() * 9 / 10);
}

TEST(ObjectModel, ScalingScalesObjBbLinearly) {
  for (const ObjectModel& o : MakeToySuite()) {
    const ObjectModel big = ScaleObject(o, 2.5);
    EXPECT_NEAR(big.obj_bb, 2.5 * o.obj_bb, 1e-15 * o.obj_bb * 10);
  }
}

TEST(ObjectModel, PlyRoundTripIsExact) {
  const auto dir = ScratchDir("ply");
  const ObjectModel mug = MakeMug("mug", 0.006);
  SaveObjectPly(mug, dir / "mug.ply");
  const ObjectModel back = LoadObject(dir / "mug.ply");
  EXPECT_EQ(back.name, "mug");
  EXPECT_EQ(back.points, mug.points);
  EXPECT_EQ(back.normals, mug.normals);
  EXPECT_EQ(back.obj_bb, mug.obj_bb);
}

TEST(ObjectModel, PlyErrorsNameTheFile) {
  const auto dir = ScratchDir("ply_bad");
  std::ofstream(dir / "bad.ply") << "ply\nformat ascii 1.0\nelement vertex 2\n"
                                    "property float x\nproperty float y\nproperty float z\n"
                                    "end_header\n0 0 0\n1 1\n";
  try {
    LoadObject(dir / "bad.ply");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ply"), std::string::npos);
  }
}

TEST(Affordance, SphereUpwardWeightsFollowNormalZ) {
  const ObjectModel s = MakeSphere("s", 0.05, 2000);
  AffordanceParams p;
  p.up_weight = 1.0;
  p.beta = 1.0;
  const AffordanceDistribution d = ComputeAffordance(s, p);
  EXPECT_NEAR(d.weights.sum(), 1.0, 1e-9);
  double scale = 0.0;
  int top = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s.normals(2, i) > s.normals(2, top)) top = i;
  }
  scale = d.weights[top] / s.normals(2, top);
  for (int i = 0; i < s.size(); ++i) {
    const double nz = s.normals(2, i);
    if (s.points(2, i) < p.h_min || nz <= 0.0) {
      EXPECT_EQ(d.weights[i], 0.0);
    } else {
      EXPECT_NEAR(d.weights[i], scale * nz, 1e-12);
    }
  }
  EXPECT_EQ(d.weights.maxCoeff(), d.weights[top]);
}

TEST(Affordance, HeightAboveObjectRejected) {
  const ObjectModel box = MakeBox("b", Vec3(0.05, 0.05, 0.1), 0.01);
  AffordanceParams p;
  p.h_min = 0.2;
  try {
    ComputeAffordance(box, p);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(Affordance, UniformFallbackForDownwardNormals) {
  const ObjectModel cube = UnitCube();
  Eigen::Matrix3Xd down = Eigen::Matrix3Xd::Zero(3, cube.size());
  down.row(2).setConstant(-1.0);
  const ObjectModel obj = MakeObjectModel("down", cube.points, down);
  AffordanceParams p;
  p.up_weight = 1.0;
  const AffordanceDistribution d = ComputeAffordance(obj, p);
  EXPECT_TRUE(d.uniform_fallback);
  int eligible = 0;
  for (int i = 0; i < obj.size(); ++i) eligible += obj.points(2, i) >= p.h_min;
  for (int i = 0; i < obj.size(); ++i) {
    EXPECT_NEAR(d.weights[i], obj.points(2, i) >= p.h_min ? 1.0 / eligible : 0.0, 1e-15);
  }
}

TEST(Affordance, PermutationInvariant) {
  const ObjectModel mug = MakeMug("mug", 0.006);
  std::vector<int> perm(static_cast<size_t>(mug.size()));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(4);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::Matrix3Xd pts(3, mug.size()), nrm(3, mug.size());
  for (int i = 0; i < mug.size(); ++i) {
    pts.col(i) = mug.points.col(perm[static_cast<size_t>(i)]);
    nrm.col(i) = mug.normals.col(perm[static_cast<size_t>(i)]);
  }
  const ObjectModel shuffled = MakeObjectModel("mug", pts, nrm);
  const AffordanceDistribution a = ComputeAffordance(mug, {});
  const AffordanceDistribution b = ComputeAffordance(shuffled, {});
  for (int i = 0; i < mug.size(); ++i) {
    EXPECT_NEAR(b.weights[i], a.weights[perm[static_cast<size_t>(i)]], 1e-15);
  }
}

TEST(SampleAffordance, OneHotAndDeterminism) {
  const ObjectModel box = MakeBox("b", Vec3(0.05, 0.05, 0.1), 0.01);
  AffordanceDistribution d = ComputeAffordance(box, {});
  d.weights.setZero();
  d.weights[17] = 1.0;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const AffordanceSample s = SampleAffordance(d, box, rng);
    EXPECT_EQ(s.index, 17);
    EXPECT_EQ(s.point, Vec3(box.points.col(17)));
  }
  const AffordanceDistribution full = ComputeAffordance(box, {});
  Rng r1(99), r2(99);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(SampleAffordance(full, box, r1).index, SampleAffordance(full, box, r2).index);
  }
}

TEST(SampleAffordance, FrequenciesMatchWeights) {
  const ObjectModel box = MakeBox("b", Vec3(0.05, 0.05, 0.1), 0.01);
  AffordanceDistribution d = ComputeAffordance(box, {});
  d.weights.setZero();
  d.weights[3] = 0.2;
  d.weights[40] = 0.5;
  d.weights[70] = 0.3;
  Rng rng(5);
  const int n = 100000;
  int c3 = 0, c40 = 0, c70 = 0;
  for (int i = 0; i < n; ++i) {
    const int k = SampleAffordance(d, box, rng).index;
    c3 += k == 3;
    c40 += k == 40;
    c70 += k == 70;
  }
  EXPECT_EQ(c3 + c40 + c70, n);
  EXPECT_NEAR(static_cast<double>(c3) / n, 0.2, 0.01);
  EXPECT_NEAR(static_cast<double>(c40) / n, 0.5, 0.01);
  EXPECT_NEAR(static_cast<double>(c70) / n, 0.3, 0.01);
}

TEST(FarthestPointSample, FullCoverageIsPermutation) {
  const ObjectModel box = MakeBox("b", Vec3(0.05, 0.05, 0.1), 0.01);
  const std::vector<int> idx = FarthestPointSample(box.points, box.size(), 3);
  const std::set<int> unique(idx.begin(), idx.end());
  EXPECT_EQ(static_cast<int>(unique.size()), box.size());
  EXPECT_ANY_THROW(FarthestPointSample(box.points, box.size() + 1, 3));
}

TEST(FarthestPointSample, SegmentEndpoints) {
  Eigen::Matrix3Xd seg = Eigen::Matrix3Xd::Zero(3, 101);
  for (int i = 0; i <= 100; ++i) seg(0, i) = i * 0.01;
  auto has = [](const std::vector<int>& v, int k) {
    return std::find(v.begin(), v.end(), k) != v.end();
  };
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::vector<int> two = FarthestPointSample(seg, 2, seed);
    // From an endpoint start the pair is exactly both endpoints; otherwise
    // the second pick is the farther endpoint.
    if (two[0] == 0 || two[0] == 100) {
      EXPECT_TRUE(has(two, 0) && has(two, 100));
    } else {
      EXPECT_EQ(two[1], two[0] < 50 ? 100 : 0);
    }
  }
}

double MinPairwise(const Eigen::Matrix3Xd& pts, const std::vector<int>& idx) {
  double best = 1e300;
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = i + 1; j < idx.size(); ++j) {
      best = std::min(best, (pts.col(idx[i]) - pts.col(idx[j])).norm());
    }
  }
  return best;
}

TEST(FarthestPointSample, SpreadsBetterThanRandomSubsets) {
  Rng rng(6);
  Eigen::Matrix3Xd pts(3, 500);
  for (int i = 0; i < 500; ++i) pts.col(i) = Vec3(Uniform01(rng), Uniform01(rng), Uniform01(rng));
  const int m = 32;
  const double fps = MinPairwise(pts, FarthestPointSample(pts, m, 1));
  std::vector<int> all(500);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < 100; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    const std::vector<int> subset(all.begin(), all.begin() + m);
    EXPECT_GE(fps, MinPairwise(pts, subset));
  }
}

TEST(ToySuite, FiveValidObjects) {
  const std::vector<ObjectModel> suite = MakeToySuite();
  ASSERT_EQ(suite.size(), 5u);
  for (const ObjectModel& o : suite) {
    EXPECT_GE(o.size(), 64);
    EXPECT_EQ(o.points.row(2).minCoeff(), 0.0);
    EXPECT_EQ(o.obj_bb, o.bb_edges.maxCoeff());
  }
}

}  // namespace
}  // namespace fungrasp
