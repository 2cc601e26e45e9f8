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

#ifndef FUNGRASP_OBJECT_H_
#define FUNGRASP_OBJECT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fungrasp/geometry.h"
#include "fungrasp/rng.h"

namespace fungrasp {

inline constexpr int kMinObjectPoints = 64;

// Oriented point cloud in the object frame. The canonical pose rests the
// object on the table: the lowest point is at z = 0.
struct ObjectModel {
  std::string name;
  Eigen::Matrix3Xd points;
  Eigen::Matrix3Xd normals;  // unit length
  Vec3 centroid = Vec3::Zero();
  Vec3 bb_min = Vec3::Zero();
  Vec3 bb_max = Vec3::Zero();
  Vec3 bb_edges = Vec3::Zero();
  double obj_bb = 0.0;  // longest bounding-box edge
  bool normals_estimated = false;

  int size() const { return static_cast<int>(points.cols()); }
  double height() const { return bb_max.z(); }
};

// Builds a model from raw data: validates, renormalizes normals (or
// estimates them when `normals` is empty), drops the cloud onto z = 0 and
// fills in the derived statistics.
ObjectModel MakeObjectModel(std::string name, Eigen::Matrix3Xd points,
                            Eigen::Matrix3Xd normals);

// ASCII PLY with x, y, z and optional nx, ny, nz vertex properties.
ObjectModel LoadObject(const std::filesystem::path& path);
void SaveObjectPly(const ObjectModel& obj, const std::filesystem::path& path);

// All *.ply files in a directory, sorted by file name.
std::vector<ObjectModel> LoadObjectDir(const std::filesystem::path& dir);

// Normals from a plane fit over the k nearest neighbours, oriented away
// from the centroid.
Eigen::Matrix3Xd EstimateNormals(const Eigen::Matrix3Xd& points, int k = 8);

// Uniformly scales the cloud about the origin (the table contact point
// stays on the table).
ObjectModel ScaleObject(const ObjectModel& obj, double scale);

struct AffordanceParams {
  double beta = 1.0;
  double h_min = 0.01;
  double up_weight = 0.5;
};

struct AffordanceDistribution {
  VecX weights;
  AffordanceParams params;
  bool uniform_fallback = false;
};

// weight_i ~ max(0, up_weight * n_z + (1 - up_weight) * n . o_i)^beta with
// o_i the horizontal outward direction from the centroid; points below
// h_min get zero weight.
AffordanceDistribution ComputeAffordance(const ObjectModel& obj,
                                         const AffordanceParams& params);

struct AffordanceSample {
  int index = 0;
  Vec3 point = Vec3::Zero();
};

AffordanceSample SampleAffordance(const AffordanceDistribution& dist,
                                  const ObjectModel& obj, Rng& rng);

// Greedy farthest point sampling. The first index is derived from `seed`.
std::vector<int> FarthestPointSample(const Eigen::Matrix3Xd& points, int count,
                                     std::uint64_t seed);

// Procedural toy objects. Dimensions in meters; each is returned in the
// canonical pose.
ObjectModel MakeBox(const std::string& name, const Vec3& size, double spacing);
ObjectModel MakeCylinder(const std::string& name, double radius, double height,
                         double spacing);
ObjectModel MakeSphere(const std::string& name, double radius, int count);
ObjectModel MakeLShape(const std::string& name, double spacing);
ObjectModel MakeMug(const std::string& name, double spacing);

// The bundled five-object suite: box, cylinder, sphere, L-shape, mug.
std::vector<ObjectModel> MakeToySuite();

}  // namespace fungrasp

#endif  // FUNGRASP_OBJECT_H_
