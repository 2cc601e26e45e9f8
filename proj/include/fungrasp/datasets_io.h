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

#ifndef FUNGRASP_DATASETS_IO_H_
#define FUNGRASP_DATASETS_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fungrasp/evaluator.h"
#include "fungrasp/geometry.h"
#include "fungrasp/json_util.h"
#include "fungrasp/policy.h"

namespace fungrasp {

inline constexpr int kExportSchemaVersion = 1;
inline constexpr int kCheckpointSchemaVersion = 1;

// Pinhole camera. The extrinsic maps world points into the camera frame
// (x right, y down, z forward).
struct CameraModel {
  std::string name;
  double fx = 300.0;
  double fy = 300.0;
  double cx = 128.0;
  double cy = 128.0;
  int width = 256;
  int height = 256;
  Pose extrinsic;
};

CameraModel ParseCamera(const Json& j, const std::string& context);
std::vector<CameraModel> ParseCameras(const Json& j, const std::string& context);
std::vector<CameraModel> LoadCameras(const std::filesystem::path& path);
Json CameraToJson(const CameraModel& cam);

inline constexpr double kMinProjectionDepth = 1e-6;

struct Projection {
  bool valid = false;     // positive depth; u and v are set only when valid
  bool in_frame = false;  // inside [0, width) x [0, height)
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

Projection ProjectPoint(const CameraModel& cam, const Vec3& p_world);
Vec3 UnprojectPixel(const CameraModel& cam, double u, double v, double depth);

struct ExportFrame {
  Pose ee;           // executed wrist pose (world), also the absolute target
  VecX q;            // executed joints, also the absolute target
  Pose object_pose;  // world
};

struct RolloutExportRecord {
  EpisodeResult episode;
  int grasp_index = 0;
  std::vector<ExportFrame> frames;
};

// Replays each evaluated episode to recover its per-frame trajectory.
std::vector<RolloutExportRecord> BuildExportRecords(const GraspEnv& env,
                                                    std::span<const EpisodeResult> episodes);

struct ExportManifest {
  int n_records = 0;
  int n_exported = 0;
  int n_success = 0;
  int n_frames = 0;
};

// JSONL: a header line, then per exported episode one "episode" line and
// one "frame" line per frame. The manifest goes to <path>.manifest.json.
// Both files are written through a temporary and renamed into place.
ExportManifest ExportRollouts(std::span<const RolloutExportRecord> records,
                              std::span<const CameraModel> cameras,
                              const std::filesystem::path& path, bool success_only,
                              const std::string& config_digest);

std::filesystem::path ManifestPath(const std::filesystem::path& export_path);

// Per-episode evaluation records, one JSON object per line.
void WriteEpisodeJsonl(const std::filesystem::path& path,
                       std::span<const EpisodeResult> episodes);
std::vector<Json> ReadJsonl(const std::filesystem::path& path);

struct CheckpointMeta {
  std::string hand;
  std::uint64_t seed = 0;
  int iteration = 0;
  int next_iteration = 0;
};

void SaveCheckpoint(const PolicyNet& net, const CheckpointMeta& meta,
                    const std::filesystem::path& path);

struct LoadedCheckpoint {
  PolicyNet net;
  CheckpointMeta meta;
};

// Rejects schema, hand or shape mismatches against the expected setup.
LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path,
                                const std::string& expected_hand,
                                const PolicyDims& expected_dims);

// Writes to a sibling temporary then renames it over path.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fungrasp

#endif  // FUNGRASP_DATASETS_IO_H_
