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

#include "fungrasp/datasets_io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fungrasp/error.h"
#include "fungrasp/grasp_sim.h"

namespace fungrasp {

CameraModel ParseCamera(const Json& j, const std::string& context) {
  CameraModel cam;
  if (j.contains("name")) cam.name = j.at("name").get<std::string>();
  cam.fx = RequireNumber(RequireField(j, "fx", context), context + ".fx");
  cam.fy = RequireNumber(RequireField(j, "fy", context), context + ".fy");
  cam.cx = RequireNumber(RequireField(j, "cx", context), context + ".cx");
  cam.cy = RequireNumber(RequireField(j, "cy", context), context + ".cy");
  if (j.contains("width")) cam.width = j.at("width").get<int>();
  if (j.contains("height")) cam.height = j.at("height").get<int>();
  cam.extrinsic = ParsePose(RequireField(j, "extrinsic", context), context + ".extrinsic");
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) {
    throw InputError(context + ": focal lengths must be positive");
  }
  if (cam.width < 1 || cam.height < 1) throw InputError(context + ": empty image size");
  if (!(cam.cx >= 0.0 && cam.cx < cam.width && cam.cy >= 0.0 && cam.cy < cam.height)) {
    throw InputError(context + ": principal point outside the image");
  }
  return cam;
}

std::vector<CameraModel> ParseCameras(const Json& j, const std::string& context) {
  const Json& list = j.is_array() ? j : RequireField(j, "cameras", context);
  if (!list.is_array()) throw InputError(context + ": cameras must be an array");
  std::vector<CameraModel> cams;
  for (size_t i = 0; i < list.size(); ++i) {
    cams.push_back(ParseCamera(list[i], context + ".cameras[" + std::to_string(i) + "]"));
  }
  return cams;
}

std::vector<CameraModel> LoadCameras(const std::filesystem::path& path) {
  return ParseCameras(ReadJsonFile(path), path.string());
}

Json CameraToJson(const CameraModel& cam) {
  return Json{{"name", cam.name},
              {"fx", cam.fx},
              {"fy", cam.fy},
              {"cx", cam.cx},
              {"cy", cam.cy},
              {"width", cam.width},
              {"height", cam.height},
              {"extrinsic", ToJson(cam.extrinsic)}};
}

Projection ProjectPoint(const CameraModel& cam, const Vec3& p_world) {
  const Vec3 p = TransformPoint(cam.extrinsic, p_world);
  Projection out;
  out.depth = p.z();
  if (!(p.z() > kMinProjectionDepth)) return out;
  out.valid = true;
  out.u = cam.fx * p.x() / p.z() + cam.cx;
  out.v = cam.fy * p.y() / p.z() + cam.cy;
  out.in_frame = out.u >= 0.0 && out.u < cam.width && out.v >= 0.0 && out.v < cam.height;
  return out;
}

Vec3 UnprojectPixel(const CameraModel& cam, double u, double v, double depth) {
  const Vec3 p((u - cam.cx) / cam.fx * depth, (v - cam.cy) / cam.fy * depth, depth);
  return TransformPoint(InvertPose(cam.extrinsic), p);
}

std::vector<RolloutExportRecord> BuildExportRecords(const GraspEnv& env,
                                                    std::span<const EpisodeResult> episodes) {
  const GraspSetup& g = env.setup();
  std::vector<RolloutExportRecord> out;
  out.reserve(episodes.size());
  for (const EpisodeResult& e : episodes) {
    EnvState state;
    state.object_index = e.object_index;
    state.object_pose = e.object_pose;
    state.condition.p_afford = e.p_afford;
    state.condition.style = e.style;
    state.condition.q_style_used = g.styles.styles[static_cast<size_t>(e.style)].q;
    EditedTrajectory traj;
    const RolloutRecord rec =
        Rollout(state, g.objects[static_cast<size_t>(e.object_index)].model, g.demo,
                ToEditAction(e.action, g.spec.num_joints), g.spec, g.styles, g.sim, &traj);
    if (rec.success != e.success) {
      throw std::logic_error("replay of episode " + std::to_string(e.episode) +
                             " disagrees with its evaluation");
    }
    RolloutExportRecord r;
    r.episode = e;
    r.grasp_index = g.demo.grasp_index;
    const Pose ee_grasp = traj.frames[static_cast<size_t>(g.demo.grasp_index)].ee_world;
    for (size_t t = 0; t < traj.frames.size(); ++t) {
      ExportFrame f;
      f.ee = traj.frames[t].ee_world;
      f.q = traj.frames[t].q;
      f.object_pose = e.object_pose;
      if (rec.success && static_cast<int>(t) > g.demo.grasp_index) {
        f.object_pose = ComposePose(ComposePose(f.ee, InvertPose(ee_grasp)), e.object_pose);
      }
      r.frames.push_back(std::move(f));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::filesystem::path ManifestPath(const std::filesystem::path& export_path) {
  std::filesystem::path p = export_path;
  p += ".manifest.json";
  return p;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InputError("cannot write '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move '" + tmp.string() + "' into place");
  }
}

namespace {

Json CAffordJson(std::span<const CameraModel> cameras, const Vec3& p_world) {
  Json list = Json::array();
  for (const CameraModel& cam : cameras) {
    const Projection pr = ProjectPoint(cam, p_world);
    Json j{{"camera", cam.name}, {"valid", pr.valid}, {"in_frame", pr.in_frame},
           {"depth", pr.depth}};
    j["u"] = pr.valid ? Json(pr.u) : Json(nullptr);
    j["v"] = pr.valid ? Json(pr.v) : Json(nullptr);
    list.push_back(std::move(j));
  }
  return list;
}

}  // namespace

ExportManifest ExportRollouts(std::span<const RolloutExportRecord> records,
                              std::span<const CameraModel> cameras,
                              const std::filesystem::path& path, bool success_only,
                              const std::string& config_digest) {
  ExportManifest m;
  m.n_records = static_cast<int>(records.size());
  std::ostringstream body;
  Json cams = Json::array();
  for (const CameraModel& c : cameras) cams.push_back(CameraToJson(c));
  body << Json{{"type", "header"},
               {"schema_version", kExportSchemaVersion},
               {"target_convention", "absolute"},
               {"success_only", success_only}}
              .dump()
       << "\n";
  for (const RolloutExportRecord& r : records) {
    if (r.episode.success) ++m.n_success;
    if (success_only && !r.episode.success) continue;
    ++m.n_exported;
    Json ep = EpisodeResultToJson(r.episode);
    ep["type"] = "episode";
    ep["grasp_index"] = r.grasp_index;
    ep["num_frames"] = r.frames.size();
    body << ep.dump() << "\n";
    const Json condition{{"p_afford_world", ToJson(r.episode.p_afford_world)},
                         {"style", r.episode.style}};
    const Json c_afford = CAffordJson(cameras, r.episode.p_afford_world);
    for (size_t t = 0; t < r.frames.size(); ++t) {
      const ExportFrame& f = r.frames[t];
      body << Json{{"type", "frame"},
                   {"episode", r.episode.episode},
                   {"frame", t},
                   {"s_r", ToJson(f.ee)},
                   {"q", ToJson(f.q)},
                   {"ee_target", {{"t", ToJson(f.ee.t)}, {"r", ToJson(f.ee.r)}, {"q", ToJson(f.q)}}},
                   {"object_pose", ToJson(f.object_pose)},
                   {"condition", condition},
                   {"c_afford", c_afford},
                   {"success", r.episode.success}}
                  .dump()
           << "\n";
      ++m.n_frames;
    }
  }
  const Json manifest{{"schema_version", kExportSchemaVersion},
                      {"file", path.filename().string()},
                      {"counts",
                       {{"records", m.n_records},
                        {"exported", m.n_exported},
                        {"success", m.n_success},
                        {"frames", m.n_frames}}},
                      {"success_only", success_only},
                      {"config_digest", config_digest},
                      {"cameras", cams}};
  WriteFileAtomic(path, body.str());
  try {
    WriteFileAtomic(ManifestPath(path), manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
  return m;
}

void WriteEpisodeJsonl(const std::filesystem::path& path,
                       std::span<const EpisodeResult> episodes) {
  std::ostringstream body;
  for (const EpisodeResult& e : episodes) body << EpisodeResultToJson(e).dump() << "\n";
  WriteFileAtomic(path, body.str());
}

std::vector<Json> ReadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<Json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void SaveCheckpoint(const PolicyNet& net, const CheckpointMeta& meta,
                    const std::filesystem::path& path) {
  const PolicyDims& d = net.dims();
  Json layers = Json::array();
  for (const LinearLayer& l : net.layers()) {
    layers.push_back({{"name", l.name}, {"in", l.in}, {"out", l.out}});
  }
  std::vector<double> params(net.params().data(), net.params().data() + net.params().size());
  const Json j{{"schema_version", kCheckpointSchemaVersion},
               {"hand", meta.hand},
               {"num_joints", d.num_joints},
               {"num_styles", d.num_styles},
               {"num_points", d.num_points},
               {"layers", layers},
               {"weights", params},
               {"rng", {{"seed", meta.seed}, {"next_iteration", meta.next_iteration}}},
               {"iteration", meta.iteration}};
  WriteFileAtomic(path, j.dump() + "\n");
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path,
                                const std::string& expected_hand,
                                const PolicyDims& expected_dims) {
  const std::string ctx = path.string();
  const Json j = ReadJsonFile(path);
  try {
    const int version = RequireField(j, "schema_version", ctx).get<int>();
    if (version != kCheckpointSchemaVersion) {
      throw InputError(ctx + ": checkpoint schema " + std::to_string(version) +
                       ", expected " + std::to_string(kCheckpointSchemaVersion));
    }
    CheckpointMeta meta;
    meta.hand = RequireField(j, "hand", ctx).get<std::string>();
    if (meta.hand != expected_hand) {
      throw InputError(ctx + ": checkpoint is for hand '" + meta.hand + "', config uses '" +
                       expected_hand + "'");
    }
    PolicyDims d;
    d.num_joints = RequireField(j, "num_joints", ctx).get<int>();
    d.num_styles = RequireField(j, "num_styles", ctx).get<int>();
    d.num_points = RequireField(j, "num_points", ctx).get<int>();
    if (d.num_joints != expected_dims.num_joints || d.num_styles != expected_dims.num_styles ||
        d.num_points != expected_dims.num_points) {
      throw InputError(ctx + ": checkpoint shape (J " + std::to_string(d.num_joints) + ", S " +
                       std::to_string(d.num_styles) + ", M " + std::to_string(d.num_points) +
                       ") does not match the config (J " +
                       std::to_string(expected_dims.num_joints) + ", S " +
                       std::to_string(expected_dims.num_styles) + ", M " +
                       std::to_string(expected_dims.num_points) + ")");
    }
    PolicyNet net(d);
    const Json& layers = RequireField(j, "layers", ctx);
    if (!layers.is_array() || layers.size() != net.layers().size()) {
      throw InputError(ctx + ": layer list does not match the network");
    }
    for (size_t i = 0; i < layers.size(); ++i) {
      const LinearLayer& l = net.layers()[i];
      if (layers[i].at("name").get<std::string>() != l.name ||
          layers[i].at("in").get<int>() != l.in || layers[i].at("out").get<int>() != l.out) {
        throw InputError(ctx + ": layer " + std::to_string(i) + " shape mismatch");
      }
    }
    const auto w = RequireField(j, "weights", ctx).get<std::vector<double>>();
    if (w.size() != net.num_params()) {
      throw InputError(ctx + ": " + std::to_string(w.size()) + " weights, expected " +
                       std::to_string(net.num_params()));
    }
    for (size_t i = 0; i < w.size(); ++i) {
      if (!std::isfinite(w[i])) throw InputError(ctx + ": non-finite weight");
      net.params()[static_cast<Eigen::Index>(i)] = w[i];
    }
    const Json& rng = RequireField(j, "rng", ctx);
    meta.seed = RequireField(rng, "seed", ctx + ".rng").get<std::uint64_t>();
    meta.next_iteration = RequireField(rng, "next_iteration", ctx + ".rng").get<int>();
    meta.iteration = RequireField(j, "iteration", ctx).get<int>();
    return LoadedCheckpoint{std::move(net), meta};
  } catch (const Json::exception& e) {
    throw InputError(ctx + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace fungrasp
