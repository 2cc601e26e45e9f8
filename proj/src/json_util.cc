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

#include "fungrasp/json_util.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fungrasp/error.h"

namespace fungrasp {

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw InputError("parse error in '" + path.string() + "' at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

const Json& RequireField(const Json& j, std::string_view key,
                         std::string_view context) {
  if (!j.is_object() || !j.contains(std::string(key))) {
    throw InputError(std::string(context) + ": missing field '" +
                     std::string(key) + "'");
  }
  return j.at(std::string(key));
}

double RequireNumber(const Json& j, std::string_view context) {
  if (!j.is_number()) {
    throw InputError(std::string(context) + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw InputError(std::string(context) + ": non-finite value");
  }
  return v;
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> ParseFixed(const Json& j,
                                       std::string_view context) {
  if (!j.is_array() || j.size() != N) {
    throw InputError(std::string(context) + ": expected an array of " +
                     std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    v[i] = RequireNumber(j[i], std::string(context) + "[" +
                                   std::to_string(i) + "]");
  }
  return v;
}

}  // namespace

bool IsNonNegativeInteger(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

Vec3 ParseVec3(const Json& j, std::string_view context) {
  return ParseFixed<3>(j, context);
}

Quat ParseQuat(const Json& j, std::string_view context) {
  Quat q = ParseFixed<4>(j, context);
  if (q.norm() < 1e-12) {
    throw InputError(std::string(context) + ": zero quaternion");
  }
  return QuatNormalize(q);
}

Pose ParsePose(const Json& j, std::string_view context) {
  Pose p;
  p.t = ParseVec3(RequireField(j, "t", context), std::string(context) + ".t");
  p.r = ParseQuat(RequireField(j, "r", context), std::string(context) + ".r");
  return p;
}

VecX ParseVecX(const Json& j, std::string_view context) {
  if (!j.is_array()) {
    throw InputError(std::string(context) + ": expected an array");
  }
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        RequireNumber(j[i], std::string(context) + "[" + std::to_string(i) +
                                "]");
  }
  return v;
}

Json ToJson(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }
Json ToJson(const Quat& q) { return Json::array({q[0], q[1], q[2], q[3]}); }
Json ToJson(const Pose& p) { return Json{{"t", ToJson(p.t)}, {"r", ToJson(p.r)}}; }
Json ToJson(const VecX& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::string Fnv1aHex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace fungrasp
