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

#ifndef FUNGRASP_JSON_UTIL_H_
#define FUNGRASP_JSON_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fungrasp/geometry.h"

namespace fungrasp {

using Json = nlohmann::json;

// Parses a whole file; errors carry the path and the parser's byte offset.
Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& j);

// Field accessors that throw InputError naming the field path on failure.
const Json& RequireField(const Json& j, std::string_view key,
                         std::string_view context);
double RequireNumber(const Json& j, std::string_view context);
// Integer-typed and >= 0, whether stored signed or unsigned.
bool IsNonNegativeInteger(const Json& j);
Vec3 ParseVec3(const Json& j, std::string_view context);
Quat ParseQuat(const Json& j, std::string_view context);
Pose ParsePose(const Json& j, std::string_view context);
VecX ParseVecX(const Json& j, std::string_view context);

Json ToJson(const Vec3& v);
Json ToJson(const Quat& q);
Json ToJson(const Pose& p);
Json ToJson(const VecX& v);

// 64-bit FNV-1a of a string, hex encoded. Used for config digests.
std::string Fnv1aHex(std::string_view data);

}  // namespace fungrasp

#endif  // FUNGRASP_JSON_UTIL_H_
