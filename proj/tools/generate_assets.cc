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

// Writes the bundled hands, styles, demonstrations, cameras and toy objects.

#include <filesystem>
#include <iostream>
#include <string>

#include "fungrasp/assets.h"
#include "fungrasp/object.h"

namespace {

void Write(const std::filesystem::path& path, const fungrasp::Json& j) {
  std::filesystem::create_directories(path.parent_path());
  fungrasp::WriteJsonFile(path, j);
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: generate_assets <assets dir>\n";
    return 1;
  }
  const std::filesystem::path root = argv[1];
  try {
    Write(root / "hands" / "inspire_like.json", fungrasp::InspireLikeHandJson());
    Write(root / "hands" / "shadow_like.json", fungrasp::ShadowLikeHandJson());
    Write(root / "styles" / "inspire_like.json", fungrasp::InspireLikeStylesJson());
    Write(root / "styles" / "shadow_like.json", fungrasp::ShadowLikeStylesJson());
    Write(root / "demos" / "inspire_like.json", fungrasp::InspireLikeDemoJson());
    Write(root / "demos" / "shadow_like.json", fungrasp::ShadowLikeDemoJson());
    Write(root / "cameras.json", fungrasp::DefaultCamerasJson());
    std::filesystem::create_directories(root / "objects");
    for (const fungrasp::ObjectModel& obj : fungrasp::MakeToySuite()) {
      const std::filesystem::path p = root / "objects" / (obj.name + ".ply");
      fungrasp::SaveObjectPly(obj, p);
      std::cout << p.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
