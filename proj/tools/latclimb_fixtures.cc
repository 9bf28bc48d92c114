// Copyright 2026 The latclimb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Regenerates the low-alignment multiclass fixtures from the default demo
// configuration. Usage: latclimb_fixtures <output-dir>

#include <exception>
#include <filesystem>
#include <iostream>

#include "core/experiments.h"
#include "core/serialize.h"

int main(int argc, char** argv) {
  using namespace latclimb;
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <output-dir>\n";
    return 1;
  }
  try {
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    const LowAlignmentFixture fx = MakeLowAlignmentFixture(MulticlassDemoConfig{});
    Json points = Json::array();
    for (const auto& p : fx.points) points.push_back(ToJson(p));
    WriteTextFile((dir / "low_alignment_mixture.json").string(), ToJson(fx.mixture).dump(1) + "\n");
    WriteTextFile((dir / "low_alignment_points.json").string(), points.dump(1) + "\n");
    WriteTextFile((dir / "low_alignment_point0.json").string(), ToJson(fx.points[0]).dump() + "\n");
  } catch (const std::exception& e) {
    std::cerr << "latclimb_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
