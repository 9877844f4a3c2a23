// Copyright 2026 The SketchMotion Authors
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
#pragma once

#include <string>

#include "sketchmotion/field.hpp"

namespace sketchmotion {

inline constexpr char kCheckpointMagic[] = "SKMF1";

struct Checkpoint {
  DisplacementField field;
  MotionLambdas lambdas;
};

// Layout: the 5-byte magic "SKMF1", a little-endian uint32 header length,
// a JSON header (field config, lambdas, tensor table with element offsets),
// then every parameter as little-endian float32 in table order.
std::string encode_checkpoint(const DisplacementField& field, const MotionLambdas& lambdas);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const DisplacementField& field, const MotionLambdas& lambdas);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sketchmotion
