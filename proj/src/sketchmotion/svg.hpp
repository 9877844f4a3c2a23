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
#include <string_view>

#include "sketchmotion/sketch.hpp"

namespace sketchmotion {

// Reads the path subset used for sketches: <path d="..."> with M, L, H, V,
// C and Z in absolute or relative form. Lines are degree-elevated to cubics.
// Coordinates are mapped from the viewBox into the canvas declared by the
// width/height attributes (falling back to the viewBox size, then 256).
// Throws ParseError (with byte offset) on unsupported commands and
// EmptySketchError when no path data is present.
Sketch parse_svg(std::string_view text);
Sketch load_svg(const std::string& path);

// One <path> element per stroke, coordinates in shortest round-trip form.
std::string write_svg(const Sketch& sketch);
void save_svg(const Sketch& sketch, const std::string& path);

}  // namespace sketchmotion
