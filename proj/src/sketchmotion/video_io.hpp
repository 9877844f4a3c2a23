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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sketchmotion/video.hpp"

namespace sketchmotion {

// 8-bit grayscale; values are clamped to [0, 1] and scaled by 255.
void write_png(const std::string& path, std::span<const double> pixels, std::size_t height, std::size_t width);
// Returns values in [0, 1]; sets height/width.
std::vector<double> read_png(const std::string& path, std::size_t& height, std::size_t& width);

// Writes frame_000.png, frame_001.png, ... into dir.
void write_png_sequence(const std::string& dir, const Video& video);

// Paletted grayscale GIF89a that loops forever, delay 1000/fps ms per frame.
std::vector<std::uint8_t> encode_gif(const Video& video, double fps = 8.0);
void write_gif(const std::string& path, const Video& video, double fps = 8.0);

// NumPy .npy, little-endian float32, shape (k, h, w).
void write_npy(const std::string& path, const Video& video);
// Accepts <f4 or <f8 C-order arrays of rank 2 (one frame) or 3.
Video read_npy(const std::string& path);

// Reference video for the target critic: a directory of grayscale PNGs
// (sorted by name), a .npy file, or a raw little-endian float32 file with a
// JSON sidecar (same stem, .json) holding {"shape": [k, h, w]}.
Video load_reference_video(const std::string& path);

}  // namespace sketchmotion
