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
#include <string_view>
#include <vector>

#include "sketchmotion/guidance.hpp"

namespace sketchmotion::wire {

inline constexpr const char* kVersion = "1";
inline constexpr const char* kPredictPath = "/v1/predict_noise";
inline constexpr const char* kHealthPath = "/v1/health";
inline constexpr std::size_t kMaxPayloadBytes = 64u << 20;

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws CriticProtocolError on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian float32, row-major (k, h, w).
std::string encode_tensor(const Video& video);
// Throws CriticShapeMismatch when the payload length disagrees with shape.
Video decode_tensor(std::string_view b64, std::size_t frames, std::size_t height, std::size_t width);

std::string encode_request(const CriticRequest& request);
CriticRequest decode_request(std::string_view body);
std::string encode_response(const CriticResponse& response);
CriticResponse decode_response(std::string_view body);

}  // namespace sketchmotion::wire
