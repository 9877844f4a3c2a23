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
#include "sketchmotion/wire.hpp"

#include <array>
#include <bit>
#include <cstring>

#include <json.hpp>

#include "sketchmotion/errors.hpp"

namespace sketchmotion::wire {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

using nlohmann::json;

std::array<std::size_t, 3> read_shape(const json& j) {
  if (!j.contains("shape") || !j["shape"].is_array() || j["shape"].size() != 3) {
    throw CriticProtocolError("message shape must be [k, h, w]");
  }
  std::array<std::size_t, 3> s{};
  for (std::size_t i = 0; i < 3; ++i) {
    const json& v = j["shape"][i];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw CriticProtocolError("shape entries must be non-negative integers");
    s[i] = v.get<std::size_t>();
  }
  return s;
}

json parse_message(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CriticProtocolError("message is not a JSON object");
  if (!j.contains("version") || j["version"] != kVersion) {
    throw CriticProtocolError("protocol version mismatch: expected \"" + std::string(kVersion) + "\", got " +
                              (j.contains("version") ? j["version"].dump() : std::string("none")));
  }
  if (!j.contains("data_b64") || !j["data_b64"].is_string()) throw CriticProtocolError("message has no data_b64 string");
  return j;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lut{};
  lut.fill(-1);
  for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kAlphabet[i])] = i;
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t pad = 0, symbols = 0;
  for (char c : text) {
    if (c == '=') {
      ++pad;
      continue;
    }
    if (c == '\n' || c == '\r') continue;
    const int v = lut[static_cast<unsigned char>(c)];
    if (v < 0 || pad > 0) throw CriticProtocolError("invalid base64 payload");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    ++symbols;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  if (pad > 2 || (symbols + pad) % 4 != 0) throw CriticProtocolError("invalid base64 padding");
  return out;
}

std::string encode_tensor(const Video& video) {
  std::vector<std::uint8_t> bytes(video.size() * 4);
  std::size_t o = 0;
  for (double v : video.data()) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) bytes[o++] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64_encode(bytes);
}

Video decode_tensor(std::string_view b64, std::size_t frames, std::size_t height, std::size_t width) {
  const std::vector<std::uint8_t> bytes = base64_decode(b64);
  Video v(frames, height, width);
  if (bytes.size() != v.size() * 4) {
    throw CriticShapeMismatch("payload holds " + std::to_string(bytes.size()) + " bytes, shape needs " +
                              std::to_string(v.size() * 4));
  }
  auto d = v.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + static_cast<std::size_t>(b)]) << (8 * b);
    d[i] = std::bit_cast<float>(bits);
  }
  return v;
}

std::string encode_request(const CriticRequest& r) {
  json j{{"version", kVersion},
         {"t", r.t},
         {"prompt", r.prompt},
         {"guidance_scale", r.guidance_scale},
         {"shape", {r.noisy.frames(), r.noisy.height(), r.noisy.width()}},
         {"data_b64", encode_tensor(r.noisy)}};
  return j.dump();
}

CriticRequest decode_request(std::string_view body) {
  const json j = parse_message(body);
  const auto s = read_shape(j);
  CriticRequest r;
  if (!j.contains("t") || !j["t"].is_number_integer()) throw CriticProtocolError("request has no integer t");
  r.t = j["t"].get<int>();
  r.prompt = j.value("prompt", std::string());
  r.guidance_scale = j.value("guidance_scale", 1.0);
  r.noisy = decode_tensor(j["data_b64"].get<std::string>(), s[0], s[1], s[2]);
  return r;
}

std::string encode_response(const CriticResponse& r) {
  json j{{"version", kVersion},
         {"shape", {r.noise_pred.frames(), r.noise_pred.height(), r.noise_pred.width()}},
         {"data_b64", encode_tensor(r.noise_pred)}};
  return j.dump();
}

CriticResponse decode_response(std::string_view body) {
  const json j = parse_message(body);
  const auto s = read_shape(j);
  return {decode_tensor(j["data_b64"].get<std::string>(), s[0], s[1], s[2])};
}

}  // namespace sketchmotion::wire
