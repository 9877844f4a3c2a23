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
#include "sketchmotion/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

using nlohmann::json;

namespace {

constexpr std::size_t kMagicLen = 5;

const std::array<std::pair<Branch, const char*>, 3> kBlocks{
    {{Branch::kShared, "shared"}, {Branch::kLocal, "local"}, {Branch::kGlobal, "global"}}};

json config_json(const FieldConfig& c) {
  const Point pivot = c.resolved_pivot();
  return {{"embed_dim", c.embed_dim},
          {"local_hidden", c.local_hidden},
          {"global_hidden", c.global_hidden},
          {"pe_frequencies", c.pe_frequencies},
          {"pe_mode", c.pe_mode == PositionalEncoding::kLearned ? "learned" : "sinusoidal"},
          {"frames", c.frames},
          {"points", c.points},
          {"canvas", {c.canvas.width, c.canvas.height}},
          {"pivot", {pivot.x, pivot.y}},
          {"seed", c.seed}};
}

FieldConfig config_from_json(const json& j) {
  FieldConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.local_hidden = j.at("local_hidden").get<std::vector<int>>();
  c.global_hidden = j.at("global_hidden").get<std::vector<int>>();
  c.pe_frequencies = j.at("pe_frequencies").get<int>();
  c.pe_mode = j.at("pe_mode").get<std::string>() == "learned" ? PositionalEncoding::kLearned : PositionalEncoding::kSinusoidal;
  c.frames = j.at("frames").get<int>();
  c.points = j.at("points").get<int>();
  c.canvas = {j.at("canvas").at(0).get<int>(), j.at("canvas").at(1).get<int>()};
  c.pivot = Point{j.at("pivot").at(0).get<double>(), j.at("pivot").at(1).get<double>()};
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string encode_checkpoint(const DisplacementField& field, const MotionLambdas& lambdas) {
  json tensors = json::array();
  std::size_t offset = 0;
  for (const auto& [branch, name] : kBlocks) {
    for (const auto& s : field.block(branch).slices()) {
      tensors.push_back({{"name", s.name}, {"block", name}, {"shape", {s.rows, s.cols}}, {"offset", offset}});
      offset += s.size();
    }
  }
  const json header{{"format", kCheckpointMagic},
                    {"dtype", "<f4"},
                    {"field", config_json(field.config())},
                    {"lambdas",
                     {{"translation", lambdas.translation},
                      {"rotation", lambdas.rotation},
                      {"scale", lambdas.scale},
                      {"shear", lambdas.shear}}},
                    {"count", offset},
                    {"tensors", tensors}};
  const std::string h = header.dump();
  std::string out(kCheckpointMagic, kMagicLen);
  const auto len = static_cast<std::uint32_t>(h.size());
  for (int b = 0; b < 4; ++b) out += static_cast<char>((len >> (8 * b)) & 0xFF);
  out += h;
  out.reserve(out.size() + offset * 4);
  for (const auto& [branch, name] : kBlocks) {
    for (double v : field.block(branch).values()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 4 || bytes.compare(0, kMagicLen, kCheckpointMagic) != 0) {
    throw ParseError("not an SKMF1 checkpoint");
  }
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[kMagicLen + static_cast<std::size_t>(b)])) << (8 * b);
  const std::size_t data = kMagicLen + 4 + len;
  if (data > bytes.size()) throw ParseError("truncated checkpoint header");
  const json header = json::parse(bytes.substr(kMagicLen + 4, len), nullptr, false);
  if (header.is_discarded() || header.value("format", std::string()) != kCheckpointMagic) {
    throw ParseError("malformed checkpoint header");
  }
  try {
    Checkpoint ck{DisplacementField(config_from_json(header.at("field"))), {}};
    const json& l = header.at("lambdas");
    ck.lambdas = {l.at("translation").get<double>(), l.at("rotation").get<double>(), l.at("scale").get<double>(),
                  l.at("shear").get<double>()};
    const std::size_t count = header.at("count").get<std::size_t>();
    if (count != ck.field.parameter_count()) throw ParseError("checkpoint parameter count does not match its config");
    if (bytes.size() - data != count * 4) throw ParseError("checkpoint data length does not match its header");
    std::size_t idx = 0;
    for (const auto& [branch, name] : kBlocks) {
      for (double& v : ck.field.block(branch).values()) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[data + 4 * idx + static_cast<std::size_t>(b)])) << (8 * b);
        v = std::bit_cast<float>(bits);
        ++idx;
      }
    }
    return ck;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const DisplacementField& field, const MotionLambdas& lambdas) {
  const std::string bytes = encode_checkpoint(field, lambdas);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace sketchmotion
