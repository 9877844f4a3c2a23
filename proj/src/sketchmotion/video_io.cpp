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
#include "sketchmotion/video_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>

#include <png.h>
#include <json.hpp>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

namespace fs = std::filesystem;

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("failed writing " + path);
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void write(std::uint32_t code, int bits) {
    acc_ |= code << nbits_;
    nbits_ += bits;
    while (nbits_ >= 8) {
      block_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
      acc_ >>= 8;
      nbits_ -= 8;
      if (block_.size() == 255) flush_block();
    }
  }
  void finish() {
    if (nbits_ > 0) block_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
    acc_ = 0;
    nbits_ = 0;
    flush_block();
    out_.push_back(0);  // block terminator
  }

 private:
  void flush_block() {
    if (block_.empty()) return;
    out_.push_back(static_cast<std::uint8_t>(block_.size()));
    out_.insert(out_.end(), block_.begin(), block_.end());
    block_.clear();
  }
  std::vector<std::uint8_t>& out_;
  std::vector<std::uint8_t> block_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

void lzw_encode(std::span<const std::uint8_t> px, std::vector<std::uint8_t>& out) {
  constexpr std::uint32_t kClear = 256;
  out.push_back(8);  // minimum code size
  BitWriter bw(out);
  int code_size = 9;
  std::uint32_t max_code = kClear + 1;
  std::unordered_map<std::uint32_t, std::uint32_t> dict;
  bw.write(kClear, code_size);
  if (px.empty()) {
    bw.write(kClear + 1, code_size);
    bw.finish();
    return;
  }
  std::uint32_t prefix = px[0];
  for (std::size_t i = 1; i < px.size(); ++i) {
    const std::uint32_t key = (prefix << 8) | px[i];
    if (auto it = dict.find(key); it != dict.end()) {
      prefix = it->second;
      continue;
    }
    bw.write(prefix, code_size);
    dict[key] = ++max_code;
    if (max_code >= (1u << code_size)) ++code_size;
    if (max_code == 4095) {
      bw.write(kClear, code_size);
      dict.clear();
      code_size = 9;
      max_code = kClear + 1;
    }
    prefix = px[i];
  }
  bw.write(prefix, code_size);
  bw.write(kClear + 1, code_size);
  bw.finish();
}

void put16(std::vector<std::uint8_t>& o, std::size_t v) {
  o.push_back(static_cast<std::uint8_t>(v & 0xFF));
  o.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

}  // namespace

void write_png(const std::string& path, std::span<const double> pixels, std::size_t height, std::size_t width) {
  if (pixels.size() != height * width) throw ShapeMismatch("png pixel count does not match size");
  std::vector<std::uint8_t> bytes(pixels.size());
  std::transform(pixels.begin(), pixels.end(), bytes.begin(), to_byte);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError("cannot write " + path + ": " + image.message);
  }
}

std::vector<double> read_png(const std::string& path, std::size_t& height, std::size_t& width) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) throw IoError("cannot read " + path + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode " + path + ": " + image.message);
  }
  height = image.height;
  width = image.width;
  std::vector<double> out(bytes.size());
  std::transform(bytes.begin(), bytes.end(), out.begin(), [](std::uint8_t b) { return b / 255.0; });
  return out;
}

void write_png_sequence(const std::string& dir, const Video& video) {
  fs::create_directories(dir);
  for (std::size_t j = 0; j < video.frames(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", j);
    write_png((fs::path(dir) / name).string(), video.frame(j), video.height(), video.width());
  }
}

std::vector<std::uint8_t> encode_gif(const Video& video, double fps) {
  if (!(fps > 0.0)) throw InvalidArgument("fps must be positive");
  if (video.width() > 0xFFFF || video.height() > 0xFFFF) throw InvalidArgument("frame too large for GIF");
  std::vector<std::uint8_t> o{'G', 'I', 'F', '8', '9', 'a'};
  put16(o, video.width());
  put16(o, video.height());
  o.push_back(0xF7);  // global color table, 8 bits, 256 entries
  o.push_back(0);
  o.push_back(0);
  for (int i = 0; i < 256; ++i) o.insert(o.end(), 3, static_cast<std::uint8_t>(i));
  // NETSCAPE2.0 loop forever
  const std::uint8_t loop[] = {0x21, 0xFF, 0x0B, 'N', 'E', 'T', 'S', 'C', 'A', 'P', 'E', '2', '.', '0', 0x03, 0x01, 0x00, 0x00, 0x00};
  o.insert(o.end(), std::begin(loop), std::end(loop));
  const auto delay_cs = static_cast<std::size_t>(std::lround(100.0 / fps));
  std::vector<std::uint8_t> px(video.frame_size());
  for (std::size_t j = 0; j < video.frames(); ++j) {
    o.insert(o.end(), {0x21, 0xF9, 0x04, 0x00});
    put16(o, delay_cs);
    o.insert(o.end(), {0x00, 0x00});
    o.push_back(0x2C);
    put16(o, 0);
    put16(o, 0);
    put16(o, video.width());
    put16(o, video.height());
    o.push_back(0);
    const auto f = video.frame(j);
    std::transform(f.begin(), f.end(), px.begin(), to_byte);
    lzw_encode(px, o);
  }
  o.push_back(0x3B);
  return o;
}

void write_gif(const std::string& path, const Video& video, double fps) {
  const auto bytes = encode_gif(video, fps);
  write_file(path, bytes.data(), bytes.size());
}

void write_npy(const std::string& path, const Video& video) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" + std::to_string(video.frames()) + ", " +
                       std::to_string(video.height()) + ", " + std::to_string(video.width()) + "), }";
  const std::size_t prefix = 10;
  const std::size_t total = (prefix + header.size() + 1 + 63) / 64 * 64;
  header.append(total - prefix - header.size() - 1, ' ');
  header += '\n';
  std::string out = "\x93NUMPY";
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(header.size() & 0xFF);
  out += static_cast<char>((header.size() >> 8) & 0xFF);
  out += header;
  for (double v : video.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  write_file(path, out.data(), out.size());
}

Video read_npy(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0) throw ParseError(path + ": not a .npy file");
  const int major = static_cast<unsigned char>(bytes[6]);
  std::size_t hlen = 0, start = 0;
  if (major == 1) {
    hlen = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw ParseError(path + ": truncated header");
    for (int b = 0; b < 4; ++b) hlen |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + static_cast<std::size_t>(b)])) << (8 * b);
    start = 12;
  } else {
    throw ParseError(path + ": unsupported .npy version");
  }
  if (start + hlen > bytes.size()) throw ParseError(path + ": truncated header");
  const std::string header = bytes.substr(start, hlen);
  std::smatch m;
  if (!std::regex_search(header, m, std::regex("'descr':\\s*'([<|=]?)(f4|f8)'"))) {
    throw ParseError(path + ": only little-endian float32/float64 arrays are supported");
  }
  const bool f8 = m[2] == "f8";
  if (std::regex_search(header, std::regex("'fortran_order':\\s*True"))) throw ParseError(path + ": Fortran order not supported");
  if (!std::regex_search(header, m, std::regex("'shape':\\s*\\(([^)]*)\\)"))) throw ParseError(path + ": no shape");
  std::vector<std::size_t> shape;
  const std::string dims = m[1];
  const std::regex digits("\\d+");
  for (std::sregex_iterator it(dims.begin(), dims.end(), digits), end; it != end; ++it) {
    shape.push_back(std::stoul(it->str()));
  }
  if (shape.size() == 2) shape.insert(shape.begin(), 1);
  if (shape.size() != 3) throw ParseError(path + ": expected a rank-2 or rank-3 array");
  Video v(shape[0], shape[1], shape[2]);
  const std::size_t elem = f8 ? 8 : 4;
  const std::size_t data = start + hlen;
  if (bytes.size() - data != v.size() * elem) throw ParseError(path + ": data length does not match shape");
  auto d = v.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < elem; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[data + i * elem + b])) << (8 * b);
    d[i] = f8 ? std::bit_cast<double>(bits) : static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits)));
  }
  return v;
}

Video load_reference_video(const std::string& path) {
  const fs::path p(path);
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError(path + " contains no PNG frames");
    std::size_t h = 0, w = 0;
    std::vector<std::vector<double>> frames;
    for (const auto& f : files) {
      std::size_t fh = 0, fw = 0;
      frames.push_back(read_png(f.string(), fh, fw));
      if (frames.size() == 1) {
        h = fh;
        w = fw;
      } else if (fh != h || fw != w) {
        throw ShapeMismatch(f.string() + " differs in size from the first frame");
      }
    }
    Video v(frames.size(), h, w);
    for (std::size_t j = 0; j < frames.size(); ++j) std::copy(frames[j].begin(), frames[j].end(), v.frame(j).begin());
    return v;
  }
  if (p.extension() == ".npy") return read_npy(path);

  fs::path sidecar = p;
  sidecar.replace_extension(".json");
  if (!fs::exists(sidecar)) throw IoError("no JSON sidecar " + sidecar.string() + " for raw tensor " + path);
  const auto meta = nlohmann::json::parse(read_file(sidecar.string()), nullptr, false);
  if (meta.is_discarded() || !meta.contains("shape") || !meta["shape"].is_array() || meta["shape"].size() != 3) {
    throw ParseError(sidecar.string() + ": expected {\"shape\": [k, h, w]}");
  }
  Video v(meta["shape"][0].get<std::size_t>(), meta["shape"][1].get<std::size_t>(), meta["shape"][2].get<std::size_t>());
  const std::string bytes = read_file(path);
  if (bytes.size() != v.size() * 4) throw ParseError(path + ": data length does not match sidecar shape");
  auto d = v.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + static_cast<std::size_t>(b)])) << (8 * b);
    d[i] = std::bit_cast<float>(bits);
  }
  return v;
}

}  // namespace sketchmotion
