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

#include <cstddef>
#include <span>
#include <vector>

namespace sketchmotion {

// Dense (frames, height, width) grid of doubles, row-major. Rendered frames
// hold 1 for background and 0 for full ink.
class Video {
 public:
  Video() = default;
  Video(std::size_t frames, std::size_t height, std::size_t width, double fill = 0.0)
      : frames_(frames), height_(height), width_(width), data_(frames * height * width, fill) {}

  std::size_t frames() const { return frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t frame_size() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }

  bool same_shape(const Video& o) const {
    return frames_ == o.frames_ && height_ == o.height_ && width_ == o.width_;
  }

  double& at(std::size_t j, std::size_t y, std::size_t x) { return data_[(j * height_ + y) * width_ + x]; }
  double at(std::size_t j, std::size_t y, std::size_t x) const { return data_[(j * height_ + y) * width_ + x]; }

  std::span<double> frame(std::size_t j) { return {data_.data() + j * frame_size(), frame_size()}; }
  std::span<const double> frame(std::size_t j) const { return {data_.data() + j * frame_size(), frame_size()}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Video&, const Video&) = default;

 private:
  std::size_t frames_ = 0, height_ = 0, width_ = 0;
  std::vector<double> data_;
};

double mean_squared_error(const Video& a, const Video& b);

}  // namespace sketchmotion
