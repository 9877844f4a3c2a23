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

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "sketchmotion/sketch.hpp"
#include "sketchmotion/video.hpp"

namespace sketchmotion {

// A square crop (in normalized source coordinates, side = sqrt(area
// fraction)) followed by a perspective warp given as per-corner offsets of
// the unit square, in the order top-left, top-right, bottom-right,
// bottom-left.
struct AugmentParams {
  double crop_x = 0.0;
  double crop_y = 0.0;
  double crop_side = 1.0;
  std::array<Point, 4> corner_offsets{};

  static AugmentParams identity() { return {}; }
};

struct AugmentRanges {
  double min_area = 0.81;
  double max_area = 1.0;
  double max_corner_jitter = 0.05;
};

AugmentParams sample_augment(std::mt19937_64& rng, const AugmentRanges& ranges = {});

// Precomputed bilinear resampling map. Every output pixel reads four source
// taps; taps outside the frame read the background value 1. The same map is
// applied to every frame of a video.
class Augmentation {
 public:
  Augmentation(const AugmentParams& params, std::size_t height, std::size_t width);

  const AugmentParams& params() const { return params_; }

  Video apply(const Video& input) const;
  // Adjoint of apply() for the input-dependent part.
  Video backward(const Video& upstream) const;

  // Source location (in pixel coordinates) sampled by output pixel (x, y).
  Point source_of(std::size_t y, std::size_t x) const;

 private:
  struct Taps {
    std::array<std::int32_t, 4> index{-1, -1, -1, -1};
    std::array<double, 4> weight{};
    double outside = 0.0;  // total weight of out-of-frame taps
  };

  AugmentParams params_;
  std::size_t height_, width_;
  std::array<double, 8> homography_{};
  std::vector<Taps> taps_;
};

}  // namespace sketchmotion
