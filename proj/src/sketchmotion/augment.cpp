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
#include "sketchmotion/augment.hpp"

#include <cmath>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

AugmentParams sample_augment(std::mt19937_64& rng, const AugmentRanges& ranges) {
  std::uniform_real_distribution<double> area(ranges.min_area, ranges.max_area);
  AugmentParams p;
  p.crop_side = std::sqrt(area(rng));
  std::uniform_real_distribution<double> offset(0.0, 1.0 - p.crop_side);
  p.crop_x = offset(rng);
  p.crop_y = offset(rng);
  std::uniform_real_distribution<double> jitter(-ranges.max_corner_jitter, ranges.max_corner_jitter);
  for (Point& c : p.corner_offsets) {
    c.x = jitter(rng);
    c.y = jitter(rng);
  }
  return p;
}

namespace {

// Unit square -> quad (p0 at (0,0), p1 at (1,0), p2 at (1,1), p3 at (0,1)).
std::array<double, 8> square_to_quad(const std::array<Point, 4>& q) {
  const double dx1 = q[1].x - q[2].x, dx2 = q[3].x - q[2].x, dx3 = q[0].x - q[1].x + q[2].x - q[3].x;
  const double dy1 = q[1].y - q[2].y, dy2 = q[3].y - q[2].y, dy3 = q[0].y - q[1].y + q[2].y - q[3].y;
  double g = 0.0, h = 0.0;
  if (dx3 != 0.0 || dy3 != 0.0) {
    const double den = dx1 * dy2 - dx2 * dy1;
    if (den == 0.0) throw InvalidArgument("degenerate perspective quad");
    g = (dx3 * dy2 - dx2 * dy3) / den;
    h = (dx1 * dy3 - dx3 * dy1) / den;
  }
  return {q[1].x - q[0].x + g * q[1].x, q[3].x - q[0].x + h * q[3].x, q[0].x,
          q[1].y - q[0].y + g * q[1].y, q[3].y - q[0].y + h * q[3].y, q[0].y, g, h};
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

}  // namespace

Augmentation::Augmentation(const AugmentParams& params, std::size_t height, std::size_t width)
    : params_(params), height_(height), width_(width) {
  const std::array<Point, 4> unit{Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
  std::array<Point, 4> quad{};
  for (int c = 0; c < 4; ++c) quad[c] = unit[c] + params.corner_offsets[c];
  homography_ = square_to_quad(quad);

  taps_.resize(height * width);
  const auto W = static_cast<std::int64_t>(width), H = static_cast<std::int64_t>(height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const Point s = source_of(y, x);
      const double fx = std::floor(s.x), fy = std::floor(s.y);
      const double tx = s.x - fx, ty = s.y - fy;
      const auto x0 = static_cast<std::int64_t>(fx), y0 = static_cast<std::int64_t>(fy);
      Taps& t = taps_[y * width + x];
      const std::array<std::int64_t, 4> xs{x0, x0 + 1, x0, x0 + 1}, ys{y0, y0, y0 + 1, y0 + 1};
      const std::array<double, 4> ws{(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
      for (int q = 0; q < 4; ++q) {
        if (ws[q] == 0.0) continue;
        if (xs[q] < 0 || ys[q] < 0 || xs[q] >= W || ys[q] >= H) {
          t.outside += ws[q];
        } else {
          t.index[q] = static_cast<std::int32_t>(ys[q] * W + xs[q]);
          t.weight[q] = ws[q];
        }
      }
    }
  }
}

Point Augmentation::source_of(std::size_t y, std::size_t x) const {
  const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width_);
  const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(height_);
  const auto& m = homography_;
  const double den = m[6] * u + m[7] * v + 1.0;
  const double wu = (m[0] * u + m[1] * v + m[2]) / den;
  const double wv = (m[3] * u + m[4] * v + m[5]) / den;
  const double su = params_.crop_x + params_.crop_side * wu;
  const double sv = params_.crop_y + params_.crop_side * wv;
  return {snap(su * static_cast<double>(width_) - 0.5), snap(sv * static_cast<double>(height_) - 0.5)};
}

Video Augmentation::apply(const Video& input) const {
  if (input.height() != height_ || input.width() != width_) throw ShapeMismatch("augmentation frame size mismatch");
  Video out(input.frames(), height_, width_);
  for (std::size_t j = 0; j < input.frames(); ++j) {
    const auto src = input.frame(j);
    auto dst = out.frame(j);
    for (std::size_t p = 0; p < taps_.size(); ++p) {
      const Taps& t = taps_[p];
      double v = t.outside;  // background is 1
      for (int q = 0; q < 4; ++q) {
        if (t.index[q] >= 0) v += t.weight[q] * src[static_cast<std::size_t>(t.index[q])];
      }
      dst[p] = v;
    }
  }
  return out;
}

Video Augmentation::backward(const Video& upstream) const {
  if (upstream.height() != height_ || upstream.width() != width_) throw ShapeMismatch("augmentation frame size mismatch");
  Video grad(upstream.frames(), height_, width_);
  for (std::size_t j = 0; j < upstream.frames(); ++j) {
    const auto up = upstream.frame(j);
    auto dst = grad.frame(j);
    for (std::size_t p = 0; p < taps_.size(); ++p) {
      const Taps& t = taps_[p];
      for (int q = 0; q < 4; ++q) {
        if (t.index[q] >= 0) dst[static_cast<std::size_t>(t.index[q])] += t.weight[q] * up[p];
      }
    }
  }
  return grad;
}

}  // namespace sketchmotion
