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
#include <vector>

#include "sketchmotion/geometry.hpp"
#include "sketchmotion/sketch.hpp"
#include "sketchmotion/video.hpp"

namespace sketchmotion {

struct RasterOptions {
  double aa_width = 1.0;  // half-width of the coverage ramp, px
  double flatten_tolerance = kDefaultFlattenTolerance;
  int cell_size = 8;  // bucket grid cell, px
};

// Grayscale frame, 1 = background, 0 = full ink.
struct RasterFrame {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Soft coverage of a pixel whose center lies at distance d from the
// centerline of a stroke of the given half width: a linear ramp over
// [half_width - aa, half_width + aa] passed through smoothstep.
double soft_coverage(double distance, double half_width, double aa_width);
// d(coverage)/d(distance).
double soft_coverage_slope(double distance, double half_width, double aa_width);

// Forward-pass record needed by the backward pass. Subdivision parameters
// are frozen here and treated as constants when differentiating.
struct RenderTrace {
  struct Segment {
    Point a, b;
    double ua = 0.0, ub = 0.0;
    std::uint32_t stroke = 0;
    double half_width = 0.0;
  };
  Canvas canvas;
  RasterOptions options;
  std::vector<Segment> segments;
  std::vector<std::int32_t> owner;  // per pixel: winning segment or -1
};

// points holds 4 control points per stroke in stroke order; widths one
// entry per stroke. Overlapping strokes combine by max coverage, ties going
// to the lower stroke index.
RasterFrame render_frame(std::span<const Point> points, std::span<const double> widths, Canvas canvas,
                         const RasterOptions& options = {}, RenderTrace* trace = nullptr);
RasterFrame render_frame(const Sketch& sketch, const RasterOptions& options = {});

// Gradient of sum(upstream * frame) with respect to every control point
// coordinate. upstream is (height * width), row-major.
std::vector<Point> render_backward(const RenderTrace& trace, std::span<const double> upstream,
                                   std::size_t point_count);
std::vector<Point> render_backward(std::span<const Point> points, std::span<const double> widths, Canvas canvas,
                                   const RasterOptions& options, std::span<const double> upstream);

// Renders every frame of a motion sequence; frames are independent and
// may be spread over 'threads' workers.
Video render_video(const MotionSequence& sequence, const RasterOptions& options = {}, int threads = 1,
                   std::vector<RenderTrace>* traces = nullptr);

}  // namespace sketchmotion
