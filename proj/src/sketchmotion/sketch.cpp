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

#include "sketchmotion/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

namespace {

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

Sketch::Sketch(std::vector<Stroke> strokes, Canvas canvas)
    : strokes_(std::move(strokes)), canvas_(canvas) {
  if (canvas_.width <= 0 || canvas_.height <= 0) {
    throw InvalidArgument("canvas dimensions must be positive");
  }
  for (std::size_t s = 0; s < strokes_.size(); ++s) {
    const Stroke& stroke = strokes_[s];
    if (!(stroke.width > 0.0) || !std::isfinite(stroke.width)) {
      throw InvalidArgument("stroke " + std::to_string(s) + " has non-positive width");
    }
    if (!std::all_of(stroke.points.begin(), stroke.points.end(), finite)) {
      throw InvalidArgument("stroke " + std::to_string(s) + " has a non-finite control point");
    }
  }
}

std::vector<Point> Sketch::points() const {
  std::vector<Point> out;
  out.reserve(point_count());
  for (const Stroke& s : strokes_) out.insert(out.end(), s.points.begin(), s.points.end());
  return out;
}

std::vector<double> Sketch::widths() const {
  std::vector<double> out;
  out.reserve(strokes_.size());
  for (const Stroke& s : strokes_) out.push_back(s.width);
  return out;
}

Sketch Sketch::with_points(std::span<const Point> points) const {
  if (points.size() != point_count()) {
    throw ShapeMismatch("expected " + std::to_string(point_count()) + " points, got " +
                        std::to_string(points.size()));
  }
  std::vector<Stroke> strokes = strokes_;
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    for (std::size_t c = 0; c < 4; ++c) strokes[s].points[c] = points[4 * s + c];
  }
  return Sketch(std::move(strokes), canvas_);
}

double Displacements::mean_abs() const {
  if (data_.empty()) return 0.0;
  double acc = 0.0;
  for (double v : data_) acc += std::abs(v);
  return acc / static_cast<double>(data_.size());
}

double Displacements::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

MotionSequence::MotionSequence(Sketch base, Displacements displacements)
    : base_(std::move(base)), displacements_(std::move(displacements)) {
  if (displacements_.points() != base_.point_count()) {
    throw ShapeMismatch("displacements cover " + std::to_string(displacements_.points()) +
                        " points but the sketch has " + std::to_string(base_.point_count()));
  }
}

MotionSequence::MotionSequence(Sketch base, std::size_t frames)
    : base_(std::move(base)), displacements_(frames, base_.point_count()) {}

std::vector<Point> MotionSequence::frame_points(std::size_t j) const {
  if (j >= frame_count()) {
    throw InvalidArgument("frame index " + std::to_string(j) + " out of range [0, " +
                          std::to_string(frame_count()) + ")");
  }
  std::vector<Point> pts = base_.points();
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = pts[i] + displacements_.at(j, i);
  return pts;
}

Sketch MotionSequence::materialize_frame(std::size_t j) const {
  return base_.with_points(frame_points(j));
}

}  // namespace sketchmotion
