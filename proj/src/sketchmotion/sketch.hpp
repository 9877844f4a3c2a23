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
#include <cstddef>
#include <span>
#include <vector>

namespace sketchmotion {

// Canvas-unit coordinate. The canvas origin is the top-left corner.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline constexpr double kDefaultStrokeWidth = 1.5;
inline constexpr int kDefaultCanvasSize = 256;

struct Canvas {
  int width = kDefaultCanvasSize;
  int height = kDefaultCanvasSize;

  friend bool operator==(Canvas, Canvas) = default;
  Point center() const { return {0.5 * width, 0.5 * height}; }
};

// One cubic Bezier segment.
struct Stroke {
  std::array<Point, 4> points{};
  double width = kDefaultStrokeWidth;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

// An ordered collection of strokes. The flattened point order
// (stroke 0 points 0..3, stroke 1 points 0..3, ...) is the order the
// displacement field's positional encoding sees, so reordering strokes
// changes what a trained field does.
class Sketch {
 public:
  Sketch() = default;
  Sketch(std::vector<Stroke> strokes, Canvas canvas);

  const std::vector<Stroke>& strokes() const { return strokes_; }
  Canvas canvas() const { return canvas_; }
  std::size_t stroke_count() const { return strokes_.size(); }
  std::size_t point_count() const { return 4 * strokes_.size(); }
  bool empty() const { return strokes_.empty(); }

  std::vector<Point> points() const;
  std::vector<double> widths() const;

  // Same strokes and widths with control points replaced. Throws
  // ShapeMismatch unless points.size() == point_count().
  Sketch with_points(std::span<const Point> points) const;

  friend bool operator==(const Sketch&, const Sketch&) = default;

 private:
  std::vector<Stroke> strokes_;
  Canvas canvas_{};
};

// Row-major (frames, points, 2) tensor of canvas-unit offsets.
class Displacements {
 public:
  Displacements() = default;
  Displacements(std::size_t frames, std::size_t points)
      : frames_(frames), points_(points), data_(frames * points * 2, 0.0) {}

  std::size_t frames() const { return frames_; }
  std::size_t points() const { return points_; }

  Point at(std::size_t j, std::size_t i) const {
    const double* p = &data_[(j * points_ + i) * 2];
    return {p[0], p[1]};
  }
  void set(std::size_t j, std::size_t i, Point v) {
    double* p = &data_[(j * points_ + i) * 2];
    p[0] = v.x;
    p[1] = v.y;
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double mean_abs() const;
  double max_abs() const;

  friend bool operator==(const Displacements&, const Displacements&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t points_ = 0;
  std::vector<double> data_;
};

// A base sketch plus k frames of per-point displacements.
class MotionSequence {
 public:
  MotionSequence(Sketch base, Displacements displacements);
  // k static copies of the base.
  MotionSequence(Sketch base, std::size_t frames);

  const Sketch& base() const { return base_; }
  const Displacements& displacements() const { return displacements_; }
  std::size_t frame_count() const { return displacements_.frames(); }

  // Point set of frame j: base point i + displacement[j, i].
  std::vector<Point> frame_points(std::size_t j) const;
  Sketch materialize_frame(std::size_t j) const;

 private:
  Sketch base_;
  Displacements displacements_;
};

}  // namespace sketchmotion
