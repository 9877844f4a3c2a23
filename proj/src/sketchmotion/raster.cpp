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
#include "sketchmotion/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchmotion/errors.hpp"
#include "sketchmotion/parallel.hpp"

namespace sketchmotion {

namespace {

struct Closest {
  double distance;
  double t;
  Point normal;  // unit vector from the closest point to the query, zero if coincident
};

Closest closest_on_segment(Point q, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / len2, 0.0, 1.0);
  const Point c = a + t * ab;
  const Point diff = q - c;
  const double d = std::hypot(diff.x, diff.y);
  return {d, t, d > 0.0 ? (1.0 / d) * diff : Point{}};
}

double ramp(double distance, double half_width, double aa) {
  return std::clamp((half_width + aa - distance) / (2.0 * aa), 0.0, 1.0);
}

void check_layout(std::span<const Point> points, std::span<const double> widths) {
  if (points.size() != 4 * widths.size()) {
    throw ShapeMismatch("expected 4 control points per stroke: " + std::to_string(points.size()) +
                        " points for " + std::to_string(widths.size()) + " strokes");
  }
}

}  // namespace

double soft_coverage(double distance, double half_width, double aa_width) {
  const double r = ramp(distance, half_width, aa_width);
  return r * r * (3.0 - 2.0 * r);
}

double soft_coverage_slope(double distance, double half_width, double aa_width) {
  const double r = ramp(distance, half_width, aa_width);
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return -6.0 * r * (1.0 - r) / (2.0 * aa_width);
}

RasterFrame render_frame(std::span<const Point> points, std::span<const double> widths, Canvas canvas,
                         const RasterOptions& options, RenderTrace* trace) {
  check_layout(points, widths);
  if (!(options.aa_width > 0.0)) throw InvalidArgument("aa_width must be positive");
  const int W = canvas.width, H = canvas.height;
  const double aa = options.aa_width;

  RasterFrame frame{W, H, std::vector<double>(static_cast<std::size_t>(W) * H, 1.0)};

  std::vector<RenderTrace::Segment> segments;
  for (std::size_t s = 0; s < widths.size(); ++s) {
    const std::span<const Point, 4> cps(points.data() + 4 * s, 4);
    const std::vector<double> us = flatten_parameters(cps, options.flatten_tolerance);
    Point prev = bezier_point(cps, us[0]);
    for (std::size_t k = 1; k < us.size(); ++k) {
      const Point next = bezier_point(cps, us[k]);
      segments.push_back({prev, next, us[k - 1], us[k], static_cast<std::uint32_t>(s), 0.5 * widths[s]});
      prev = next;
    }
  }

  // Bucket grid: every segment is listed in each cell its support touches.
  const int cell = std::max(options.cell_size, 1);
  const int cols = (W + cell - 1) / cell, rows = (H + cell - 1) / cell;
  std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(cols) * rows);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& sg = segments[i];
    const double r = sg.half_width + aa;
    const double x0 = std::min(sg.a.x, sg.b.x) - r, x1 = std::max(sg.a.x, sg.b.x) + r;
    const double y0 = std::min(sg.a.y, sg.b.y) - r, y1 = std::max(sg.a.y, sg.b.y) + r;
    if (x1 < 0 || y1 < 0 || x0 > W || y0 > H) continue;
    const int cx0 = std::clamp(static_cast<int>(std::floor(x0 / cell)), 0, cols - 1);
    const int cx1 = std::clamp(static_cast<int>(std::floor(x1 / cell)), 0, cols - 1);
    const int cy0 = std::clamp(static_cast<int>(std::floor(y0 / cell)), 0, rows - 1);
    const int cy1 = std::clamp(static_cast<int>(std::floor(y1 / cell)), 0, rows - 1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) buckets[static_cast<std::size_t>(cy) * cols + cx].push_back(static_cast<std::uint32_t>(i));
    }
  }

  std::vector<std::int32_t> owner;
  if (trace) owner.assign(frame.pixels.size(), -1);

  for (int cy = 0; cy < rows; ++cy) {
    for (int cx = 0; cx < cols; ++cx) {
      const auto& bucket = buckets[static_cast<std::size_t>(cy) * cols + cx];
      if (bucket.empty()) continue;
      const int ye = std::min(H, (cy + 1) * cell), xe = std::min(W, (cx + 1) * cell);
      for (int y = cy * cell; y < ye; ++y) {
        for (int x = cx * cell; x < xe; ++x) {
          const Point q{x + 0.5, y + 0.5};
          double best = 0.0;
          std::int32_t arg = -1;
          // Bucket lists are in segment (and so stroke) order; strict '>'
          // keeps the first maximizer.
          for (std::uint32_t i : bucket) {
            const auto& sg = segments[i];
            const double cov = soft_coverage(closest_on_segment(q, sg.a, sg.b).distance, sg.half_width, aa);
            if (cov > best) {
              best = cov;
              arg = static_cast<std::int32_t>(i);
            }
          }
          const std::size_t idx = static_cast<std::size_t>(y) * W + x;
          frame.pixels[idx] = 1.0 - best;
          if (trace) owner[idx] = arg;
        }
      }
    }
  }

  if (trace) {
    trace->canvas = canvas;
    trace->options = options;
    trace->segments = std::move(segments);
    trace->owner = std::move(owner);
  }
  return frame;
}

RasterFrame render_frame(const Sketch& sketch, const RasterOptions& options) {
  const auto pts = sketch.points();
  const auto widths = sketch.widths();
  return render_frame(pts, widths, sketch.canvas(), options);
}

std::vector<Point> render_backward(const RenderTrace& trace, std::span<const double> upstream,
                                   std::size_t point_count) {
  const int W = trace.canvas.width, H = trace.canvas.height;
  if (upstream.size() != static_cast<std::size_t>(W) * H) {
    throw ShapeMismatch("upstream gradient has " + std::to_string(upstream.size()) + " entries, frame has " +
                        std::to_string(static_cast<std::size_t>(W) * H));
  }
  std::vector<Point> grad(point_count);
  const double aa = trace.options.aa_width;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * W + x;
      const std::int32_t s = trace.owner[idx];
      const double g = upstream[idx];
      if (s < 0 || g == 0.0) continue;
      const auto& sg = trace.segments[static_cast<std::size_t>(s)];
      const Closest c = closest_on_segment({x + 0.5, y + 0.5}, sg.a, sg.b);
      // pixel = 1 - coverage(d)
      const double dpix_dd = -soft_coverage_slope(c.distance, sg.half_width, aa);
      if (dpix_dd == 0.0) continue;
      const double scale = g * dpix_dd;
      // dd/dA = -n (1 - t), dd/dB = -n t
      const Point ga = (-scale * (1.0 - c.t)) * c.normal;
      const Point gb = (-scale * c.t) * c.normal;
      const auto wa = bernstein(sg.ua), wb = bernstein(sg.ub);
      Point* cp = grad.data() + 4 * sg.stroke;
      for (int k = 0; k < 4; ++k) cp[k] = cp[k] + wa[k] * ga + wb[k] * gb;
    }
  }
  return grad;
}

std::vector<Point> render_backward(std::span<const Point> points, std::span<const double> widths, Canvas canvas,
                                   const RasterOptions& options, std::span<const double> upstream) {
  RenderTrace trace;
  render_frame(points, widths, canvas, options, &trace);
  return render_backward(trace, upstream, points.size());
}

Video render_video(const MotionSequence& sequence, const RasterOptions& options, int threads,
                   std::vector<RenderTrace>* traces) {
  const Canvas canvas = sequence.base().canvas();
  const std::vector<double> widths = sequence.base().widths();
  const std::size_t k = sequence.frame_count();
  Video video(k, static_cast<std::size_t>(canvas.height), static_cast<std::size_t>(canvas.width));
  if (traces) traces->assign(k, RenderTrace{});
  parallel_for(k, threads, [&](std::size_t j) {
    const std::vector<Point> pts = sequence.frame_points(j);
    RasterFrame f = render_frame(pts, widths, canvas, options, traces ? &(*traces)[j] : nullptr);
    std::copy(f.pixels.begin(), f.pixels.end(), video.frame(j).begin());
  });
  return video;
}

double mean_squared_error(const Video& a, const Video& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("videos differ in shape");
  if (a.size() == 0) return 0.0;
  double acc = 0.0;
  const auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) acc += (da[i] - db[i]) * (da[i] - db[i]);
  return acc / static_cast<double>(da.size());
}

}  // namespace sketchmotion
