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
#include "sketchmotion/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

namespace {

double dist_to_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
  const Point q = a + t * ab;
  return std::hypot(p.x - q.x, p.y - q.y);
}

void subdivide(const std::array<Point, 4>& c, double u0, double u1, double tol, int depth,
               std::vector<double>& out) {
  const double flat = std::max(dist_to_segment(c[1], c[0], c[3]), dist_to_segment(c[2], c[0], c[3]));
  if (flat <= tol || depth >= 16) {
    out.push_back(u1);
    return;
  }
  const Point p01 = 0.5 * (c[0] + c[1]), p12 = 0.5 * (c[1] + c[2]), p23 = 0.5 * (c[2] + c[3]);
  const Point p012 = 0.5 * (p01 + p12), p123 = 0.5 * (p12 + p23);
  const Point mid = 0.5 * (p012 + p123);
  const double um = 0.5 * (u0 + u1);
  subdivide({c[0], p01, p012, mid}, u0, um, tol, depth + 1, out);
  subdivide({mid, p123, p23, c[3]}, um, u1, tol, depth + 1, out);
}

}  // namespace

std::array<double, 4> bernstein(double u) {
  const double v = 1.0 - u;
  return {v * v * v, 3.0 * u * v * v, 3.0 * u * u * v, u * u * u};
}

Point bezier_point(std::span<const Point, 4> cps, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("bezier parameter " + std::to_string(u) + " outside [0, 1]");
  const auto w = bernstein(u);
  Point p{};
  for (int k = 0; k < 4; ++k) p = p + w[k] * cps[k];
  return p;
}

Point bezier_point(const Stroke& stroke, double u) { return bezier_point(std::span<const Point, 4>(stroke.points), u); }

std::vector<double> flatten_parameters(std::span<const Point, 4> cps, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("flattening tolerance must be positive");
  std::vector<double> us{0.0};
  subdivide({cps[0], cps[1], cps[2], cps[3]}, 0.0, 1.0, tol, 0, us);
  return us;
}

std::vector<Point> flatten_stroke(const Stroke& stroke, double tol) {
  const std::span<const Point, 4> cps(stroke.points);
  std::vector<Point> out;
  for (double u : flatten_parameters(cps, tol)) out.push_back(bezier_point(cps, u));
  return out;
}

double AffineMatrix::operator()(int row, int col) const {
  if (row == 2) return col == 2 ? 1.0 : 0.0;
  return m_[row * 3 + col];
}

AffineMatrix AffineMatrix::operator*(const AffineMatrix& r) const {
  const auto& a = m_;
  const auto& b = r.m_;
  return AffineMatrix(a[0] * b[0] + a[1] * b[3], a[0] * b[1] + a[1] * b[4],
                      a[3] * b[0] + a[4] * b[3], a[3] * b[1] + a[4] * b[4],
                      a[0] * b[2] + a[1] * b[5] + a[2], a[3] * b[2] + a[4] * b[5] + a[5]);
}

namespace {

struct Factors {
  double c, s;         // rotation
  double h01, h10;     // shear off-diagonals
  double k0, k1;       // scale diagonal
  double tx, ty;
};

Factors factors(const AffineParams& p, const MotionLambdas& l) {
  const double phi = l.rotation * p.theta;
  return {std::cos(phi), std::sin(phi), l.shear * p.shx, l.shear * p.shy,
          1.0 + l.scale * p.sx, 1.0 + l.scale * p.sy, l.translation * p.dx, l.translation * p.dy};
}

}  // namespace

AffineMatrix compose_affine(const AffineParams& params, const MotionLambdas& lambdas) {
  const Factors f = factors(params, lambdas);
  // M = Shear * Scale = [k0, h01 k1; h10 k0, k1]
  const double m00 = f.k0, m01 = f.h01 * f.k1, m10 = f.h10 * f.k0, m11 = f.k1;
  // A = Rot * M, Rot = [c, -s; s, c]
  return AffineMatrix(f.c * m00 - f.s * m10, f.c * m01 - f.s * m11,
                      f.s * m00 + f.c * m10, f.s * m01 + f.c * m11, f.tx, f.ty);
}

AffineParams compose_affine_backward(const AffineParams& params, const MotionLambdas& lambdas,
                                     const std::array<double, 6>& g) {
  const Factors f = factors(params, lambdas);
  const double m00 = f.k0, m01 = f.h01 * f.k1, m10 = f.h10 * f.k0, m11 = f.k1;
  const double ga = g[0], gb = g[1], gc = g[3], gd = g[4];

  // dA/dphi = dRot/dphi * M, dRot/dphi = [-s, -c; c, -s]
  const double dphi = ga * (-f.s * m00 - f.c * m10) + gb * (-f.s * m01 - f.c * m11) +
                      gc * (f.c * m00 - f.s * m10) + gd * (f.c * m01 - f.s * m11);
  // dL/dM = Rot^T G
  const double gm00 = f.c * ga + f.s * gc, gm01 = f.c * gb + f.s * gd;
  const double gm10 = -f.s * ga + f.c * gc, gm11 = -f.s * gb + f.c * gd;

  AffineParams out;
  out.dx = lambdas.translation * g[2];
  out.dy = lambdas.translation * g[5];
  out.theta = lambdas.rotation * dphi;
  out.sx = lambdas.scale * (gm00 + gm10 * f.h10);
  out.sy = lambdas.scale * (gm11 + gm01 * f.h01);
  out.shx = lambdas.shear * gm01 * f.k1;
  out.shy = lambdas.shear * gm10 * f.k0;
  return out;
}

std::vector<Point> global_displacement(const AffineMatrix& transform, std::span<const Point> points, Point pivot) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (Point p : points) out.push_back(pivot + transform.apply(p - pivot) - p);
  return out;
}

std::vector<Point> global_displacement(const AffineMatrix& transform, const Sketch& sketch) {
  const std::vector<Point> pts = sketch.points();
  return global_displacement(transform, pts, sketch.canvas().center());
}

}  // namespace sketchmotion
