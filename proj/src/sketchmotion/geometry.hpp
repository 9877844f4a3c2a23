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
#include <span>
#include <vector>

#include "sketchmotion/sketch.hpp"

namespace sketchmotion {

// (1-u)^3 P0 + 3u(1-u)^2 P1 + 3u^2(1-u) P2 + u^3 P3. Throws for u outside [0, 1].
Point bezier_point(const Stroke& stroke, double u);
Point bezier_point(std::span<const Point, 4> cps, double u);

// Bernstein weights at u, in control-point order.
std::array<double, 4> bernstein(double u);

inline constexpr double kDefaultFlattenTolerance = 0.1;

// Parameter values of an adaptive flattening. The first entry is 0, the last
// is 1, and the polyline through B(u) for these values deviates from the
// curve by at most tol. Subdivision is de Casteljau bisection with a
// control-polygon flatness test, capped at depth 16.
std::vector<double> flatten_parameters(std::span<const Point, 4> cps, double tol);

std::vector<Point> flatten_stroke(const Stroke& stroke, double tol = kDefaultFlattenTolerance);

// Raw global-path outputs. Scale is a residual: the applied factor is
// 1 + lambda_s * s.
struct AffineParams {
  double dx = 0.0, dy = 0.0;
  double theta = 0.0;
  double sx = 0.0, sy = 0.0;
  double shx = 0.0, shy = 0.0;

  static constexpr int kCount = 7;
  std::array<double, kCount> to_array() const { return {dx, dy, theta, sx, sy, shx, shy}; }
  static AffineParams from_array(std::span<const double, kCount> v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }
};

struct MotionLambdas {
  double translation = 1.0;
  double rotation = 1e-2;
  double scale = 5e-2;
  double shear = 1e-1;
};

// 3x3 homogeneous matrix, row-major, bottom row fixed at (0, 0, 1).
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(double a, double b, double c, double d, double tx, double ty)
      : m_{a, b, tx, c, d, ty} {}
  static AffineMatrix identity() { return {}; }

  double operator()(int row, int col) const;
  Point apply(Point p) const { return {m_[0] * p.x + m_[1] * p.y + m_[2], m_[3] * p.x + m_[4] * p.y + m_[5]}; }
  Point translation() const { return {m_[2], m_[5]}; }
  double linear_determinant() const { return m_[0] * m_[4] - m_[1] * m_[3]; }
  AffineMatrix operator*(const AffineMatrix& rhs) const;

  // Upper two rows: a b tx / c d ty.
  const std::array<double, 6>& rows() const { return m_; }

 private:
  std::array<double, 6> m_{1, 0, 0, 0, 1, 0};
};

// Translate(lambda_t d) * Rotate(lambda_r theta) * Shear(lambda_sh sh) *
// Scale(1 + lambda_s s): scale is applied first, translation last.
AffineMatrix compose_affine(const AffineParams& params, const MotionLambdas& lambdas);

// Gradient of a scalar loss w.r.t. the raw params, given dL/dT for the upper
// two rows of the composed matrix (same layout as AffineMatrix::rows()).
AffineParams compose_affine_backward(const AffineParams& params, const MotionLambdas& lambdas,
                                     const std::array<double, 6>& grad_rows);

// offset_i = pivot + T (p_i - pivot) - p_i.
std::vector<Point> global_displacement(const AffineMatrix& transform, std::span<const Point> points, Point pivot);
std::vector<Point> global_displacement(const AffineMatrix& transform, const Sketch& sketch);

}  // namespace sketchmotion
