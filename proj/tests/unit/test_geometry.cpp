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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sketchmotion/errors.hpp"
#include "sketchmotion/geometry.hpp"
#include "support/oracles.hpp"

using namespace sketchmotion;

namespace {

AffineParams random_params(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("bezier endpoints and midpoint") {
  const Stroke s{{Point{1, 2}, Point{4, 8}, Point{9, -3}, Point{12, 5}}, 1.5};
  CHECK(bezier_point(s, 0.0) == s.points[0]);
  CHECK(bezier_point(s, 1.0) == s.points[3]);
  const Point mid = bezier_point(s, 0.5);
  const auto& p = s.points;
  CHECK(mid.x == doctest::Approx((p[0].x + 3 * p[1].x + 3 * p[2].x + p[3].x) / 8).epsilon(1e-14));
  CHECK(mid.y == doctest::Approx((p[0].y + 3 * p[1].y + 3 * p[2].y + p[3].y) / 8).epsilon(1e-14));
  CHECK_THROWS_AS(bezier_point(s, -0.01), InvalidArgument);
  CHECK_THROWS_AS(bezier_point(s, 1.01), InvalidArgument);
}

TEST_CASE("bezier agrees with the power-basis form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-100, 100), uu(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Stroke s;
    for (auto& q : s.points) q = {c(rng), c(rng)};
    const double u = uu(rng);
    const Point a = bezier_point(s, u);
    const Point b = oracle::cubic_power(s.points, u);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12).scale(100));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12).scale(100));
    const auto w = bernstein(u);
    CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("flattening a straight cubic gives two points") {
  for (double tol : {1e-3, 0.1, 5.0}) {
    const Stroke s{{Point{0, 0}, Point{10, 5}, Point{20, 10}, Point{30, 15}}, 1.5};
    const auto poly = flatten_stroke(s, tol);
    REQUIRE(poly.size() == 2);
    CHECK(poly.front() == s.points[0]);
    CHECK(poly.back() == s.points[3]);
  }
}

TEST_CASE("degenerate stroke flattens to one zero-length segment") {
  const Stroke s{{Point{5, 5}, Point{5, 5}, Point{5, 5}, Point{5, 5}}, 1.5};
  const auto poly = flatten_stroke(s, 1e-9);
  REQUIRE(poly.size() == 2);
  CHECK(poly[0] == poly[1]);
}

TEST_CASE("flattened arc length approaches the dense-sampling oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(0, 256);
  for (int trial = 0; trial < 50; ++trial) {
    Stroke s;
    for (auto& q : s.points) q = {c(rng), c(rng)};
    const double dense = oracle::arc_length(s.points, 10000);
    for (double tol : {kDefaultFlattenTolerance, 1e-3}) {
      const auto poly = flatten_stroke(s, tol);
      CHECK(std::abs(oracle::polyline_length(poly) - dense) <= 0.01 * dense);
      // Every polyline vertex lies on the curve.
      for (const Point& v : poly) {
        double best = 1e300;
        for (int k = 0; k <= 10000; ++k) {
          const Point q = oracle::cubic_power(s.points, k / 10000.0);
          best = std::min(best, std::hypot(q.x - v.x, q.y - v.y));
        }
        CHECK(best < 0.05);
      }
    }
  }
}

TEST_CASE("flattening parameters are increasing dyadic fractions") {
  const std::array<Point, 4> cps{Point{0, 0}, Point{0, 100}, Point{100, 100}, Point{100, 0}};
  const auto us = flatten_parameters(cps, 0.1);
  REQUIRE(us.size() >= 3);
  CHECK(us.front() == 0.0);
  CHECK(us.back() == 1.0);
  for (std::size_t i = 1; i < us.size(); ++i) {
    CHECK(us[i] > us[i - 1]);
    const double scaled = us[i] * 65536.0;
    CHECK(scaled == std::floor(scaled));
  }
}

TEST_CASE("affine composition examples") {
  const MotionLambdas unit{1.0, 1.0, 1.0, 1.0};
  SUBCASE("zero parameters give the identity") {
    const AffineMatrix m = compose_affine({}, MotionLambdas{});
    CHECK(m.rows() == AffineMatrix::identity().rows());
  }
  SUBCASE("quarter rotation") {
    AffineParams p;
    p.theta = std::numbers::pi / 2;
    const Point q = compose_affine(p, unit).apply({1, 0});
    CHECK(q.x == doctest::Approx(0.0).scale(1));
    CHECK(q.y == doctest::Approx(1.0));
  }
  SUBCASE("scale applied before translation") {
    AffineParams p;
    p.sx = 1.0;
    p.dx = 3.0;
    const Point q = compose_affine(p, unit).apply({1, 1});
    CHECK(q.x == doctest::Approx(5.0));
    CHECK(q.y == doctest::Approx(1.0));
  }
  SUBCASE("lambda scaling attenuates each component") {
    AffineParams p;
    p.theta = 100.0;
    const MotionLambdas lam{1.0, 1e-2, 1.0, 1.0};
    const AffineMatrix m = compose_affine(p, lam);
    CHECK(m(0, 0) == doctest::Approx(std::cos(1.0)));
    CHECK(m(1, 0) == doctest::Approx(std::sin(1.0)));
  }
}

TEST_CASE("linear determinant matches the closed form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const AffineParams p = random_params(rng);
    const MotionLambdas l{lam(rng), lam(rng), lam(rng), lam(rng)};
    const double expected = (1 + l.scale * p.sx) * (1 + l.scale * p.sy) * (1 - l.shear * l.shear * p.shx * p.shy);
    CHECK(compose_affine(p, l).linear_determinant() == doctest::Approx(expected).epsilon(1e-12).scale(1));
    // With one shear component at zero the shear factor is unimodular.
    AffineParams q = p;
    q.shy = 0.0;
    CHECK(compose_affine(q, l).linear_determinant() ==
          doctest::Approx((1 + l.scale * p.sx) * (1 + l.scale * p.sy)).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("composed transforms preserve collinearity") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> c(-50, 50), t(-3, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const AffineMatrix m = compose_affine(random_params(rng), MotionLambdas{});
    const Point a{c(rng), c(rng)}, b{c(rng), c(rng)};
    const double s = t(rng);
    const Point on{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
    const Point ta = m.apply(a), tb = m.apply(b), tc = m.apply(on);
    const double scale = std::max(1.0, std::hypot(tb.x - ta.x, tb.y - ta.y) * std::hypot(tc.x - ta.x, tc.y - ta.y));
    CHECK(std::abs(oracle::cross3(ta, tb, tc)) / scale < 1e-9);
  }
}

TEST_CASE("zero translation weight fixes the pivot") {
  std::mt19937_64 rng(23);
  MotionLambdas l;
  l.translation = 0.0;
  const Point pivot{128, 128};
  for (int trial = 0; trial < 100; ++trial) {
    const AffineMatrix m = compose_affine(random_params(rng, 10.0), l);
    CHECK(m.translation() == Point{0, 0});
    const Point pts[] = {pivot};
    const auto off = global_displacement(m, pts, pivot);
    CHECK(off[0] == Point{0, 0});
  }
}

TEST_CASE("global displacement examples") {
  const Point pivot{128, 128};
  const Point pts[] = {Point{10, 20}, Point{129, 128}, Point{200, 50}};
  SUBCASE("identity") {
    for (const Point& d : global_displacement(AffineMatrix::identity(), pts, pivot)) CHECK(d == Point{0, 0});
  }
  SUBCASE("pure translation") {
    for (const Point& d : global_displacement(AffineMatrix(1, 0, 0, 1, 3, 0), pts, pivot)) CHECK(d == Point{3, 0});
  }
  SUBCASE("half turn about the pivot") {
    AffineParams p;
    p.theta = std::numbers::pi;
    const auto d = global_displacement(compose_affine(p, {1, 1, 1, 1}), pts, pivot);
    CHECK(d[1].x == doctest::Approx(-2.0));
    CHECK(d[1].y == doctest::Approx(0.0).scale(1));
  }
}

TEST_CASE("compose_affine_backward matches finite differences") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> g(-1, 1);
  const MotionLambdas l{0.7, 0.3, 0.4, 0.6};
  for (int trial = 0; trial < 50; ++trial) {
    const AffineParams p = random_params(rng, 1.5);
    std::array<double, 6> up;
    for (double& v : up) v = g(rng);
    auto loss = [&](const AffineParams& q) {
      const auto r = compose_affine(q, l).rows();
      double acc = 0.0;
      for (int i = 0; i < 6; ++i) acc += up[i] * r[i];
      return acc;
    };
    const auto grad = compose_affine_backward(p, l, up).to_array();
    const auto base = p.to_array();
    for (int c = 0; c < AffineParams::kCount; ++c) {
      auto hi = base, lo = base;
      hi[c] += 1e-6;
      lo[c] -= 1e-6;
      const double fd = (loss(AffineParams::from_array(hi)) - loss(AffineParams::from_array(lo))) / 2e-6;
      CHECK(grad[c] == doctest::Approx(fd).epsilon(1e-6).scale(1));
    }
  }
}
