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
#include <random>

#include "sketchmotion/raster.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

using namespace sketchmotion;

namespace {

Sketch dyadic_sketch(std::mt19937_64& rng, int strokes, int size) {
  const Sketch s = oracle::random_sketch(rng, strokes, size, 8.0);
  std::vector<Point> pts = s.points();
  for (Point& p : pts) p = {std::round(p.x * 64.0) / 64.0, std::round(p.y * 64.0) / 64.0};
  return s.with_points(pts);
}

}  // namespace

TEST_CASE("soft coverage ramp") {
  CHECK(soft_coverage(0.0, 0.75, 1.0) > 0.9);
  CHECK(soft_coverage(0.75 + 1.0, 0.75, 1.0) == 0.0);
  CHECK(soft_coverage(10.0, 0.75, 1.0) == 0.0);
  CHECK(soft_coverage(0.75 - 1.0, 0.75, 1.0) == 1.0);
  CHECK(soft_coverage(0.75, 0.75, 1.0) == doctest::Approx(0.5));
  // Slope against central differences.
  for (double d = 0.0; d < 2.0; d += 0.037) {
    const double fd = (soft_coverage(d + 1e-7, 0.75, 1.0) - soft_coverage(d - 1e-7, 0.75, 1.0)) / 2e-7;
    CHECK(soft_coverage_slope(d, 0.75, 1.0) == doctest::Approx(fd).epsilon(1e-6).scale(1));
  }
}

TEST_CASE("empty sketch renders pure white") {
  const RasterFrame f = render_frame(std::span<const Point>{}, std::span<const double>{}, Canvas{32, 24});
  CHECK(f.width == 32);
  CHECK(f.height == 24);
  for (double v : f.pixels) CHECK(v == 1.0);
}

TEST_CASE("pixels outside the stroke support are exactly white") {
  const Stroke s{{Point{10, 10}, Point{12, 10}, Point{14, 10}, Point{16, 10}}, 1.5};
  const Sketch sk({s}, Canvas{32, 32});
  const RasterFrame f = render_frame(sk);
  const double reach = 0.75 + 1.0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const double d = oracle::segment_distance({x + 0.5, y + 0.5}, {10, 10}, {16, 10});
      if (d > reach) CHECK(f.at(y, x) == 1.0);
      if (d < 0.5) CHECK(f.at(y, x) < 0.5);
    }
  }
}

TEST_CASE("horizontal line matches the supersampling oracle") {
  const Stroke s{{Point{-8, 10.5}, Point{8, 10.5}, Point{24, 10.5}, Point{40, 10.5}}, 1.5};
  const Sketch sk({s}, Canvas{32, 24});
  const RasterFrame f = render_frame(sk);
  const auto ref = oracle::supersample(sk);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(f.pixels[i] - ref[i]));
  CHECK(worst <= 0.08);
}

TEST_CASE("random sketches match the supersampling oracle on average") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 3; ++trial) {
    const Sketch sk = oracle::random_sketch(rng, 4, 48);
    const RasterFrame f = render_frame(sk);
    const auto ref = oracle::supersample(sk);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) acc += std::abs(f.pixels[i] - ref[i]);
    CHECK(acc / ref.size() <= 0.08);
  }
}

TEST_CASE("overlapping strokes combine by maximum coverage") {
  const Stroke a{{Point{2, 8}, Point{8, 8}, Point{14, 8}, Point{20, 8}}, 1.5};
  const Stroke b{{Point{11, 2}, Point{11, 6}, Point{11, 10}, Point{11, 14}}, 3.0};
  const RasterFrame fa = render_frame(Sketch({a}, Canvas{24, 16}));
  const RasterFrame fb = render_frame(Sketch({b}, Canvas{24, 16}));
  const RasterFrame ab = render_frame(Sketch({a, b}, Canvas{24, 16}));
  const RasterFrame ba = render_frame(Sketch({b, a}, Canvas{24, 16}));
  for (std::size_t i = 0; i < ab.pixels.size(); ++i) {
    CHECK(ab.pixels[i] == std::min(fa.pixels[i], fb.pixels[i]));
    CHECK(ab.pixels[i] == ba.pixels[i]);
  }
}

TEST_CASE("zero upstream gives zero gradient") {
  std::mt19937_64 rng(43);
  const Sketch sk = oracle::random_sketch(rng, 4, 32);
  const std::vector<double> up(32 * 32, 0.0);
  for (const Point& g : render_backward(sk.points(), sk.widths(), sk.canvas(), {}, up)) CHECK(g == Point{0, 0});
}

TEST_CASE("mirror-symmetric input gives mirror-antisymmetric gradient") {
  const int w = 40;
  std::mt19937_64 rng(47);
  const Sketch half = oracle::random_sketch(rng, 2, w, 6.0);
  std::vector<Stroke> strokes = half.strokes();
  for (const Stroke& s : half.strokes()) {
    Stroke m = s;
    for (Point& p : m.points) p.x = w - p.x;
    strokes.push_back(m);
  }
  const Sketch sk(strokes, Canvas{w, w});
  std::vector<double> up(static_cast<std::size_t>(w) * w);
  for (int y = 0; y < w; ++y) {
    for (int x = 0; x < w / 2; ++x) {
      const double v = std::sin(0.3 * x + 0.1 * y);
      up[static_cast<std::size_t>(y) * w + x] = v;
      up[static_cast<std::size_t>(y) * w + (w - 1 - x)] = v;
    }
  }
  const auto g = render_backward(sk.points(), sk.widths(), sk.canvas(), {}, up);
  const std::size_t n = half.point_count();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(g[i].x == doctest::Approx(-g[n + i].x).epsilon(1e-9).scale(1e-3));
    CHECK(g[i].y == doctest::Approx(g[n + i].y).epsilon(1e-9).scale(1e-3));
  }
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(53);
  int scored = 0, passed = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const Sketch sk = oracle::random_sketch(rng, 4, 48);
    const auto w = checks::smooth_weights(rng, 48, 48);
    const auto report = checks::raster_gradcheck(sk, {}, w, 1e-3);
    scored += report.scored();
    passed += report.passed(1e-2);
  }
  REQUIRE(scored > 0);
  CHECK(static_cast<double>(passed) / scored >= 0.99);
}

TEST_CASE("tiny control point moves change pixels continuously") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Sketch sk = oracle::random_sketch(rng, 4, 48);
    const RasterFrame base = render_frame(sk);
    auto pts = sk.points();
    for (Point& p : pts) p = p + 1e-4 * Point{dir(rng), dir(rng)};
    const RasterFrame moved = render_frame(sk.with_points(pts));
    double worst = 0.0;
    for (std::size_t i = 0; i < base.pixels.size(); ++i) worst = std::max(worst, std::abs(base.pixels[i] - moved.pixels[i]));
    CHECK(worst < 1e-2);
  }
}

TEST_CASE("integer translation shifts the image") {
  std::mt19937_64 rng(61);
  const int size = 48, dx = 3, dy = -2;
  for (int trial = 0; trial < 5; ++trial) {
    const Sketch sk = dyadic_sketch(rng, 4, size);
    auto pts = sk.points();
    for (Point& p : pts) p = p + Point{dx, dy};
    const RasterFrame a = render_frame(sk);
    const RasterFrame b = render_frame(sk.with_points(pts));
    for (int y = 4; y < size - 4; ++y) {
      for (int x = 4; x < size - 4; ++x) CHECK(std::abs(b.at(y + dy, x + dx) - a.at(y, x)) <= 1e-12);
    }
  }
}

TEST_CASE("video rendering") {
  std::mt19937_64 rng(67);
  const Sketch sk = oracle::random_sketch(rng, 4, 64, 20.0);
  SUBCASE("zero displacement gives identical frames") {
    const Video v = render_video(MotionSequence(sk, 5), {}, 2);
    for (std::size_t j = 1; j < 5; ++j) CHECK(std::equal(v.frame(0).begin(), v.frame(0).end(), v.frame(j).begin()));
  }
  SUBCASE("single frame equals render_frame") {
    const Video v = render_video(MotionSequence(sk, 1));
    const RasterFrame f = render_frame(sk);
    CHECK(std::equal(f.pixels.begin(), f.pixels.end(), v.frame(0).begin()));
  }
  SUBCASE("translation ramp shifts frames") {
    const std::size_t k = 4;
    const int step = 2;
    Displacements dz(k, sk.point_count());
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < sk.point_count(); ++i) dz.set(j, i, {static_cast<double>(step * j), 0});
    }
    const Video v = render_video(MotionSequence(sk, dz), {}, 3);
    for (std::size_t j = 1; j < k; ++j) {
      const int s = step * static_cast<int>(j);
      double acc = 0.0;
      int n = 0;
      for (int y = 0; y < 64; ++y) {
        for (int x = s; x < 64; ++x, ++n) acc += std::abs(v.at(j, y, x) - v.at(0, y, x - s));
      }
      CHECK(acc / n <= 0.02);
    }
  }
  SUBCASE("thread count does not change the output") {
    Displacements dz(6, sk.point_count());
    std::normal_distribution<double> g(0.0, 3.0);
    for (double& d : dz.data()) d = g(rng);
    CHECK(render_video(MotionSequence(sk, dz), {}, 1) == render_video(MotionSequence(sk, dz), {}, 4));
  }
}
