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

#include "sketchmotion/errors.hpp"
#include "sketchmotion/field.hpp"
#include "sketchmotion/svg.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

using namespace sketchmotion;

namespace {

FieldConfig small_config(int frames, int strokes, int size, std::uint64_t seed = 1) {
  FieldConfig c;
  c.embed_dim = 16;
  c.local_hidden = {24, 24};
  c.global_hidden = {16};
  c.frames = frames;
  c.points = 4 * strokes;
  c.canvas = Canvas{size, size};
  c.seed = seed;
  return c;
}

// Sketch whose first stroke has collinear control points.
Sketch with_straight_stroke(std::mt19937_64& rng, int strokes, int size) {
  const Sketch s = oracle::random_sketch(rng, strokes, size, 6.0);
  std::vector<Stroke> st = s.strokes();
  st[0].points = {Point{10, 20}, Point{20, 25}, Point{35, 32.5}, Point{50, 40}};
  return Sketch(st, s.canvas());
}

double smooth_loss(DisplacementField& f, const Sketch& s, const MotionLambdas& l, const std::vector<double>& u) {
  return oracle::weighted_sum(f.forward(s, l).total.data(), u);
}

}  // namespace

TEST_CASE("fresh field predicts exactly zero motion") {
  const Sketch s = load_svg(SM_FIXTURES "/fish16.svg");
  FieldConfig c;
  c.canvas = s.canvas();
  DisplacementField f(c);
  const FieldOutput out = f.forward(s, MotionLambdas{});
  CHECK(out.local.frames() == 24);
  CHECK(out.local.points() == 64);
  CHECK(out.total.data().size() == 24 * 64 * 2);
  for (double v : out.total.data()) CHECK(v == 0.0);
  for (double v : out.local.data()) CHECK(v == 0.0);
  for (double v : out.global.data()) CHECK(v == 0.0);
  for (const AffineMatrix& t : out.transforms) CHECK(t.rows() == AffineMatrix::identity().rows());
  CHECK(f.parameter_count() == f.block(Branch::kShared).size() + f.block(Branch::kLocal).size() +
                                   f.block(Branch::kGlobal).size());
}

TEST_CASE("positional encoding") {
  FieldConfig c;
  DisplacementField f(c);
  const auto pe00 = f.raw_encoding(0, 0);
  CHECK(pe00[0] == 0.0);
  CHECK(pe00[1] == 1.0);

  SUBCASE("zero shared projection leaves features equal to the encoding") {
    std::mt19937_64 rng(2);
    const Sketch s = oracle::random_sketch(rng, 16, 256);
    auto& shared = f.block(Branch::kShared);
    for (const auto& slice : shared.slices()) {
      if (slice.name == "shared.proj") {
        for (double& v : shared.values().subspan(slice.offset, slice.size())) v = 0.0;
      }
    }
    CHECK(f.embed(s) == f.positional_features());
  }

  SUBCASE("every (frame, point) pair is encoded distinctly") {
    const int k = 24, n = 64;
    std::vector<std::vector<double>> all;
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < n; ++i) all.push_back(f.raw_encoding(j, i));
    }
    int collisions = 0;
    for (std::size_t a = 0; a < all.size(); ++a) {
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        double d = 0.0;
        for (std::size_t q = 0; q < all[a].size(); ++q) d = std::max(d, std::abs(all[a][q] - all[b][q]));
        collisions += d < 1e-9 ? 1 : 0;
      }
    }
    CHECK(collisions == 0);
  }
}

TEST_CASE("same seed gives identical parameters and outputs") {
  std::mt19937_64 rng(3);
  const Sketch s = oracle::random_sketch(rng, 3, 64);
  DisplacementField a(small_config(5, 3, 64, 9)), b(small_config(5, 3, 64, 9)), c(small_config(5, 3, 64, 10));
  for (Branch br : {Branch::kShared, Branch::kLocal, Branch::kGlobal}) {
    CHECK(std::equal(a.block(br).values().begin(), a.block(br).values().end(), b.block(br).values().begin()));
  }
  CHECK_FALSE(std::equal(a.block(Branch::kShared).values().begin(), a.block(Branch::kShared).values().end(),
                         c.block(Branch::kShared).values().begin()));
  checks::randomize_field(a, 4, 0.3);
  checks::randomize_field(b, 4, 0.3);
  CHECK(a.forward(s, {}).total == b.forward(s, {}).total);
}

TEST_CASE("total displacement is the sum of both branches") {
  std::mt19937_64 rng(5);
  const Sketch s = oracle::random_sketch(rng, 3, 64);
  DisplacementField f(small_config(6, 3, 64));
  checks::randomize_field(f, 6, 0.5);
  const FieldOutput out = f.forward(s, MotionLambdas{});
  for (std::size_t q = 0; q < out.total.data().size(); ++q) {
    CHECK(out.total.data()[q] == out.local.data()[q] + out.global.data()[q]);
  }
}

TEST_CASE("global branch alone is affine per frame") {
  std::mt19937_64 rng(7);
  const Sketch s = with_straight_stroke(rng, 4, 64);
  DisplacementField f(small_config(6, 4, 64));
  checks::randomize_field(f, 8, 2.0);
  // Keep only the global output random: local output back to zero.
  auto& local = f.block(Branch::kLocal);
  const auto& last_w = local.slices()[local.slices().size() - 2];
  const auto& last_b = local.slices().back();
  for (double& v : local.values().subspan(last_w.offset, last_w.size())) v = 0.0;
  for (double& v : local.values().subspan(last_b.offset, last_b.size())) v = 0.0;

  const MotionLambdas lam{1.0, 0.5, 0.3, 0.3};
  const FieldOutput out = f.forward(s, lam);
  CHECK(out.total == out.global);
  const auto base = s.points();
  const MotionSequence seq(s, out.global);
  for (std::size_t j = 0; j < seq.frame_count(); ++j) {
    const auto p = seq.frame_points(j);
    const double scale = std::hypot(p[3].x - p[0].x, p[3].y - p[0].y);
    CHECK(std::abs(oracle::cross3(p[0], p[1], p[3])) / (scale * scale) < 1e-6);
    CHECK(std::abs(oracle::cross3(p[0], p[2], p[3])) / (scale * scale) < 1e-6);
    // Area ratios are preserved by an affine map.
    const double r0 = oracle::cross3(base[4], base[5], base[6]) / oracle::cross3(base[8], base[9], base[10]);
    const double r1 = oracle::cross3(p[4], p[5], p[6]) / oracle::cross3(p[8], p[9], p[10]);
    CHECK(r1 == doctest::Approx(r0).epsilon(1e-9));
  }
}

TEST_CASE("zero translation weight fixes the pivot in every frame") {
  std::mt19937_64 rng(9);
  const Sketch s = oracle::random_sketch(rng, 3, 64);
  DisplacementField f(small_config(5, 3, 64));
  checks::randomize_field(f, 10, 3.0);
  MotionLambdas lam;
  lam.translation = 0.0;
  const Point pivot = f.config().resolved_pivot();
  for (const AffineMatrix& t : f.forward(s, lam).transforms) {
    const Point q = t.apply(pivot - pivot) + pivot;
    CHECK(std::abs(q.x - pivot.x) < 1e-6);
    CHECK(std::abs(q.y - pivot.y) < 1e-6);
  }
}

TEST_CASE("parameter gradients match finite differences of a smooth loss") {
  std::mt19937_64 rng(11);
  const Sketch s = oracle::random_sketch(rng, 2, 64);
  for (PositionalEncoding mode : {PositionalEncoding::kSinusoidal, PositionalEncoding::kLearned}) {
    FieldConfig c = small_config(4, 2, 64);
    c.pe_mode = mode;
    DisplacementField f(c);
    checks::randomize_field(f, 12, 0.5);
    const MotionLambdas lam{1.0, 0.5, 0.5, 0.5};
    const std::vector<double> u = oracle::random_weights(rng, 4 * 8 * 2);
    f.forward(s, lam);
    Displacements up(4, 8);
    std::copy(u.begin(), u.end(), up.data().begin());
    f.backward(up);
    double worst = 0.0;
    for (Branch br : {Branch::kShared, Branch::kLocal, Branch::kGlobal}) {
      auto& block = f.block(br);
      const std::vector<double> g(block.grads().begin(), block.grads().end());
      for (std::size_t i = 0; i < block.size(); ++i) {
        double& v = block.values()[i];
        const double keep = v;
        v = keep + 1e-6;
        const double hi = smooth_loss(f, s, lam, u);
        v = keep - 1e-6;
        const double lo = smooth_loss(f, s, lam, u);
        v = keep;
        const double fd = (hi - lo) / 2e-6;
        if (std::max(std::abs(fd), std::abs(g[i])) > 1e-6) worst = std::max(worst, oracle::rel_err(g[i], fd));
      }
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("backward path selection isolates branches") {
  std::mt19937_64 rng(13);
  const Sketch s = oracle::random_sketch(rng, 2, 64);
  DisplacementField f(small_config(4, 2, 64));
  checks::randomize_field(f, 14, 0.5);
  f.forward(s, {});
  Displacements up(4, 8);
  for (double& v : up.data()) v = 0.7;

  auto all_zero = [](std::span<const double> g) {
    return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
  };
  f.backward(up, BackwardPaths::kLocalOnly);
  CHECK(all_zero(f.block(Branch::kGlobal).grads()));
  CHECK_FALSE(all_zero(f.block(Branch::kLocal).grads()));
  CHECK_FALSE(all_zero(f.block(Branch::kShared).grads()));

  f.backward(up, BackwardPaths::kGlobalOnly);
  CHECK(all_zero(f.block(Branch::kLocal).grads()));
  CHECK_FALSE(all_zero(f.block(Branch::kGlobal).grads()));

  f.backward(Displacements(4, 8), BackwardPaths::kBoth);
  for (Branch br : {Branch::kShared, Branch::kLocal, Branch::kGlobal}) CHECK(all_zero(f.block(br).grads()));
}

TEST_CASE("end-to-end gradients through the rasterizer") {
  std::mt19937_64 rng(15);
  const Sketch s = oracle::random_sketch(rng, 2, 32, 6.0);
  DisplacementField f(small_config(4, 2, 32));
  checks::randomize_field(f, 16, 0.3);
  const auto report = checks::field_gradcheck(f, s, MotionLambdas{}, {}, 17, 6, 1e-3);
  REQUIRE(report.scored() > 20);
  CHECK(report.passed(1e-2) == report.scored());
}

TEST_CASE("mismatched sketch size is rejected") {
  std::mt19937_64 rng(19);
  DisplacementField f(small_config(4, 2, 32));
  CHECK_THROWS_AS(f.forward(oracle::random_sketch(rng, 3, 32), {}), ShapeMismatch);
}
