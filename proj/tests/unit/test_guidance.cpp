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

#include "sketchmotion/augment.hpp"
#include "sketchmotion/errors.hpp"
#include "sketchmotion/guidance.hpp"
#include "support/oracles.hpp"

using namespace sketchmotion;

namespace {

Video random_video(std::mt19937_64& rng, std::size_t k, std::size_t h, std::size_t w, double lo = 0.0,
                   double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Video v(k, h, w);
  for (double& x : v.data()) x = u(rng);
  return v;
}

// Linear-beta cumulative product computed in long double.
long double alpha_bar_oracle(int t, int steps = 1000, long double b0 = 1e-4L, long double b1 = 0.02L) {
  long double prod = 1.0L;
  for (int s = 1; s <= t; ++s) prod *= 1.0L - (b0 + (b1 - b0) * (s - 1) / (steps - 1));
  return prod;
}

double dot(std::span<const double> a, std::span<const double> b) { return oracle::weighted_sum(a, b); }

}  // namespace

TEST_CASE("noise schedule identities") {
  const NoiseSchedule s;
  CHECK(s.steps() == 1000);
  CHECK(s.alpha_bar(0) == 1.0);
  CHECK(s.alpha_bar(1) == doctest::Approx(0.9999).epsilon(1e-15));
  for (int t : {50, 500, 950}) CHECK(std::abs(s.alpha_bar(t) - static_cast<double>(alpha_bar_oracle(t))) < 1e-10);
  for (int t = 0; t <= 1000; ++t) {
    const double a = s.signal_scale(t), sg = s.noise_scale(t);
    CHECK(std::abs(a * a + sg * sg - 1.0) < 1e-12);
    CHECK(s.weight(t) == doctest::Approx(sg * sg));
  }
  CHECK(NoiseSchedule(1000, 1e-4, 0.02, SdsWeighting::kOne).weight(500) == 1.0);
  CHECK_THROWS_AS(s.alpha_bar(1001), InvalidArgument);
  CHECK_THROWS_AS(s.alpha_bar(-1), InvalidArgument);
}

TEST_CASE("noising at alpha_bar = 1 returns the clean video") {
  std::mt19937_64 rng(1);
  const Video x = random_video(rng, 2, 4, 5);
  const Video e = sample_noise(rng, 2, 4, 5);
  CHECK(add_noise(x, 0, e, NoiseSchedule()) == x);
}

TEST_CASE("timestep sampling") {
  std::mt19937_64 rng(2);
  const int n = 100000;
  int lo = 1 << 30, hi = -1;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int t = sample_timestep(rng);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    sum += t;
  }
  CHECK(lo >= 50);
  CHECK(hi <= 950);
  const double width = 901.0;
  const double sd = std::sqrt((width * width - 1.0) / 12.0) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - 500.0) < 3.0 * sd);

  std::mt19937_64 a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(sample_timestep(a) == sample_timestep(b));
  CHECK_THROWS_AS(sample_timestep(a, 10, 5), InvalidArgument);
}

TEST_CASE("SDS pixel gradient") {
  std::mt19937_64 rng(3);
  const NoiseSchedule sigma2;
  const NoiseSchedule one(1000, 1e-4, 0.02, SdsWeighting::kOne);
  const Video e = sample_noise(rng, 2, 3, 4);
  SUBCASE("exact prediction gives zero") {
    const Video g = sds_pixel_grad(e, e, 400, sigma2);
    for (double v : g.data()) CHECK(v == 0.0);
  }
  SUBCASE("unit weight passes the residual through") {
    Video pred = e;
    for (double& v : pred.data()) v += 0.5;
    const Video g = sds_pixel_grad(pred, e, 400, one);
    for (double v : g.data()) CHECK(v == doctest::Approx(0.5));
  }
  SUBCASE("linear in the residual") {
    const Video r1 = random_video(rng, 2, 3, 4, -1, 1), r2 = random_video(rng, 2, 3, 4, -1, 1);
    Video p1 = e, p2 = e, p12 = e;
    for (std::size_t i = 0; i < e.size(); ++i) {
      p1.data()[i] += r1.data()[i];
      p2.data()[i] += r2.data()[i];
      p12.data()[i] += 2.0 * r1.data()[i] - 3.0 * r2.data()[i];
    }
    const Video g1 = sds_pixel_grad(p1, e, 300, sigma2), g2 = sds_pixel_grad(p2, e, 300, sigma2);
    const Video g12 = sds_pixel_grad(p12, e, 300, sigma2);
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(g12.data()[i] == doctest::Approx(2.0 * g1.data()[i] - 3.0 * g2.data()[i]).epsilon(1e-9).scale(1));
    }
  }
  SUBCASE("shape mismatch") { CHECK_THROWS_AS(sds_pixel_grad(Video(1, 3, 4), e, 3, sigma2), ShapeMismatch); }
}

TEST_CASE("critic range mapping") {
  Video v(1, 1, 3);
  v.data()[0] = 0.0;
  v.data()[1] = 0.25;
  v.data()[2] = 1.0;
  const Video m = to_critic_range(v);
  CHECK(m.data()[0] == -1.0);
  CHECK(m.data()[1] == -0.5);
  CHECK(m.data()[2] == 1.0);
  const Video inv = to_critic_range(v, true);
  CHECK(inv.data()[0] == 1.0);
  CHECK(inv.data()[2] == -1.0);
  CHECK(critic_range_slope(false) == 2.0);
  CHECK(critic_range_slope(true) == -2.0);
}

TEST_CASE("target critic") {
  std::mt19937_64 rng(4);
  const NoiseSchedule sched;
  const Video ref = random_video(rng, 3, 6, 7);
  TargetVideoCritic critic(ref);
  CHECK(critic.reference() != nullptr);

  auto run = [&](const Video& render, int t, double gs, const Augmentation* aug) {
    const Video x = to_critic_range(aug ? aug->apply(render) : render);
    const Video e = sample_noise(rng, 3, 6, 7);
    const StepContext ctx{&x, &e, aug, false, &sched};
    const CriticRequest req{add_noise(x, t, e, sched), t, "a prompt", gs};
    return std::tuple{sds_pixel_grad(critic.predict(req, ctx).noise_pred, e, t, sched), x, req};
  };

  SUBCASE("render equal to the reference is a fixed point") {
    const auto [g, x, req] = run(ref, 500, 40.0, nullptr);
    for (double v : g.data()) CHECK(v == 0.0);
    std::mt19937_64 arng(5);
    const Augmentation aug(sample_augment(arng), 6, 7);
    const auto [ga, xa, reqa] = run(ref, 700, 30.0, &aug);
    for (double v : ga.data()) CHECK(v == 0.0);
  }
  SUBCASE("zero guidance scale gives zero gradient") {
    const auto [g, x, req] = run(random_video(rng, 3, 6, 7), 300, 0.0, nullptr);
    for (double v : g.data()) CHECK(v == 0.0);
  }
  SUBCASE("gradient is a positive multiple of F - F*") {
    std::uniform_int_distribution<int> tt(50, 950);
    for (int trial = 0; trial < 5; ++trial) {
      const Video f = random_video(rng, 3, 6, 7);
      const int t = tt(rng);
      const auto [g, x, req] = run(f, t, 7.5, nullptr);
      double ratio = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double diff = f.data()[i] - ref.data()[i];
        if (std::abs(diff) < 1e-3) continue;
        const double r = g.data()[i] / diff;
        if (ratio == 0.0) ratio = r;
        CHECK(r == doctest::Approx(ratio).epsilon(1e-9));
      }
      CHECK(ratio > 0.0);
      // Descent direction on ||F - F*||^2 in render space.
      std::vector<double> obj(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) obj[i] = 2.0 * (f.data()[i] - ref.data()[i]);
      CHECK(dot(g.data(), obj) >= 0.0);
    }
  }
  SUBCASE("matches the gradient of the x0-distillation objective") {
    // L(x) = 1/2 ||x - sg(x0_hat)||^2 with x0_hat = (x_t - sigma eps_hat) / a. SDS equals w a / sigma * dL/dx.
    const int t = 420;
    const Video f = random_video(rng, 3, 6, 7);
    const Video x = to_critic_range(f);
    const Video e = sample_noise(rng, 3, 6, 7);
    const StepContext ctx{&x, &e, nullptr, false, &sched};
    const CriticRequest req{add_noise(x, t, e, sched), t, "p", 12.0};
    const Video eps_hat = critic.predict(req, ctx).noise_pred;
    const Video g = sds_pixel_grad(eps_hat, e, t, sched);
    const double a = sched.signal_scale(t), s = sched.noise_scale(t);
    std::vector<double> x0(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x0[i] = (req.noisy.data()[i] - s * eps_hat.data()[i]) / a;
    auto loss = [&](std::span<const double> xv) {
      double acc = 0.0;
      for (std::size_t i = 0; i < xv.size(); ++i) acc += 0.5 * (xv[i] - x0[i]) * (xv[i] - x0[i]);
      return acc;
    };
    std::vector<double> xv(x.data().begin(), x.data().end());
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double keep = xv[i];
      xv[i] = keep + 1e-5;
      const double hi = loss(xv);
      xv[i] = keep - 1e-5;
      const double lo = loss(xv);
      xv[i] = keep;
      const double fd = (hi - lo) / 2e-5;
      CHECK(g.data()[i] == doctest::Approx(sched.weight(t) * a / s * fd).epsilon(1e-6).scale(1e-6));
    }
  }
  SUBCASE("reference shape must match") {
    const Video x(2, 6, 7), e(2, 6, 7);
    const StepContext ctx{&x, &e, nullptr, false, &sched};
    CHECK_THROWS_AS(critic.predict(CriticRequest{x, 10, "p", 1.0}, ctx), CriticShapeMismatch);
  }
}

TEST_CASE("zero critic predicts the injected noise") {
  std::mt19937_64 rng(6);
  const NoiseSchedule sched;
  const Video x = random_video(rng, 2, 4, 4, -1, 1);
  const Video e = sample_noise(rng, 2, 4, 4);
  ZeroCritic critic;
  const StepContext ctx{&x, &e, nullptr, false, &sched};
  CHECK(critic.predict(CriticRequest{add_noise(x, 100, e, sched), 100, "p", 30.0}, ctx).noise_pred == e);
}

TEST_CASE("augmentation") {
  std::mt19937_64 rng(7);
  SUBCASE("identity parameters leave the input unchanged") {
    const Video v = random_video(rng, 2, 17, 23);
    CHECK(Augmentation(AugmentParams::identity(), 17, 23).apply(v) == v);
  }
  SUBCASE("white stays white") {
    for (int trial = 0; trial < 20; ++trial) {
      const Augmentation aug(sample_augment(rng), 20, 20);
      const Video out = aug.apply(Video(2, 20, 20, 1.0));
      for (double v : out.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("sampled parameters stay in range") {
    const AugmentRanges r;
    for (int trial = 0; trial < 1000; ++trial) {
      const AugmentParams p = sample_augment(rng, r);
      CHECK(p.crop_side * p.crop_side >= r.min_area - 1e-12);
      CHECK(p.crop_side * p.crop_side <= r.max_area + 1e-12);
      CHECK(p.crop_x >= 0.0);
      CHECK(p.crop_y >= 0.0);
      CHECK(p.crop_x + p.crop_side <= 1.0 + 1e-12);
      CHECK(p.crop_y + p.crop_side <= 1.0 + 1e-12);
      for (const Point& o : p.corner_offsets) {
        CHECK(std::abs(o.x) <= r.max_corner_jitter);
        CHECK(std::abs(o.y) <= r.max_corner_jitter);
      }
    }
  }
  SUBCASE("backward is the adjoint and matches finite differences") {
    for (int trial = 0; trial < 5; ++trial) {
      const Augmentation aug(sample_augment(rng), 12, 15);
      const Video in = random_video(rng, 2, 12, 15);
      const Video w = random_video(rng, 2, 12, 15, -1, 1);
      const Video g = aug.backward(w);
      auto loss = [&](const Video& v) { return dot(aug.apply(v).data(), w.data()); };
      Video probe = in;
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double keep = probe.data()[i];
        probe.data()[i] = keep + 1e-4;
        const double hi = loss(probe);
        probe.data()[i] = keep - 1e-4;
        const double lo = loss(probe);
        probe.data()[i] = keep;
        const double fd = (hi - lo) / 2e-4;
        if (std::max(std::abs(fd), std::abs(g.data()[i])) > 1e-8) {
          CHECK(oracle::rel_err(g.data()[i], fd) < 1e-3);
        }
      }
    }
  }
}
