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
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sketchmotion/augment.hpp"
#include "sketchmotion/video.hpp"

namespace sketchmotion {

enum class SdsWeighting {
  kSigmaSquared,  // w(t) = 1 - alpha_bar_t
  kOne,
};

// Variance-preserving DDPM schedule with linear betas. Index 0 is the clean
// limit (alpha_bar = 1); valid diffusion steps are 1..steps().
class NoiseSchedule {
 public:
  explicit NoiseSchedule(int steps = 1000, double beta_start = 1e-4, double beta_end = 0.02,
                         SdsWeighting weighting = SdsWeighting::kSigmaSquared);

  int steps() const { return steps_; }
  double beta(int t) const;
  double alpha_bar(int t) const;
  double signal_scale(int t) const;  // sqrt(alpha_bar)
  double noise_scale(int t) const;   // sqrt(1 - alpha_bar)
  double weight(int t) const;
  SdsWeighting weighting() const { return weighting_; }

 private:
  void check(int t) const;

  int steps_;
  SdsWeighting weighting_;
  std::vector<double> beta_;       // beta_[t], beta_[0] unused
  std::vector<double> alpha_bar_;  // alpha_bar_[0] = 1
};

// x_t = a_t x + sigma_t eps.
Video add_noise(const Video& clean, int t, const Video& noise, const NoiseSchedule& schedule);

// Uniform integer in [lo, hi].
int sample_timestep(std::mt19937_64& rng, int lo = 50, int hi = 950);

// Standard normal video.
Video sample_noise(std::mt19937_64& rng, std::size_t frames, std::size_t height, std::size_t width);

// w(t) (eps_hat - eps): the gradient handed to the rasterizer backward.
Video sds_pixel_grad(const Video& predicted, const Video& noise, int t, const NoiseSchedule& schedule);

// Maps renders in [0, 1] to the critic range [-1, 1]; inverted flips the
// polarity so ink becomes +1.
Video to_critic_range(const Video& frames, bool inverted = false);
// d(critic value)/d(render value) of to_critic_range.
inline double critic_range_slope(bool inverted) { return inverted ? -2.0 : 2.0; }

struct CriticRequest {
  Video noisy;
  int t = 0;
  std::string prompt;
  double guidance_scale = 1.0;
};

struct CriticResponse {
  Video noise_pred;
};

// What the optimizer knows about the current step beyond the request
// itself. In-process critics may use it; remote critics never see it.
struct StepContext {
  const Video* clean = nullptr;  // critic-range video before noising
  const Video* noise = nullptr;  // eps used for noising
  const Augmentation* augmentation = nullptr;
  bool inverted = false;
  const NoiseSchedule* schedule = nullptr;
};

class VideoCritic {
 public:
  virtual ~VideoCritic() = default;
  virtual CriticResponse predict(const CriticRequest& request, const StepContext& context) = 0;
  virtual std::string describe() const = 0;
  // Reference video in render range, when the critic is defined by one.
  virtual const Video* reference() const { return nullptr; }
  // Throws CriticError when the critic cannot serve requests.
  virtual void check_health() {}
};

// Closed-form critic whose score pulls renders toward a reference video:
//   eps_hat = eps + gs * (a_t / sigma_t) * (x - x_ref)
// which is (x_t - a_t x_ref) / sigma_t at gs = 1. The reference goes
// through the step's augmentation and range mapping, like the render.
class TargetVideoCritic : public VideoCritic {
 public:
  explicit TargetVideoCritic(Video reference);
  CriticResponse predict(const CriticRequest& request, const StepContext& context) override;
  std::string describe() const override { return "target"; }
  const Video* reference() const override { return &reference_; }

 private:
  Video reference_;
};

// Predicts the exact noise, so the SDS gradient is always zero.
class ZeroCritic : public VideoCritic {
 public:
  CriticResponse predict(const CriticRequest& request, const StepContext& context) override;
  std::string describe() const override { return "zero"; }
};

// HTTP client for the critic wire protocol.
class RemoteCritic : public VideoCritic {
 public:
  explicit RemoteCritic(std::string endpoint, double timeout_seconds = 120.0);
  CriticResponse predict(const CriticRequest& request, const StepContext& context) override;
  std::string describe() const override { return "remote:" + endpoint_; }
  void check_health() override;
  // Model id reported by the last successful health probe.
  const std::string& model() const { return model_; }

 private:
  std::string endpoint_;
  double timeout_;
  std::string model_;
};

std::unique_ptr<VideoCritic> make_target_critic_from_file(const std::string& path);

}  // namespace sketchmotion
