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
#include "sketchmotion/guidance.hpp"

#include <cmath>
#include <string>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

NoiseSchedule::NoiseSchedule(int steps, double beta_start, double beta_end, SdsWeighting weighting)
    : steps_(steps), weighting_(weighting) {
  if (steps < 1) throw InvalidArgument("schedule needs at least one step");
  beta_.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  alpha_bar_.assign(static_cast<std::size_t>(steps) + 1, 1.0);
  for (int t = 1; t <= steps; ++t) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(t - 1) / (steps - 1);
    beta_[static_cast<std::size_t>(t)] = beta_start + (beta_end - beta_start) * frac;
    alpha_bar_[static_cast<std::size_t>(t)] = alpha_bar_[static_cast<std::size_t>(t) - 1] * (1.0 - beta_[static_cast<std::size_t>(t)]);
  }
}

void NoiseSchedule::check(int t) const {
  if (t < 0 || t > steps_) throw InvalidArgument("timestep " + std::to_string(t) + " outside [0, " + std::to_string(steps_) + "]");
}

double NoiseSchedule::beta(int t) const {
  check(t);
  return beta_[static_cast<std::size_t>(t)];
}
double NoiseSchedule::alpha_bar(int t) const {
  check(t);
  return alpha_bar_[static_cast<std::size_t>(t)];
}
double NoiseSchedule::signal_scale(int t) const { return std::sqrt(alpha_bar(t)); }
double NoiseSchedule::noise_scale(int t) const { return std::sqrt(1.0 - alpha_bar(t)); }
double NoiseSchedule::weight(int t) const {
  return weighting_ == SdsWeighting::kOne ? 1.0 : 1.0 - alpha_bar(t);
}

Video add_noise(const Video& clean, int t, const Video& noise, const NoiseSchedule& schedule) {
  if (!clean.same_shape(noise)) throw ShapeMismatch("noise shape does not match video");
  const double a = schedule.signal_scale(t), s = schedule.noise_scale(t);
  Video out = clean;
  auto o = out.data();
  const auto e = noise.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * o[i] + s * e[i];
  return out;
}

int sample_timestep(std::mt19937_64& rng, int lo, int hi) {
  if (lo > hi) throw InvalidArgument("empty timestep range");
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Video sample_noise(std::mt19937_64& rng, std::size_t frames, std::size_t height, std::size_t width) {
  Video v(frames, height, width);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : v.data()) x = normal(rng);
  return v;
}

Video sds_pixel_grad(const Video& predicted, const Video& noise, int t, const NoiseSchedule& schedule) {
  if (!predicted.same_shape(noise)) throw ShapeMismatch("noise prediction shape does not match noise");
  const double w = schedule.weight(t);
  Video g = predicted;
  auto gd = g.data();
  const auto e = noise.data();
  for (std::size_t i = 0; i < gd.size(); ++i) gd[i] = w * (gd[i] - e[i]);
  return g;
}

Video to_critic_range(const Video& frames, bool inverted) {
  Video out = frames;
  for (double& v : out.data()) v = inverted ? 1.0 - 2.0 * v : 2.0 * v - 1.0;
  return out;
}

TargetVideoCritic::TargetVideoCritic(Video reference) : reference_(std::move(reference)) {}

CriticResponse TargetVideoCritic::predict(const CriticRequest& request, const StepContext& context) {
  if (!request.noisy.same_shape(reference_)) {
    throw CriticShapeMismatch("target critic reference does not match the request shape");
  }
  if (!context.clean || !context.noise || !context.schedule) {
    throw CriticError("target critic needs the in-process step context");
  }
  const NoiseSchedule& sched = *context.schedule;
  const double sigma = sched.noise_scale(request.t);
  if (sigma == 0.0) throw CriticError("target critic undefined at sigma_t = 0");
  const double coeff = request.guidance_scale * sched.signal_scale(request.t) / sigma;

  const Video ref = to_critic_range(context.augmentation ? context.augmentation->apply(reference_) : reference_,
                                    context.inverted);
  CriticResponse resp{*context.noise};
  auto out = resp.noise_pred.data();
  const auto x = context.clean->data();
  const auto r = ref.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * (x[i] - r[i]);
  return resp;
}

CriticResponse ZeroCritic::predict(const CriticRequest& request, const StepContext& context) {
  if (context.noise) return {*context.noise};
  return {Video(request.noisy.frames(), request.noisy.height(), request.noisy.width())};
}

}  // namespace sketchmotion

#include "sketchmotion/video_io.hpp"

namespace sketchmotion {

std::unique_ptr<VideoCritic> make_target_critic_from_file(const std::string& path) {
  return std::make_unique<TargetVideoCritic>(load_reference_video(path));
}

}  // namespace sketchmotion
