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
#include "sketchmotion/trainer.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <random>

#include <json.hpp>

#include "sketchmotion/errors.hpp"
#include "sketchmotion/parallel.hpp"

namespace sketchmotion {

const char* branch_name(StepBranch b) { return b == StepBranch::kLocal ? "local" : "global"; }

StepBranch branch_for_step(const TrainConfig& config, int step) {
  if (config.freeze_local) return StepBranch::kGlobal;
  if (config.freeze_global) return StepBranch::kLocal;
  return (step / config.alternate_every) % 2 == 0 ? StepBranch::kLocal : StepBranch::kGlobal;
}

Sketch fit_to_canvas(const Sketch& sketch, int size) {
  const Canvas c = sketch.canvas();
  if (c.width == size && c.height == size) return sketch;
  const double scale = std::min(static_cast<double>(size) / c.width, static_cast<double>(size) / c.height);
  const Point offset{0.5 * (size - scale * c.width), 0.5 * (size - scale * c.height)};
  std::vector<Stroke> strokes = sketch.strokes();
  for (Stroke& s : strokes) {
    for (Point& p : s.points) p = offset + scale * p;
    s.width *= scale;
  }
  return Sketch(std::move(strokes), Canvas{size, size});
}

std::string log_jsonl(const TrainLog& log) {
  std::string out;
  for (const StepRecord& r : log.records) {
    nlohmann::json j{{"step", r.step},
                     {"branch", branch_name(r.branch)},
                     {"t", r.t},
                     {"sds_grad_norm", r.sds_grad_norm},
                     {"mean_abs_dz", r.mean_abs_dz},
                     {"transforms", r.transforms}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string timing_jsonl(const TrainLog& log) {
  std::string out;
  for (const StepRecord& r : log.records) {
    out += nlohmann::json{{"step", r.step}, {"wall_ms", r.wall_ms}}.dump();
    out += '\n';
  }
  return out;
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

TrainResult train(const Sketch& input, const std::string& prompt, VideoCritic& critic, const TrainConfig& config,
                  const TrainObserver& observer) {
  config.validate();
  if (input.empty()) throw InvalidArgument("cannot train on an empty sketch");
  if (input.canvas() != Canvas{config.size, config.size}) {
    throw InvalidArgument("sketch canvas must be " + std::to_string(config.size) + "x" + std::to_string(config.size) +
                          "; use fit_to_canvas first");
  }
  const Sketch& sketch = input;
  const auto k = static_cast<std::size_t>(config.frames);
  const auto n = sketch.point_count();
  const auto H = static_cast<std::size_t>(config.size), W = static_cast<std::size_t>(config.size);

  DisplacementField field(config.field_config(sketch));
  const NoiseSchedule schedule = config.schedule();
  std::mt19937_64 rng(config.seed);

  AdamState local_state(field.block(Branch::kLocal).size());
  AdamState global_state(field.block(Branch::kGlobal).size());
  // The backbone is stepped in both phases at the phase's learning rate,
  // with moment estimates kept per phase.
  AdamState shared_local_state(field.block(Branch::kShared).size());
  AdamState shared_global_state(field.block(Branch::kShared).size());

  TrainLog log;
  const int total_steps = config.early_stop > 0 ? std::min(config.steps, config.early_stop) : config.steps;
  const std::vector<double> widths = sketch.widths();

  for (int step = 0; step < total_steps; ++step) {
    const auto started = std::chrono::steady_clock::now();
    const StepBranch branch = branch_for_step(config, step);
    StepRecord rec;
    rec.step = step;
    rec.branch = branch;
    try {
      const FieldOutput out = field.forward(sketch, config.lambdas);
      if (!all_finite(out.total.data())) throw NumericalError("field produced non-finite displacements");
      const MotionSequence seq(sketch, out.total);
      std::vector<RenderTrace> traces;
      const Video frames = render_video(seq, config.raster, config.threads, &traces);

      std::optional<Augmentation> aug;
      if (config.augment) aug.emplace(sample_augment(rng, config.augment_ranges), H, W);
      const Video clean = to_critic_range(aug ? aug->apply(frames) : frames, config.invert);

      const double gs = branch == StepBranch::kLocal ? config.gs_local : config.gs_global;
      Video grad_clean(k, H, W);
      for (int s = 0; s < config.samples_per_step; ++s) {
        const int t = sample_timestep(rng, config.timestep_min, config.timestep_max);
        if (s == 0) rec.t = t;
        const Video noise = sample_noise(rng, k, H, W);
        CriticRequest request{add_noise(clean, t, noise, schedule), t, prompt, gs};
        const StepContext context{&clean, &noise, aug ? &*aug : nullptr, config.invert, &schedule};
        CriticResponse response;
        try {
          response = critic.predict(request, context);
        } catch (const CriticError&) {
          throw;
        } catch (const Error& e) {
          throw CriticError(e.what());
        }
        if (!response.noise_pred.same_shape(request.noisy)) {
          throw CriticShapeMismatch("critic response shape does not match the request");
        }
        if (!all_finite(response.noise_pred.data())) throw NumericalError("critic returned non-finite values");
        const Video g = sds_pixel_grad(response.noise_pred, noise, t, schedule);
        auto acc = grad_clean.data();
        const auto gd = g.data();
        const double inv = 1.0 / config.samples_per_step;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inv * gd[i];
      }
      rec.sds_grad_norm = l2_norm(grad_clean.data());

      // Chain through the range map and the augmentation back to frames.
      const double slope = critic_range_slope(config.invert);
      for (double& v : grad_clean.data()) v *= slope;
      const Video grad_frames = aug ? aug->backward(grad_clean) : grad_clean;

      Displacements grad_dz(k, n);
      parallel_for(k, config.threads, [&](std::size_t j) {
        const std::vector<Point> g = render_backward(traces[j], grad_frames.frame(j), n);
        for (std::size_t i = 0; i < n; ++i) grad_dz.set(j, i, g[i]);
      });
      field.backward(grad_dz);

      if (branch == StepBranch::kLocal) {
        adam_step(field.block(Branch::kLocal).values(), field.block(Branch::kLocal).grads(), local_state,
                  config.lr_local, config.adam);
        adam_step(field.block(Branch::kShared).values(), field.block(Branch::kShared).grads(), shared_local_state,
                  config.lr_local, config.adam);
      } else {
        adam_step(field.block(Branch::kGlobal).values(), field.block(Branch::kGlobal).grads(), global_state,
                  config.lr_global, config.adam);
        adam_step(field.block(Branch::kShared).values(), field.block(Branch::kShared).grads(), shared_global_state,
                  config.lr_global, config.adam);
      }

      rec.mean_abs_dz = out.total.mean_abs();
      for (const AffineMatrix& t : out.transforms) rec.transforms.push_back(t.rows());
    } catch (const CriticError& e) {
      throw TrainingAborted("step " + std::to_string(step) + ": critic failure: " + e.what(), step,
                            TrainingAborted::Cause::kCritic, log);
    } catch (const NumericalError& e) {
      throw TrainingAborted("step " + std::to_string(step) + ": " + e.what(), step,
                            TrainingAborted::Cause::kNumerical, log);
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    log.records.push_back(rec);
    if (observer.on_step) observer.on_step(log.records.back());
    if (observer.on_checkpoint && config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0) {
      observer.on_checkpoint(step + 1, field);
    }
  }

  FieldOutput final_out = field.forward(sketch, config.lambdas);
  if (!all_finite(final_out.total.data())) {
    throw TrainingAborted("final field output is not finite", total_steps, TrainingAborted::Cause::kNumerical, log);
  }
  MotionSequence seq(sketch, final_out.total);
  return TrainResult{std::move(seq), std::move(field), std::move(final_out), std::move(log)};
}

}  // namespace sketchmotion
