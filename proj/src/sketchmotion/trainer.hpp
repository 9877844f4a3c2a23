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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sketchmotion/adam.hpp"
#include "sketchmotion/augment.hpp"
#include "sketchmotion/errors.hpp"
#include "sketchmotion/field.hpp"
#include "sketchmotion/guidance.hpp"
#include "sketchmotion/raster.hpp"

namespace sketchmotion {

struct TrainConfig {
  int steps = 1000;
  double lr_local = 1e-4;
  double lr_global = 5e-3;
  double gs_local = 30.0;
  double gs_global = 40.0;
  MotionLambdas lambdas{};
  int frames = 24;
  int size = 256;
  int timestep_min = 50;
  int timestep_max = 950;
  bool augment = true;
  AugmentRanges augment_ranges{};
  std::uint64_t seed = 0;
  AdamOptions adam{};
  int threads = 1;
  int checkpoint_every = 100;

  int alternate_every = 1;   // steps per branch phase
  int samples_per_step = 1;  // noise/timestep draws averaged per step
  int early_stop = 0;        // stop after this many steps; 0 = off
  bool freeze_local = false;
  bool freeze_global = false;
  bool invert = false;  // ink = +1 in critic range
  SdsWeighting weighting = SdsWeighting::kSigmaSquared;
  int schedule_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;

  RasterOptions raster{};

  int embed_dim = 128;
  std::vector<int> local_hidden{256, 256};
  std::vector<int> global_hidden{128};
  int pe_frequencies = 4;
  PositionalEncoding pe_mode = PositionalEncoding::kSinusoidal;
  std::optional<Point> pivot;  // canvas center when unset

  void validate() const;
  FieldConfig field_config(const Sketch& sketch) const;
  NoiseSchedule schedule() const;
};

// Flat key = value view of TrainConfig. Keys match the CLI flag names
// without the leading dashes.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config);
bool is_config_key(const std::string& key);

enum class StepBranch { kLocal, kGlobal };
const char* branch_name(StepBranch b);

struct StepRecord {
  int step = 0;
  StepBranch branch = StepBranch::kLocal;
  int t = 0;
  double sds_grad_norm = 0.0;
  double mean_abs_dz = 0.0;
  double wall_ms = 0.0;
  std::vector<std::array<double, 6>> transforms;  // per frame, AffineMatrix::rows()
};

struct TrainLog {
  std::vector<StepRecord> records;
};

// JSON-lines. log_jsonl omits wall time; timing_jsonl carries it.
std::string log_jsonl(const TrainLog& log);
std::string timing_jsonl(const TrainLog& log);

struct TrainObserver {
  std::function<void(const StepRecord&)> on_step;
  // Called after every checkpoint_every-th step with the step count done.
  std::function<void(int, const DisplacementField&)> on_checkpoint;
};

struct TrainResult {
  MotionSequence sequence;
  DisplacementField field;
  FieldOutput output;
  TrainLog log;
};

// Raised for aborts inside the loop; carries the step index and the log up
// to the failure. The original exception is nested.
class TrainingAborted : public Error {
 public:
  enum class Cause { kCritic, kNumerical, kOther };
  TrainingAborted(std::string what, int step, Cause cause, TrainLog log)
      : Error(std::move(what)), step_(step), cause_(cause), log_(std::move(log)) {}
  int step() const { return step_; }
  Cause cause() const { return cause_; }
  const TrainLog& log() const { return log_; }

 private:
  int step_;
  Cause cause_;
  TrainLog log_;
};

// The sketch must already live on a size x size canvas.
TrainResult train(const Sketch& sketch, const std::string& prompt, VideoCritic& critic, const TrainConfig& config,
                  const TrainObserver& observer = {});

// Branch run at a given step under the config's alternation schedule.
StepBranch branch_for_step(const TrainConfig& config, int step);

// Uniformly rescales a sketch onto a size x size canvas.
Sketch fit_to_canvas(const Sketch& sketch, int size);

}  // namespace sketchmotion
