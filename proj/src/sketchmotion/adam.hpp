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
#include <span>
#include <vector>

namespace sketchmotion {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(std::size_t size) : m_(size, 0.0), v_(size, 0.0) {}

  std::size_t size() const { return m_.size(); }
  std::int64_t step() const { return step_; }

 private:
  friend void adam_step(std::span<double>, std::span<const double>, AdamState&, double, const AdamOptions&);
  std::vector<double> m_, v_;
  std::int64_t step_ = 0;
};

// Bias-corrected Adam update in place. Throws NumericalError (before
// touching any state) if a gradient is not finite, ShapeMismatch if sizes
// disagree.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               const AdamOptions& options = {});

}  // namespace sketchmotion
