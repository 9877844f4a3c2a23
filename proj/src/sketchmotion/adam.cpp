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
#include "sketchmotion/adam.hpp"

#include <cmath>
#include <string>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               const AdamOptions& o) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw ShapeMismatch("adam: parameter, gradient and state sizes differ");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("adam: non-finite gradient at index " + std::to_string(i));
    }
  }
  ++state.step_;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step_));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.m_[i];
    double& v = state.v_[i];
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g * g;
    params[i] -= lr * (m / c1) / (std::sqrt(v / c2) + o.eps);
  }
}

}  // namespace sketchmotion
