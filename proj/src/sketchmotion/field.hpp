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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sketchmotion/geometry.hpp"
#include "sketchmotion/sketch.hpp"

namespace sketchmotion {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class PositionalEncoding { kSinusoidal, kLearned };

struct FieldConfig {
  int embed_dim = 128;
  std::vector<int> local_hidden{256, 256};
  std::vector<int> global_hidden{128};
  int pe_frequencies = 4;
  PositionalEncoding pe_mode = PositionalEncoding::kSinusoidal;
  int frames = 24;
  int points = 64;
  Canvas canvas{};
  // Pivot of the global transform; canvas center when unset.
  std::optional<Point> pivot;
  std::uint64_t seed = 0;

  Point resolved_pivot() const { return pivot.value_or(canvas.center()); }
  void validate() const;
};

// Contiguous parameter storage for one optimizer group, with named
// row-major slices.
class ParameterBlock {
 public:
  struct Slice {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t size() const { return rows * cols; }
  };

  std::size_t add(std::string name, std::size_t rows, std::size_t cols);

  Eigen::Map<RowMatrix> matrix(std::size_t slice);
  Eigen::Map<const RowMatrix> matrix(std::size_t slice) const;
  Eigen::Map<RowMatrix> grad_matrix(std::size_t slice);
  Eigen::Map<Eigen::RowVectorXd> vector(std::size_t slice);
  Eigen::Map<const Eigen::RowVectorXd> vector(std::size_t slice) const;
  Eigen::Map<Eigen::RowVectorXd> grad_vector(std::size_t slice);

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> grads() { return grads_; }
  std::span<const double> grads() const { return grads_; }
  const std::vector<Slice>& slices() const { return slices_; }
  std::size_t size() const { return values_.size(); }

  void zero_grad();

 private:
  std::vector<Slice> slices_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

enum class Branch { kShared, kLocal, kGlobal };

// Which prediction paths receive the upstream gradient in backward().
enum class BackwardPaths { kBoth, kLocalOnly, kGlobalOnly };

struct GlobalPrediction {
  std::vector<AffineParams> params;
  std::vector<AffineMatrix> transforms;
  Displacements displacements;
};

struct FieldOutput {
  Displacements local;
  Displacements global;
  Displacements total;  // local + global
  std::vector<AffineParams> params;
  std::vector<AffineMatrix> transforms;
};

// Shared embedding (linear projection of each control point plus a
// positional encoding of frame index and point order) feeding a per-point
// local offset MLP and a per-frame affine head. Output layers start at zero
// so a fresh field predicts no motion.
class DisplacementField {
 public:
  explicit DisplacementField(FieldConfig config);

  const FieldConfig& config() const { return config_; }
  int frames() const { return config_.frames; }
  int points() const { return config_.points; }

  ParameterBlock& block(Branch b);
  const ParameterBlock& block(Branch b) const;

  // Raw sinusoidal encoding of (frame j, point i): for each frequency f,
  // sin and cos of 2^f * pi * j / k, then the same over i / N.
  std::vector<double> raw_encoding(int j, int i) const;
  int raw_encoding_dim() const { return 4 * config_.pe_frequencies; }

  // Positional term added to the projected coordinates, (k*N, d).
  RowMatrix positional_features() const;
  // (k*N, d) point features for the sketch; row j*N + i.
  RowMatrix embed(const Sketch& sketch) const;
  Displacements predict_local(const RowMatrix& features) const;
  GlobalPrediction predict_global(const RowMatrix& features, const Sketch& sketch, const MotionLambdas& lambdas) const;

  // Full forward pass; caches what backward() needs.
  FieldOutput forward(const Sketch& sketch, const MotionLambdas& lambdas);
  // Writes parameter gradients (overwriting) for the last forward().
  void backward(const Displacements& upstream, BackwardPaths paths = BackwardPaths::kBoth);

  std::size_t parameter_count() const;

 private:
  struct Mlp {
    std::vector<std::size_t> weights, biases;  // hidden layers then output
  };
  struct Cache {
    bool valid = false;
    RowMatrix coords;    // (N, 2) normalized
    RowMatrix encoding;  // (k*N, raw) sinusoidal input
    RowMatrix features;  // (k*N, d)
    std::vector<RowMatrix> local_acts;   // tanh outputs per hidden layer
    RowMatrix pooled;                    // (k, d)
    std::vector<RowMatrix> global_acts;
    std::vector<AffineParams> params;
    std::vector<Point> centered;  // p_i - pivot
    MotionLambdas lambdas;
  };

  RowMatrix normalized_coords(const Sketch& sketch) const;
  RowMatrix raw_encoding_matrix() const;
  void check_sketch(const Sketch& sketch) const;
  static RowMatrix run_mlp(const ParameterBlock& block, const Mlp& mlp, const RowMatrix& input,
                           std::vector<RowMatrix>* acts);
  static RowMatrix backprop_mlp(ParameterBlock& block, const Mlp& mlp, const RowMatrix& input,
                                const std::vector<RowMatrix>& acts, const RowMatrix& grad_out);

  FieldConfig config_;
  ParameterBlock shared_, local_, global_;
  std::size_t proj_ = 0, pe_ = 0;
  Mlp local_mlp_, global_mlp_;
  Cache cache_;
};

}  // namespace sketchmotion
