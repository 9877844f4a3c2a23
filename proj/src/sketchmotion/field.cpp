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
#include "sketchmotion/field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

void FieldConfig::validate() const {
  if (embed_dim <= 0) throw InvalidArgument("embed_dim must be positive");
  if (frames <= 0 || points <= 0) throw InvalidArgument("field needs at least one frame and one point");
  if (pe_frequencies <= 0) throw InvalidArgument("pe_frequencies must be positive");
  for (int h : local_hidden) {
    if (h <= 0) throw InvalidArgument("local hidden widths must be positive");
  }
  for (int h : global_hidden) {
    if (h <= 0) throw InvalidArgument("global hidden widths must be positive");
  }
}

std::size_t ParameterBlock::add(std::string name, std::size_t rows, std::size_t cols) {
  slices_.push_back({std::move(name), values_.size(), rows, cols});
  values_.resize(values_.size() + rows * cols, 0.0);
  grads_.resize(values_.size(), 0.0);
  return slices_.size() - 1;
}

Eigen::Map<RowMatrix> ParameterBlock::matrix(std::size_t i) {
  const Slice& s = slices_[i];
  return {values_.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)};
}
Eigen::Map<const RowMatrix> ParameterBlock::matrix(std::size_t i) const {
  const Slice& s = slices_[i];
  return {values_.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)};
}
Eigen::Map<RowMatrix> ParameterBlock::grad_matrix(std::size_t i) {
  const Slice& s = slices_[i];
  return {grads_.data() + s.offset, static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)};
}
Eigen::Map<Eigen::RowVectorXd> ParameterBlock::vector(std::size_t i) {
  const Slice& s = slices_[i];
  return {values_.data() + s.offset, static_cast<Eigen::Index>(s.size())};
}
Eigen::Map<const Eigen::RowVectorXd> ParameterBlock::vector(std::size_t i) const {
  const Slice& s = slices_[i];
  return {values_.data() + s.offset, static_cast<Eigen::Index>(s.size())};
}
Eigen::Map<Eigen::RowVectorXd> ParameterBlock::grad_vector(std::size_t i) {
  const Slice& s = slices_[i];
  return {grads_.data() + s.offset, static_cast<Eigen::Index>(s.size())};
}

void ParameterBlock::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

namespace {

void fill_uniform(std::span<double> v, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : v) x = dist(rng);
}

}  // namespace

DisplacementField::DisplacementField(FieldConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto d = static_cast<std::size_t>(config_.embed_dim);
  const auto kn = static_cast<std::size_t>(config_.frames) * static_cast<std::size_t>(config_.points);
  std::mt19937_64 rng(config_.seed);
  auto init = [&](ParameterBlock& b, std::size_t slice, std::size_t fan_in) {
    const auto& s = b.slices()[slice];
    fill_uniform(b.values().subspan(s.offset, s.size()), 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
  };

  proj_ = shared_.add("shared.proj", d, 2);
  init(shared_, proj_, 2);
  if (config_.pe_mode == PositionalEncoding::kSinusoidal) {
    pe_ = shared_.add("shared.pe_proj", d, static_cast<std::size_t>(raw_encoding_dim()));
    init(shared_, pe_, static_cast<std::size_t>(raw_encoding_dim()));
  } else {
    pe_ = shared_.add("shared.pe_table", kn, d);
    init(shared_, pe_, d);
  }

  auto build = [&](ParameterBlock& b, Mlp& mlp, const std::string& prefix, const std::vector<int>& hidden,
                   std::size_t out) {
    std::size_t in = d;
    for (std::size_t l = 0; l < hidden.size(); ++l) {
      const auto h = static_cast<std::size_t>(hidden[l]);
      mlp.weights.push_back(b.add(prefix + ".w" + std::to_string(l), h, in));
      init(b, mlp.weights.back(), in);
      mlp.biases.push_back(b.add(prefix + ".b" + std::to_string(l), 1, h));
      init(b, mlp.biases.back(), in);
      in = h;
    }
    // Zero output layer: the field starts at zero displacement / identity.
    mlp.weights.push_back(b.add(prefix + ".out_w", out, in));
    mlp.biases.push_back(b.add(prefix + ".out_b", 1, out));
  };
  build(local_, local_mlp_, "local", config_.local_hidden, 2);
  build(global_, global_mlp_, "global", config_.global_hidden, AffineParams::kCount);
}

ParameterBlock& DisplacementField::block(Branch b) {
  switch (b) {
    case Branch::kShared: return shared_;
    case Branch::kLocal: return local_;
    case Branch::kGlobal: return global_;
  }
  return shared_;
}

const ParameterBlock& DisplacementField::block(Branch b) const {
  return const_cast<DisplacementField*>(this)->block(b);
}

std::size_t DisplacementField::parameter_count() const { return shared_.size() + local_.size() + global_.size(); }

std::vector<double> DisplacementField::raw_encoding(int j, int i) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(raw_encoding_dim()));
  for (double x : {static_cast<double>(j) / config_.frames, static_cast<double>(i) / config_.points}) {
    for (int f = 0; f < config_.pe_frequencies; ++f) {
      const double a = std::ldexp(std::numbers::pi, f) * x;
      out.push_back(std::sin(a));
      out.push_back(std::cos(a));
    }
  }
  return out;
}

RowMatrix DisplacementField::raw_encoding_matrix() const {
  const int k = config_.frames, n = config_.points;
  RowMatrix m(static_cast<Eigen::Index>(k) * n, raw_encoding_dim());
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto row = raw_encoding(j, i);
      for (int c = 0; c < raw_encoding_dim(); ++c) m(static_cast<Eigen::Index>(j) * n + i, c) = row[static_cast<std::size_t>(c)];
    }
  }
  return m;
}

RowMatrix DisplacementField::positional_features() const {
  if (config_.pe_mode == PositionalEncoding::kLearned) return shared_.matrix(pe_);
  return raw_encoding_matrix() * shared_.matrix(pe_).transpose();
}

void DisplacementField::check_sketch(const Sketch& sketch) const {
  if (sketch.point_count() != static_cast<std::size_t>(config_.points)) {
    throw ShapeMismatch("field expects " + std::to_string(config_.points) + " points, sketch has " +
                        std::to_string(sketch.point_count()));
  }
}

RowMatrix DisplacementField::normalized_coords(const Sketch& sketch) const {
  const auto pts = sketch.points();
  const double hx = 0.5 * config_.canvas.width, hy = 0.5 * config_.canvas.height;
  RowMatrix c(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c(static_cast<Eigen::Index>(i), 0) = (pts[i].x - hx) / hx;
    c(static_cast<Eigen::Index>(i), 1) = (pts[i].y - hy) / hy;
  }
  return c;
}

RowMatrix DisplacementField::embed(const Sketch& sketch) const {
  check_sketch(sketch);
  const int k = config_.frames, n = config_.points;
  const RowMatrix projected = normalized_coords(sketch) * shared_.matrix(proj_).transpose();
  RowMatrix features = positional_features();
  for (int j = 0; j < k; ++j) features.middleRows(static_cast<Eigen::Index>(j) * n, n) += projected;
  return features;
}

RowMatrix DisplacementField::run_mlp(const ParameterBlock& block, const Mlp& mlp, const RowMatrix& input,
                                     std::vector<RowMatrix>* acts) {
  if (acts) acts->clear();
  RowMatrix x = input;
  const std::size_t layers = mlp.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    RowMatrix z = x * block.matrix(mlp.weights[l]).transpose();
    z.rowwise() += block.vector(mlp.biases[l]);
    if (l + 1 < layers) {
      z = z.array().tanh().matrix();
      if (acts) acts->push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

RowMatrix DisplacementField::backprop_mlp(ParameterBlock& block, const Mlp& mlp, const RowMatrix& input,
                                          const std::vector<RowMatrix>& acts, const RowMatrix& grad_out) {
  RowMatrix g = grad_out;
  for (std::size_t l = mlp.weights.size(); l-- > 0;) {
    const RowMatrix& x = l == 0 ? input : acts[l - 1];
    block.grad_matrix(mlp.weights[l]).noalias() += g.transpose() * x;
    block.grad_vector(mlp.biases[l]) += g.colwise().sum();
    RowMatrix gx = g * block.matrix(mlp.weights[l]);
    if (l > 0) gx.array() *= 1.0 - acts[l - 1].array().square();
    g = std::move(gx);
  }
  return g;
}

Displacements DisplacementField::predict_local(const RowMatrix& features) const {
  const RowMatrix out = run_mlp(local_, local_mlp_, features, nullptr);
  Displacements d(static_cast<std::size_t>(config_.frames), static_cast<std::size_t>(config_.points));
  std::copy(out.data(), out.data() + out.size(), d.data().begin());
  return d;
}

namespace {

RowMatrix frame_means(const RowMatrix& features, int k, int n) {
  RowMatrix pooled(k, features.cols());
  for (int j = 0; j < k; ++j) pooled.row(j) = features.middleRows(static_cast<Eigen::Index>(j) * n, n).colwise().mean();
  return pooled;
}

}  // namespace

GlobalPrediction DisplacementField::predict_global(const RowMatrix& features, const Sketch& sketch,
                                                   const MotionLambdas& lambdas) const {
  check_sketch(sketch);
  const int k = config_.frames, n = config_.points;
  const RowMatrix raw = run_mlp(global_, global_mlp_, frame_means(features, k, n), nullptr);
  const auto pts = sketch.points();
  const Point pivot = config_.resolved_pivot();
  GlobalPrediction out;
  out.displacements = Displacements(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
  for (int j = 0; j < k; ++j) {
    std::array<double, AffineParams::kCount> row{};
    for (int c = 0; c < AffineParams::kCount; ++c) row[static_cast<std::size_t>(c)] = raw(j, c);
    out.params.push_back(AffineParams::from_array(row));
    out.transforms.push_back(compose_affine(out.params.back(), lambdas));
    const auto offsets = global_displacement(out.transforms.back(), pts, pivot);
    for (int i = 0; i < n; ++i) out.displacements.set(static_cast<std::size_t>(j), static_cast<std::size_t>(i), offsets[static_cast<std::size_t>(i)]);
  }
  return out;
}

FieldOutput DisplacementField::forward(const Sketch& sketch, const MotionLambdas& lambdas) {
  check_sketch(sketch);
  const int k = config_.frames, n = config_.points;
  Cache c;
  c.coords = normalized_coords(sketch);
  if (config_.pe_mode == PositionalEncoding::kSinusoidal) c.encoding = raw_encoding_matrix();
  c.features = embed(sketch);
  c.lambdas = lambdas;

  FieldOutput out;
  const RowMatrix local = run_mlp(local_, local_mlp_, c.features, &c.local_acts);
  out.local = Displacements(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
  std::copy(local.data(), local.data() + local.size(), out.local.data().begin());

  c.pooled = frame_means(c.features, k, n);
  const RowMatrix raw = run_mlp(global_, global_mlp_, c.pooled, &c.global_acts);
  const Point pivot = config_.resolved_pivot();
  for (Point p : sketch.points()) c.centered.push_back(p - pivot);
  out.global = Displacements(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
  for (int j = 0; j < k; ++j) {
    std::array<double, AffineParams::kCount> row{};
    for (int q = 0; q < AffineParams::kCount; ++q) row[static_cast<std::size_t>(q)] = raw(j, q);
    const AffineParams params = AffineParams::from_array(row);
    const AffineMatrix t = compose_affine(params, lambdas);
    out.params.push_back(params);
    out.transforms.push_back(t);
    for (int i = 0; i < n; ++i) {
      const Point v = c.centered[static_cast<std::size_t>(i)];
      out.global.set(static_cast<std::size_t>(j), static_cast<std::size_t>(i), t.apply(v) - v);
    }
  }
  c.params = out.params;

  out.total = out.local;
  auto total = out.total.data();
  const auto g = out.global.data();
  for (std::size_t q = 0; q < total.size(); ++q) total[q] += g[q];

  c.valid = true;
  cache_ = std::move(c);
  return out;
}

void DisplacementField::backward(const Displacements& upstream, BackwardPaths paths) {
  if (!cache_.valid) throw Error("DisplacementField::backward called before forward");
  const int k = config_.frames, n = config_.points;
  if (upstream.frames() != static_cast<std::size_t>(k) || upstream.points() != static_cast<std::size_t>(n)) {
    throw ShapeMismatch("upstream gradient shape does not match the field");
  }
  shared_.zero_grad();
  local_.zero_grad();
  global_.zero_grad();

  RowMatrix grad_features = RowMatrix::Zero(static_cast<Eigen::Index>(k) * n, config_.embed_dim);

  if (paths != BackwardPaths::kGlobalOnly) {
    const Eigen::Map<const RowMatrix> up(upstream.data().data(), static_cast<Eigen::Index>(k) * n, 2);
    grad_features += backprop_mlp(local_, local_mlp_, cache_.features, cache_.local_acts, up);
  }

  if (paths != BackwardPaths::kLocalOnly) {
    RowMatrix grad_raw(k, AffineParams::kCount);
    for (int j = 0; j < k; ++j) {
      // dL/dT rows: linear part sums u (p - pivot)^T, translation sums u.
      std::array<double, 6> gt{};
      for (int i = 0; i < n; ++i) {
        const Point u = upstream.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
        const Point v = cache_.centered[static_cast<std::size_t>(i)];
        gt[0] += u.x * v.x;
        gt[1] += u.x * v.y;
        gt[2] += u.x;
        gt[3] += u.y * v.x;
        gt[4] += u.y * v.y;
        gt[5] += u.y;
      }
      const auto gp = compose_affine_backward(cache_.params[static_cast<std::size_t>(j)], cache_.lambdas, gt).to_array();
      for (int q = 0; q < AffineParams::kCount; ++q) grad_raw(j, q) = gp[static_cast<std::size_t>(q)];
    }
    const RowMatrix grad_pooled = backprop_mlp(global_, global_mlp_, cache_.pooled, cache_.global_acts, grad_raw);
    for (int j = 0; j < k; ++j) {
      grad_features.middleRows(static_cast<Eigen::Index>(j) * n, n).rowwise() += grad_pooled.row(j) / static_cast<double>(n);
    }
  }

  // features[j*N + i] = proj * coords[i] + pe[j*N + i]
  RowMatrix per_point = RowMatrix::Zero(n, config_.embed_dim);
  for (int j = 0; j < k; ++j) per_point += grad_features.middleRows(static_cast<Eigen::Index>(j) * n, n);
  shared_.grad_matrix(proj_).noalias() += per_point.transpose() * cache_.coords;
  if (config_.pe_mode == PositionalEncoding::kSinusoidal) {
    shared_.grad_matrix(pe_).noalias() += grad_features.transpose() * cache_.encoding;
  } else {
    shared_.grad_matrix(pe_) += grad_features;
  }
}

}  // namespace sketchmotion
