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
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "sketchmotion/errors.hpp"
#include "sketchmotion/trainer.hpp"

namespace sketchmotion {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("config '" + key + "': expected a number, got '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("config '" + key + "': expected an integer, got '" + s + "'");
  }
  return v;
}

int parse_int32(const std::string& key, const std::string& s) {
  const long long v = parse_int(key, s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ParseError("config '" + key + "': value out of range");
  }
  return static_cast<int>(v);
}

bool parse_switch(const std::string& key, const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ParseError("config '" + key + "': expected on or off, got '" + s + "'");
}

std::vector<int> parse_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(parse_int32(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = void (*)(TrainConfig&, const std::string&, const std::string&);
using Getter = std::string (*)(const TrainConfig&);

struct Entry {
  Setter set;
  Getter get;
};

#define SM_DOUBLE(key, field)   {key, {[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); },          [](const TrainConfig& c) { return fmt(c.field); }}}
#define SM_INT(key, field)   {key, {[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_int32(k, v); },          [](const TrainConfig& c) { return std::to_string(c.field); }}}
#define SM_SWITCH(key, field)   {key, {[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_switch(k, v); },          [](const TrainConfig& c) { return std::string(c.field ? "on" : "off"); }}}

// Keys in a fixed, stable order.
const std::vector<std::pair<std::string, Entry>>& table() {
  static const std::vector<std::pair<std::string, Entry>> t = {
      SM_INT("steps", steps),
      SM_INT("frames", frames),
      SM_INT("size", size),
      SM_DOUBLE("lr-local", lr_local),
      SM_DOUBLE("lr-global", lr_global),
      SM_DOUBLE("gs-local", gs_local),
      SM_DOUBLE("gs-global", gs_global),
      SM_DOUBLE("lambda-t", lambdas.translation),
      SM_DOUBLE("lambda-r", lambdas.rotation),
      SM_DOUBLE("lambda-s", lambdas.scale),
      SM_DOUBLE("lambda-sh", lambdas.shear),
      SM_INT("timestep-min", timestep_min),
      SM_INT("timestep-max", timestep_max),
      SM_SWITCH("augment", augment),
      SM_DOUBLE("crop-min-area", augment_ranges.min_area),
      SM_DOUBLE("corner-jitter", augment_ranges.max_corner_jitter),
      {"seed", {[](TrainConfig& c, const std::string& k, const std::string& v) {
                  const long long s = parse_int(k, v);
                  if (s < 0) throw ParseError("config 'seed': must be non-negative");
                  c.seed = static_cast<std::uint64_t>(s);
                },
                [](const TrainConfig& c) { return std::to_string(c.seed); }}},
      SM_INT("threads", threads),
      SM_INT("checkpoint-every", checkpoint_every),
      SM_INT("alternate-every", alternate_every),
      SM_INT("samples-per-step", samples_per_step),
      SM_INT("early-stop", early_stop),
      SM_SWITCH("freeze-local", freeze_local),
      SM_SWITCH("freeze-global", freeze_global),
      SM_SWITCH("invert", invert),
      {"weighting", {[](TrainConfig& c, const std::string& k, const std::string& v) {
                       if (v == "sigma2") c.weighting = SdsWeighting::kSigmaSquared;
                       else if (v == "one") c.weighting = SdsWeighting::kOne;
                       else throw ParseError("config '" + k + "': expected sigma2 or one, got '" + v + "'");
                     },
                     [](const TrainConfig& c) {
                       return std::string(c.weighting == SdsWeighting::kOne ? "one" : "sigma2");
                     }}},
      SM_INT("schedule-steps", schedule_steps),
      SM_DOUBLE("beta-start", beta_start),
      SM_DOUBLE("beta-end", beta_end),
      SM_DOUBLE("adam-beta1", adam.beta1),
      SM_DOUBLE("adam-beta2", adam.beta2),
      SM_DOUBLE("adam-eps", adam.eps),
      SM_DOUBLE("aa-width", raster.aa_width),
      SM_DOUBLE("flatten-tol", raster.flatten_tolerance),
      SM_INT("embed-dim", embed_dim),
      {"local-hidden", {[](TrainConfig& c, const std::string& k, const std::string& v) { c.local_hidden = parse_list(k, v); },
                        [](const TrainConfig& c) { return fmt_list(c.local_hidden); }}},
      {"global-hidden", {[](TrainConfig& c, const std::string& k, const std::string& v) { c.global_hidden = parse_list(k, v); },
                         [](const TrainConfig& c) { return fmt_list(c.global_hidden); }}},
      SM_INT("pe-frequencies", pe_frequencies),
      {"pe-mode", {[](TrainConfig& c, const std::string& k, const std::string& v) {
                     if (v == "sinusoidal") c.pe_mode = PositionalEncoding::kSinusoidal;
                     else if (v == "learned") c.pe_mode = PositionalEncoding::kLearned;
                     else throw ParseError("config '" + k + "': expected sinusoidal or learned, got '" + v + "'");
                   },
                   [](const TrainConfig& c) {
                     return std::string(c.pe_mode == PositionalEncoding::kLearned ? "learned" : "sinusoidal");
                   }}},
      {"pivot", {[](TrainConfig& c, const std::string& k, const std::string& v) {
                   if (v == "center") {
                     c.pivot.reset();
                     return;
                   }
                   const std::size_t comma = v.find(',');
                   if (comma == std::string::npos) throw ParseError("config 'pivot': expected center or x,y");
                   c.pivot = Point{parse_double(k, v.substr(0, comma)), parse_double(k, v.substr(comma + 1))};
                 },
                 [](const TrainConfig& c) {
                   return c.pivot ? fmt(c.pivot->x) + "," + fmt(c.pivot->y) : std::string("center");
                 }}},
  };
  return t;
}

#undef SM_DOUBLE
#undef SM_INT
#undef SM_SWITCH

}  // namespace

bool is_config_key(const std::string& key) {
  for (const auto& [k, e] : table()) {
    if (k == key) return true;
  }
  return false;
}

void set_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [k, e] : table()) {
    if (k == key) {
      e.set(config, key, value);
      return;
    }
  }
  throw ParseError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, e] : table()) out.emplace_back(k, e.get(config));
  return out;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
  };
  require(steps >= 0, "steps must be non-negative");
  require(frames >= 1, "frames must be at least 1");
  require(size >= 8, "size must be at least 8");
  require(lr_local >= 0 && lr_global >= 0, "learning rates must be non-negative");
  require(gs_local >= 0 && gs_global >= 0, "guidance scales must be non-negative");
  require(lambdas.translation >= 0 && lambdas.rotation >= 0 && lambdas.scale >= 0 && lambdas.shear >= 0,
          "motion lambdas must be non-negative");
  require(schedule_steps >= 1, "schedule-steps must be positive");
  require(timestep_min >= 1 && timestep_min <= timestep_max && timestep_max <= schedule_steps,
          "timestep range must satisfy 1 <= min <= max <= schedule-steps");
  require(augment_ranges.min_area > 0 && augment_ranges.min_area <= augment_ranges.max_area &&
              augment_ranges.max_area <= 1.0,
          "crop-min-area must lie in (0, 1]");
  require(augment_ranges.max_corner_jitter >= 0 && augment_ranges.max_corner_jitter < 0.25,
          "corner-jitter must lie in [0, 0.25)");
  require(threads >= 1, "threads must be at least 1");
  require(checkpoint_every >= 0, "checkpoint-every must be non-negative");
  require(alternate_every >= 1, "alternate-every must be at least 1");
  require(samples_per_step >= 1, "samples-per-step must be at least 1");
  require(early_stop >= 0, "early-stop must be non-negative");
  require(!(freeze_local && freeze_global), "cannot freeze both branches");
  require(raster.aa_width > 0, "aa-width must be positive");
  require(raster.flatten_tolerance > 0, "flatten-tol must be positive");
  require(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 && adam.eps > 0,
          "invalid Adam hyperparameters");
}

FieldConfig TrainConfig::field_config(const Sketch& sketch) const {
  FieldConfig f;
  f.embed_dim = embed_dim;
  f.local_hidden = local_hidden;
  f.global_hidden = global_hidden;
  f.pe_frequencies = pe_frequencies;
  f.pe_mode = pe_mode;
  f.frames = frames;
  f.points = static_cast<int>(sketch.point_count());
  f.canvas = sketch.canvas();
  f.pivot = pivot;
  f.seed = seed;
  return f;
}

NoiseSchedule TrainConfig::schedule() const { return NoiseSchedule(schedule_steps, beta_start, beta_end, weighting); }

}  // namespace sketchmotion
