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

#include "sketchmotion/sketchmotion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "sketchmotion/checkpoint.hpp"
#include "sketchmotion/errors.hpp"
#include "sketchmotion/guidance.hpp"
#include "sketchmotion/raster.hpp"
#include "sketchmotion/svg.hpp"
#include "sketchmotion/trainer.hpp"
#include "sketchmotion/video_io.hpp"

namespace sm = sketchmotion;

struct sm_sketch {
  sm::Sketch sketch;
};

struct sm_config {
  sm::TrainConfig config;
};

struct sm_critic {
  std::unique_ptr<sm::VideoCritic> critic;
};

struct sm_result {
  sm::TrainResult train;
  sm::TrainConfig config;
  std::optional<sm::Video> reference;
  double initial_mse = std::numeric_limits<double>::quiet_NaN();
  double final_mse = std::numeric_limits<double>::quiet_NaN();
};

namespace {

thread_local std::string g_last_error;

sm_status fail(sm_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
sm_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SM_OK;
  } catch (const sm::TrainingAborted& e) {
    switch (e.cause()) {
      case sm::TrainingAborted::Cause::kCritic: return fail(SM_ERR_CRITIC, e.what());
      case sm::TrainingAborted::Cause::kNumerical: return fail(SM_ERR_NUMERIC, e.what());
      default: return fail(SM_ERR_INTERNAL, e.what());
    }
  } catch (const sm::ParseError& e) {
    return fail(SM_ERR_PARSE, e.what());
  } catch (const sm::CriticError& e) {
    return fail(SM_ERR_CRITIC, e.what());
  } catch (const sm::NumericalError& e) {
    return fail(SM_ERR_NUMERIC, e.what());
  } catch (const sm::InvalidArgument& e) {
    return fail(SM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const sm::ShapeMismatch& e) {
    return fail(SM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const sm::IoError& e) {
    return fail(SM_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SM_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw sm::InvalidArgument(what);
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sm::IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw sm::IoError("cannot write '" + path.string() + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string frame_name(size_t j, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%03zu.%s", j, ext);
  return buf;
}

}  // namespace

extern "C" {

const char* sm_version(void) { return "0.1.0"; }

const char* sm_status_name(sm_status status) {
  switch (status) {
    case SM_OK: return "ok";
    case SM_ERR_PARSE: return "parse error";
    case SM_ERR_CRITIC: return "critic error";
    case SM_ERR_NUMERIC: return "numerical error";
    case SM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SM_ERR_IO: return "i/o error";
    case SM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sm_last_error(void) { return g_last_error.c_str(); }

sm_status sm_sketch_load_svg(const char* path, sm_sketch** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sm_sketch{sm::load_svg(path)};
  });
}

sm_status sm_sketch_parse_svg(const char* text, size_t length, sm_sketch** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new sm_sketch{sm::parse_svg(std::string_view(text, length))};
  });
}

void sm_sketch_free(sm_sketch* sketch) { delete sketch; }

size_t sm_sketch_stroke_count(const sm_sketch* sketch) { return sketch ? sketch->sketch.stroke_count() : 0; }

size_t sm_sketch_point_count(const sm_sketch* sketch) { return sketch ? sketch->sketch.point_count() : 0; }

sm_status sm_sketch_canvas(const sm_sketch* sketch, int* width, int* height) {
  return guard([&] {
    require(sketch && width && height, "null argument");
    *width = sketch->sketch.canvas().width;
    *height = sketch->sketch.canvas().height;
  });
}

sm_status sm_sketch_points(const sm_sketch* sketch, double* xy, size_t capacity) {
  return guard([&] {
    require(sketch && xy, "null argument");
    const auto pts = sketch->sketch.points();
    require(capacity >= 2 * pts.size(), "buffer too small");
    for (size_t i = 0; i < pts.size(); ++i) {
      xy[2 * i] = pts[i].x;
      xy[2 * i + 1] = pts[i].y;
    }
  });
}

sm_status sm_sketch_save_svg(const sm_sketch* sketch, const char* path) {
  return guard([&] {
    require(sketch && path, "null argument");
    sm::save_svg(sketch->sketch, path);
  });
}

sm_status sm_sketch_save_png(const sm_sketch* sketch, const sm_config* config, const char* path) {
  return guard([&] {
    require(sketch && path, "null argument");
    const sm::RasterOptions opts = config ? config->config.raster : sm::RasterOptions{};
    const sm::RasterFrame f = sm::render_frame(sketch->sketch, opts);
    sm::write_png(path, f.pixels, static_cast<size_t>(f.height), static_cast<size_t>(f.width));
  });
}

sm_status sm_config_create(sm_config** out) {
  return guard([&] {
    require(out, "null argument");
    *out = new sm_config{};
  });
}

sm_status sm_config_clone(const sm_config* config, sm_config** out) {
  return guard([&] {
    require(config && out, "null argument");
    *out = new sm_config{config->config};
  });
}

void sm_config_free(sm_config* config) { delete config; }

sm_status sm_config_set(sm_config* config, const char* key, const char* value) {
  return guard([&] {
    require(config && key && value, "null argument");
    sm::set_config_value(config->config, key, value);
  });
}

sm_status sm_config_get(const sm_config* config, const char* key, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(config && key, "null argument");
    for (const auto& [k, v] : sm::config_entries(config->config)) {
      if (k == key) {
        copy_out(v, buf, cap, needed);
        return;
      }
    }
    throw sm::ParseError(std::string("unknown config key '") + key + "'");
  });
}

sm_status sm_config_load_file(sm_config* config, const char* path) {
  return guard([&] {
    require(config && path, "null argument");
    const std::string text = read_text(path);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    sm::TrainConfig staged = config->config;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw sm::ParseError(std::string(path) + ":" + std::to_string(lineno) + ": expected key = value");
      }
      std::string key = trim(line.substr(0, eq));
      if (key.rfind("--", 0) == 0) key.erase(0, 2);
      try {
        sm::set_config_value(staged, key, trim(line.substr(eq + 1)));
      } catch (const sm::ParseError& e) {
        throw sm::ParseError(std::string(path) + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    config->config = std::move(staged);
  });
}

sm_status sm_config_dump(const sm_config* config, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(config, "null argument");
    std::string text;
    for (const auto& [k, v] : sm::config_entries(config->config)) text += k + " = " + v + "\n";
    copy_out(text, buf, cap, needed);
  });
}

sm_status sm_config_validate(const sm_config* config) {
  return guard([&] {
    require(config, "null argument");
    config->config.validate();
  });
}

int sm_config_is_key(const char* key) { return key && sm::is_config_key(key) ? 1 : 0; }

sm_status sm_critic_create_zero(sm_critic** out) {
  return guard([&] {
    require(out, "null argument");
    *out = new sm_critic{std::make_unique<sm::ZeroCritic>()};
  });
}

sm_status sm_critic_create_target(const char* reference_path, sm_critic** out) {
  return guard([&] {
    require(reference_path && out, "null argument");
    *out = new sm_critic{sm::make_target_critic_from_file(reference_path)};
  });
}

sm_status sm_critic_create_remote(const char* url, double timeout_seconds, sm_critic** out) {
  return guard([&] {
    require(url && out, "null argument");
    *out = new sm_critic{std::make_unique<sm::RemoteCritic>(url, timeout_seconds)};
  });
}

sm_status sm_critic_create_from_spec(const char* spec, sm_critic** out) {
  if (!spec || !out) return fail(SM_ERR_INVALID_ARGUMENT, "null argument");
  const std::string s(spec);
  if (s == "zero") return sm_critic_create_zero(out);
  if (s.rfind("target:", 0) == 0) return sm_critic_create_target(s.c_str() + 7, out);
  if (s.rfind("remote:", 0) == 0) return sm_critic_create_remote(s.c_str() + 7, 120.0, out);
  return fail(SM_ERR_PARSE, "critic must be zero, target:<path> or remote:<url>, got '" + s + "'");
}

sm_status sm_critic_check(sm_critic* critic) {
  return guard([&] {
    require(critic, "null argument");
    critic->critic->check_health();
  });
}

sm_status sm_critic_describe(const sm_critic* critic, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(critic, "null argument");
    copy_out(critic->critic->describe(), buf, cap, needed);
  });
}

void sm_critic_free(sm_critic* critic) { delete critic; }

sm_status sm_train(const sm_sketch* sketch, const char* prompt, sm_critic* critic, const sm_config* config,
                   sm_step_callback callback, void* user, const char* checkpoint_path, sm_result** out) {
  return guard([&] {
    require(sketch && prompt && critic && config && out, "null argument");
    const sm::TrainConfig& cfg = config->config;
    cfg.validate();
    const sm::Sketch fitted = sm::fit_to_canvas(sketch->sketch, cfg.size);

    sm::TrainObserver observer;
    if (callback) {
      observer.on_step = [&](const sm::StepRecord& r) {
        sm_step_info info{r.step,
                          r.branch == sm::StepBranch::kLocal ? SM_BRANCH_LOCAL : SM_BRANCH_GLOBAL,
                          r.t,
                          r.sds_grad_norm,
                          r.mean_abs_dz,
                          r.wall_ms};
        callback(&info, user);
      };
    }
    if (checkpoint_path) {
      const std::string path(checkpoint_path);
      observer.on_checkpoint = [&, path](int, const sm::DisplacementField& field) {
        sm::save_checkpoint(path, field, cfg.lambdas);
      };
    }

    auto result = std::make_unique<sm_result>(
        sm_result{sm::train(fitted, prompt, *critic->critic, cfg, observer), cfg, std::nullopt});
    if (const sm::Video* ref = critic->critic->reference()) {
      result->reference = *ref;
      const sm::Video start =
          sm::render_video(sm::MotionSequence(fitted, static_cast<size_t>(cfg.frames)), cfg.raster, cfg.threads);
      const sm::Video end = sm::render_video(result->train.sequence, cfg.raster, cfg.threads);
      if (start.same_shape(*ref)) {
        result->initial_mse = sm::mean_squared_error(start, *ref);
        result->final_mse = sm::mean_squared_error(end, *ref);
      }
    }
    *out = result.release();
  });
}

void sm_result_free(sm_result* result) { delete result; }

size_t sm_result_frame_count(const sm_result* result) {
  return result ? result->train.sequence.frame_count() : 0;
}

sm_status sm_result_frame_sketch(const sm_result* result, size_t frame, sm_sketch** out) {
  return guard([&] {
    require(result && out, "null argument");
    *out = new sm_sketch{result->train.sequence.materialize_frame(frame)};
  });
}

sm_status sm_result_transform(const sm_result* result, size_t frame, double rows[6]) {
  return guard([&] {
    require(result && rows, "null argument");
    const auto& ts = result->train.output.transforms;
    require(frame < ts.size(), "frame index out of range");
    const auto r = ts[frame].rows();
    std::copy(r.begin(), r.end(), rows);
  });
}

sm_status sm_result_metrics(const sm_result* result, sm_metrics* out) {
  return guard([&] {
    require(result && out, "null argument");
    const sm::FieldOutput& o = result->train.output;
    out->steps_run = static_cast<int>(result->train.log.records.size());
    out->mean_abs_dz = o.total.mean_abs();
    out->mean_abs_dz_local = o.local.mean_abs();
    out->mean_abs_dz_global = o.global.mean_abs();
    out->initial_target_mse = result->initial_mse;
    out->final_target_mse = result->final_mse;
  });
}

sm_status sm_result_log(const sm_result* result, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require(result, "null argument");
    copy_out(sm::log_jsonl(result->train.log), buf, cap, needed);
  });
}

sm_status sm_result_write_outputs(const sm_result* result, const char* dir, double fps) {
  return guard([&] {
    require(result && dir, "null argument");
    require(fps > 0.0, "fps must be positive");
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw sm::IoError("cannot create '" + root.string() + "': " + ec.message());
    const sm::MotionSequence& seq = result->train.sequence;
    for (size_t j = 0; j < seq.frame_count(); ++j) {
      sm::save_svg(seq.materialize_frame(j), (root / frame_name(j, "svg")).string());
    }
    const sm::Video video = sm::render_video(seq, result->config.raster, result->config.threads);
    for (size_t j = 0; j < video.frames(); ++j) {
      sm::write_png((root / frame_name(j, "png")).string(), video.frame(j), video.height(), video.width());
    }
    sm::write_gif((root / "animation.gif").string(), video, fps);
    sm::save_checkpoint((root / "field.skmf").string(), result->train.field, result->config.lambdas);
    write_text(root / "log.jsonl", sm::log_jsonl(result->train.log));
    write_text(root / "timing.jsonl", sm::timing_jsonl(result->train.log));
  });
}

sm_status sm_result_save_checkpoint(const sm_result* result, const char* path) {
  return guard([&] {
    require(result && path, "null argument");
    sm::save_checkpoint(path, result->train.field, result->config.lambdas);
  });
}

sm_status sm_reference_translate(const sm_sketch* sketch, const sm_config* config, double dx, double dy,
                                 const char* npy_path) {
  return guard([&] {
    require(sketch && config && npy_path, "null argument");
    const sm::TrainConfig& cfg = config->config;
    cfg.validate();
    const sm::Sketch fitted = sm::fit_to_canvas(sketch->sketch, cfg.size);
    const auto k = static_cast<size_t>(cfg.frames);
    sm::Displacements dz(k, fitted.point_count());
    for (size_t j = 0; j < k; ++j) {
      for (size_t i = 0; i < fitted.point_count(); ++i) {
        dz.set(j, i, {dx * static_cast<double>(j), dy * static_cast<double>(j)});
      }
    }
    sm::write_npy(npy_path, sm::render_video(sm::MotionSequence(fitted, std::move(dz)), cfg.raster, cfg.threads));
  });
}

}  // extern "C"
