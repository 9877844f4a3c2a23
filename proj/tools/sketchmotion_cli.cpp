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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchmotion/sketchmotion.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOther = 4;

// Settings that are not part of the training config but still have config
// file and manifest equivalents.
struct RunSettings {
  std::string sketch;
  std::string prompt;
  std::string out;
  std::string critic;
  double fps = 8.0;
};

const char* const kRunKeys[] = {"sketch", "prompt", "out", "critic", "fps"};

struct Deleter {
  void operator()(sm_sketch* p) const { sm_sketch_free(p); }
  void operator()(sm_config* p) const { sm_config_free(p); }
  void operator()(sm_critic* p) const { sm_critic_free(p); }
  void operator()(sm_result* p) const { sm_result_free(p); }
};
template <typename T>
using Handle = std::unique_ptr<T, Deleter>;

class Failure : public std::runtime_error {
 public:
  Failure(sm_status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  sm_status status() const { return status_; }

 private:
  sm_status status_;
};

void check(sm_status s, const std::string& context) {
  if (s != SM_OK) throw Failure(s, context + ": " + sm_last_error());
}

int exit_code(sm_status s) {
  switch (s) {
    case SM_ERR_PARSE: return 1;
    case SM_ERR_CRITIC: return 2;
    case SM_ERR_NUMERIC: return 3;
    default: return kExitOther;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string get_string(sm_status (*fn)(const sm_config*, char*, size_t, size_t*), const sm_config* c) {
  size_t n = 0;
  check(fn(c, nullptr, 0, &n), "config");
  std::string s(n + 1, '\0');
  check(fn(c, s.data(), s.size(), &n), "config");
  s.resize(n);
  return s;
}

std::string config_value(const sm_config* c, const std::string& key) {
  size_t n = 0;
  check(sm_config_get(c, key.c_str(), nullptr, 0, &n), "config");
  std::string s(n + 1, '\0');
  check(sm_config_get(c, key.c_str(), s.data(), s.size(), &n), "config");
  s.resize(n);
  return s;
}

std::vector<std::pair<std::string, std::string>> config_pairs(const sm_config* c) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(get_string(sm_config_dump, c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return out;
}

void apply(const std::string& key, const std::string& value, sm_config* config, RunSettings& run) {
  if (key == "sketch") {
    run.sketch = value;
  } else if (key == "prompt") {
    run.prompt = value;
  } else if (key == "out") {
    run.out = value;
  } else if (key == "critic") {
    run.critic = value;
  } else if (key == "fps") {
    try {
      size_t used = 0;
      run.fps = std::stod(value, &used);
      if (used != value.size() || !(run.fps > 0.0)) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Failure(SM_ERR_PARSE, "fps: expected a positive number, got '" + value + "'");
    }
  } else {
    check(sm_config_set(config, key.c_str(), value.c_str()), "--" + key);
  }
}

void load_config_file(const std::string& path, sm_config* config, RunSettings& run) {
  std::ifstream in(path);
  if (!in) throw Failure(SM_ERR_PARSE, "cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Failure(SM_ERR_PARSE, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    try {
      apply(key, trim(line.substr(eq + 1)), config, run);
    } catch (const Failure& f) {
      throw Failure(f.status(), path + ":" + std::to_string(lineno) + ": " + f.what());
    }
  }
}

void load_manifest(const std::string& path, sm_config* config, RunSettings& run) {
  std::ifstream in(path);
  if (!in) throw Failure(SM_ERR_PARSE, "cannot open manifest '" + path + "'");
  json m;
  try {
    in >> m;
    run.sketch = m.at("input").get<std::string>();
    run.prompt = m.at("prompt").get<std::string>();
    run.critic = m.at("critic").get<std::string>();
    run.out = m.at("output_dir").get<std::string>();
    run.fps = m.at("fps").get<double>();
    for (const auto& [k, v] : m.at("config").items()) apply(k, v.get<std::string>(), config, run);
  } catch (const json::exception& e) {
    throw Failure(SM_ERR_PARSE, "manifest '" + path + "': " + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string resolve_critic(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* url = std::getenv("SKETCHMOTION_CRITIC_URL"); url && *url) return std::string("remote:") + url;
  std::cerr << "warning: no critic given and SKETCHMOTION_CRITIC_URL unset; using the zero critic\n";
  return "zero";
}

json metrics_json(const sm_metrics& m) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"steps_run", m.steps_run},
          {"mean_abs_dz", num(m.mean_abs_dz)},
          {"mean_abs_dz_local", num(m.mean_abs_dz_local)},
          {"mean_abs_dz_global", num(m.mean_abs_dz_global)},
          {"initial_target_mse", num(m.initial_target_mse)},
          {"final_target_mse", num(m.final_target_mse)}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure(SM_ERR_IO, "cannot write '" + path.string() + "'");
}

struct Progress {
  bool quiet = false;
  int every = 10;
};

void on_step(const sm_step_info* info, void* user) {
  const auto* p = static_cast<const Progress*>(user);
  if (p->quiet || info->step % p->every != 0) return;
  std::fprintf(stderr, "step %5d %-6s t=%4d |g|=%.4g mean|dz|=%.4f (%.0f ms)\n", info->step,
               info->branch == SM_BRANCH_LOCAL ? "local" : "global", info->t, info->sds_grad_norm, info->mean_abs_dz,
               info->wall_ms);
}

// One training run with outputs and manifest. Returns the metrics.
sm_metrics run_once(const RunSettings& run, const sm_config* config, const Progress& progress) {
  if (run.sketch.empty()) throw Failure(SM_ERR_PARSE, "--sketch is required");
  if (run.prompt.empty()) throw Failure(SM_ERR_PARSE, "--prompt is required");
  if (run.out.empty()) throw Failure(SM_ERR_PARSE, "--out is required");
  check(sm_config_validate(config), "config");

  json manifest{{"tool", "sketchmotion"},
                {"version", sm_version()},
                {"input", run.sketch},
                {"prompt", run.prompt},
                {"critic", run.critic},
                {"output_dir", run.out},
                {"fps", run.fps}};
  json cfg = json::object();
  for (const auto& [k, v] : config_pairs(config)) cfg[k] = v;
  manifest["config"] = cfg;
  manifest["started"] = utc_now();

  sm_sketch* raw_sketch = nullptr;
  check(sm_sketch_load_svg(run.sketch.c_str(), &raw_sketch), "sketch");
  Handle<sm_sketch> sketch(raw_sketch);

  sm_critic* raw_critic = nullptr;
  check(sm_critic_create_from_spec(run.critic.c_str(), &raw_critic), "critic");
  Handle<sm_critic> critic(raw_critic);
  check(sm_critic_check(critic.get()), "critic");

  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) throw Failure(SM_ERR_IO, "cannot create '" + run.out + "': " + ec.message());
  const fs::path out(run.out);
  std::string flat;
  for (const auto& [k, v] : config_pairs(config)) flat += k + " = " + v + "\n";
  write_file(out / "config.txt", flat);

  sm_result* raw_result = nullptr;
  const std::string ckpt = (out / "field.skmf").string();
  check(sm_train(sketch.get(), run.prompt.c_str(), critic.get(), config, on_step,
                 const_cast<Progress*>(&progress), ckpt.c_str(), &raw_result),
        "training");
  Handle<sm_result> result(raw_result);
  check(sm_result_write_outputs(result.get(), run.out.c_str(), run.fps), "outputs");

  sm_metrics metrics{};
  check(sm_result_metrics(result.get(), &metrics), "metrics");
  manifest["finished"] = utc_now();
  manifest["metrics"] = metrics_json(metrics);
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return metrics;
}

// Flags shared by run and sweep: one option per config key plus the run keys.
struct CommonFlags {
  std::map<std::string, std::string> values;  // flag name -> value, in config key order
  std::vector<std::string> order;
  std::string config_file;
  std::string manifest_file;
  std::vector<std::string> sets;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& flags, const sm_config* defaults, bool with_manifest) {
  app->add_option("--config", flags.config_file, "flat key = value config file");
  if (with_manifest) app->add_option("--manifest", flags.manifest_file, "rerun from a manifest.json");
  app->add_option("--set", flags.sets, "extra key=value override (repeatable)");
  app->add_flag("--quiet", flags.quiet, "no per-step progress");
  static const std::map<std::string, std::string> help{
      {"sketch", "input SVG"},
      {"prompt", "text prompt"},
      {"out", "output directory"},
      {"critic", "zero | target:<path> | remote:<url>"},
      {"fps", "GIF frame rate"}};
  for (const char* k : kRunKeys) {
    flags.order.emplace_back(k);
    app->add_option(std::string("--") + k, flags.values[k], help.at(k));
  }
  for (const auto& [k, v] : config_pairs(defaults)) {
    flags.order.push_back(k);
    app->add_option("--" + k, flags.values[k], "default: " + v);
  }
}

void resolve(CLI::App* app, const CommonFlags& flags, sm_config* config, RunSettings& run) {
  if (!flags.manifest_file.empty()) load_manifest(flags.manifest_file, config, run);
  if (!flags.config_file.empty()) load_config_file(flags.config_file, config, run);
  for (const std::string& key : flags.order) {
    if (app->count("--" + key) > 0) apply(key, flags.values.at(key), config, run);
  }
  for (const std::string& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure(SM_ERR_PARSE, "--set expects key=value, got '" + kv + "'");
    apply(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), config, run);
  }
  run.critic = resolve_critic(run.critic);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Handle<sm_config> default_config() {
  sm_config* raw = nullptr;
  check(sm_config_create(&raw), "config");
  Handle<sm_config> c(raw);
  const unsigned hw = std::thread::hardware_concurrency();
  check(sm_config_set(c.get(), "threads", std::to_string(hw > 0 ? hw : 1).c_str()), "config");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    Handle<sm_config> defaults = default_config();

    CLI::App app{"Animate a vector sketch with a neural displacement field"};
    app.set_version_flag("--version", sm_version());
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "optimize one animation and write its outputs");
    add_common(run_cmd, run_flags, defaults.get(), true);

    CommonFlags sweep_flags;
    std::string sweep_values = "1e-4,1e-3,1e-2";
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run once per lr-local value and tabulate the trade-off");
    add_common(sweep_cmd, sweep_flags, defaults.get(), false);
    sweep_cmd->add_option("--values", sweep_values, "comma-separated lr-local values")->capture_default_str();

    std::string ref_sketch, ref_out, ref_config;
    double ref_dx = 2.0, ref_dy = 0.0;
    int ref_frames = 0, ref_size = 0;
    CLI::App* ref_cmd = app.add_subcommand("reference", "render a translating reference video (.npy)");
    ref_cmd->add_option("--sketch", ref_sketch, "input SVG")->required();
    ref_cmd->add_option("--out", ref_out, "output .npy")->required();
    ref_cmd->add_option("--dx", ref_dx, "x shift per frame in pixels")->capture_default_str();
    ref_cmd->add_option("--dy", ref_dy, "y shift per frame in pixels")->capture_default_str();
    ref_cmd->add_option("--frames", ref_frames, "frame count");
    ref_cmd->add_option("--size", ref_size, "canvas size");
    ref_cmd->add_option("--config", ref_config, "flat key = value config file");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 1;
    }

    if (*run_cmd) {
      Handle<sm_config> config = default_config();
      RunSettings run;
      resolve(run_cmd, run_flags, config.get(), run);
      const Progress progress{run_flags.quiet};
      const sm_metrics m = run_once(run, config.get(), progress);
      std::fprintf(stderr, "done: %d steps, mean|dz| %.4f (local %.4f, global %.4f)", m.steps_run, m.mean_abs_dz,
                   m.mean_abs_dz_local, m.mean_abs_dz_global);
      if (std::isfinite(m.final_target_mse)) {
        std::fprintf(stderr, ", target mse %.6g -> %.6g", m.initial_target_mse, m.final_target_mse);
      }
      std::fprintf(stderr, "\n");
      return 0;
    }

    if (*sweep_cmd) {
      Handle<sm_config> base = default_config();
      RunSettings run;
      resolve(sweep_cmd, sweep_flags, base.get(), run);
      if (run.out.empty()) throw Failure(SM_ERR_PARSE, "--out is required");
      const std::vector<std::string> values = split_list(sweep_values);
      if (values.empty()) throw Failure(SM_ERR_PARSE, "--values is empty");
      std::error_code ec;
      fs::create_directories(run.out, ec);
      if (ec) throw Failure(SM_ERR_IO, "cannot create '" + run.out + "': " + ec.message());

      std::string csv = "lr_local,final_target_mse,mean_abs_dz_local,status\n";
      int worst = 0;
      for (const std::string& v : values) {
        sm_config* raw = nullptr;
        check(sm_config_clone(base.get(), &raw), "config");
        Handle<sm_config> config(raw);
        RunSettings one = run;
        std::string lr = v;
        std::string status = "ok";
        char metric_buf[80] = "";
        try {
          check(sm_config_set(config.get(), "lr-local", v.c_str()), "lr-local");
          lr = config_value(config.get(), "lr-local");
          one.out = (fs::path(run.out) / ("lr_local_" + lr)).string();
          std::fprintf(stderr, "sweep: lr-local = %s\n", lr.c_str());
          const sm_metrics m = run_once(one, config.get(), Progress{sweep_flags.quiet});
          std::snprintf(metric_buf, sizeof metric_buf, "%.9g,%.9g", m.final_target_mse, m.mean_abs_dz_local);
        } catch (const Failure& f) {
          std::fprintf(stderr, "sweep: lr-local = %s failed: %s\n", lr.c_str(), f.what());
          status = sm_status_name(f.status());
          std::snprintf(metric_buf, sizeof metric_buf, "nan,nan");
          if (worst == 0) worst = exit_code(f.status());
        }
        csv += lr + "," + metric_buf + "," + status + "\n";
      }
      write_file(fs::path(run.out) / "sweep.csv", csv);
      return worst;
    }

    if (*ref_cmd) {
      Handle<sm_config> config = default_config();
      RunSettings ignored;
      if (!ref_config.empty()) load_config_file(ref_config, config.get(), ignored);
      if (ref_frames > 0) check(sm_config_set(config.get(), "frames", std::to_string(ref_frames).c_str()), "frames");
      if (ref_size > 0) check(sm_config_set(config.get(), "size", std::to_string(ref_size).c_str()), "size");
      sm_sketch* raw = nullptr;
      check(sm_sketch_load_svg(ref_sketch.c_str(), &raw), "sketch");
      Handle<sm_sketch> sketch(raw);
      check(sm_reference_translate(sketch.get(), config.get(), ref_dx, ref_dy, ref_out.c_str()), "reference");
      return 0;
    }
    return 1;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.what());
    return exit_code(f.status());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
}
