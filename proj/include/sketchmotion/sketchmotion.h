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

#ifndef SKETCHMOTION_SKETCHMOTION_H_
#define SKETCHMOTION_SKETCHMOTION_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SKETCHMOTION_BUILDING)
#define SM_API __declspec(dllexport)
#else
#define SM_API __declspec(dllimport)
#endif
#else
#define SM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first four double as CLI exit codes. */
typedef enum sm_status {
  SM_OK = 0,
  SM_ERR_PARSE = 1,
  SM_ERR_CRITIC = 2,
  SM_ERR_NUMERIC = 3,
  SM_ERR_INVALID_ARGUMENT = 4,
  SM_ERR_IO = 5,
  SM_ERR_INTERNAL = 6
} sm_status;

typedef struct sm_sketch sm_sketch;
typedef struct sm_config sm_config;
typedef struct sm_critic sm_critic;
typedef struct sm_result sm_result;

typedef enum sm_branch { SM_BRANCH_LOCAL = 0, SM_BRANCH_GLOBAL = 1 } sm_branch;

typedef struct sm_step_info {
  int step;
  sm_branch branch;
  int t;
  double sds_grad_norm;
  double mean_abs_dz;
  double wall_ms;
} sm_step_info;

typedef void (*sm_step_callback)(const sm_step_info* info, void* user);

typedef struct sm_metrics {
  int steps_run;
  double mean_abs_dz;
  double mean_abs_dz_local;
  double mean_abs_dz_global;
  /* NaN when the critic has no reference video. */
  double initial_target_mse;
  double final_target_mse;
} sm_metrics;

SM_API const char* sm_version(void);
SM_API const char* sm_status_name(sm_status status);
/* Message of the last failing call on this thread; empty when none. */
SM_API const char* sm_last_error(void);

/* String getters copy into buf (NUL-terminated, truncated to cap) and report
 * the full length excluding the terminator in *needed when non-NULL. */

/* Sketches */
SM_API sm_status sm_sketch_load_svg(const char* path, sm_sketch** out);
SM_API sm_status sm_sketch_parse_svg(const char* text, size_t length, sm_sketch** out);
SM_API void sm_sketch_free(sm_sketch* sketch);
SM_API size_t sm_sketch_stroke_count(const sm_sketch* sketch);
SM_API size_t sm_sketch_point_count(const sm_sketch* sketch);
SM_API sm_status sm_sketch_canvas(const sm_sketch* sketch, int* width, int* height);
/* Writes 2 * point_count doubles as x0, y0, x1, y1, ... */
SM_API sm_status sm_sketch_points(const sm_sketch* sketch, double* xy, size_t capacity);
SM_API sm_status sm_sketch_save_svg(const sm_sketch* sketch, const char* path);
SM_API sm_status sm_sketch_save_png(const sm_sketch* sketch, const sm_config* config, const char* path);

/* Configuration: flat key = value pairs named after the CLI flags. */
SM_API sm_status sm_config_create(sm_config** out);
SM_API sm_status sm_config_clone(const sm_config* config, sm_config** out);
SM_API void sm_config_free(sm_config* config);
SM_API sm_status sm_config_set(sm_config* config, const char* key, const char* value);
SM_API sm_status sm_config_get(const sm_config* config, const char* key, char* buf, size_t cap, size_t* needed);
/* Reads "key = value" lines; '#' starts a comment. */
SM_API sm_status sm_config_load_file(sm_config* config, const char* path);
SM_API sm_status sm_config_dump(const sm_config* config, char* buf, size_t cap, size_t* needed);
SM_API sm_status sm_config_validate(const sm_config* config);
SM_API int sm_config_is_key(const char* key);

/* Critics */
SM_API sm_status sm_critic_create_zero(sm_critic** out);
/* Reference video: .npy, raw float32 with a .json sidecar, or a PNG directory. */
SM_API sm_status sm_critic_create_target(const char* reference_path, sm_critic** out);
SM_API sm_status sm_critic_create_remote(const char* url, double timeout_seconds, sm_critic** out);
/* Parses "zero", "target:<path>" or "remote:<url>". */
SM_API sm_status sm_critic_create_from_spec(const char* spec, sm_critic** out);
SM_API sm_status sm_critic_check(sm_critic* critic);
SM_API sm_status sm_critic_describe(const sm_critic* critic, char* buf, size_t cap, size_t* needed);
SM_API void sm_critic_free(sm_critic* critic);

/* Training. The sketch is fitted onto the configured canvas first. When
 * checkpoint_path is non-NULL the field is saved there every
 * checkpoint-every steps. */
SM_API sm_status sm_train(const sm_sketch* sketch, const char* prompt, sm_critic* critic, const sm_config* config,
                          sm_step_callback callback, void* user, const char* checkpoint_path, sm_result** out);

SM_API void sm_result_free(sm_result* result);
SM_API size_t sm_result_frame_count(const sm_result* result);
SM_API sm_status sm_result_frame_sketch(const sm_result* result, size_t frame, sm_sketch** out);
/* Row-major affine rows {a, b, tx, c, d, ty} of the global transform. */
SM_API sm_status sm_result_transform(const sm_result* result, size_t frame, double rows[6]);
SM_API sm_status sm_result_metrics(const sm_result* result, sm_metrics* out);
SM_API sm_status sm_result_log(const sm_result* result, char* buf, size_t cap, size_t* needed);
/* Writes frame_%03d.svg, frame_%03d.png, animation.gif, field.skmf,
 * log.jsonl and timing.jsonl into dir (created if missing). */
SM_API sm_status sm_result_write_outputs(const sm_result* result, const char* dir, double fps);
SM_API sm_status sm_result_save_checkpoint(const sm_result* result, const char* path);

/* Renders the sketch translating by (dx, dy) pixels per frame and stores it
 * as a .npy reference video of shape (frames, size, size). */
SM_API sm_status sm_reference_translate(const sm_sketch* sketch, const sm_config* config, double dx, double dy,
                                        const char* npy_path);

#ifdef __cplusplus
}
#endif

#endif /* SKETCHMOTION_SKETCHMOTION_H_ */
