// Copyright (c) 2026 The phraseboost Authors
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

// C interface to the phrase-boosting library. All objects are opaque handles
// created by *_load / *_build functions and released with the matching
// *_free. Functions returning pb_status set a thread-local message readable
// with pb_last_error() on failure. Strings returned through char** are owned
// by the caller and released with pb_string_free().
//
// Handles are immutable after creation and may be shared across threads for
// the read-only calls (scoring, decoding).

#ifndef PHRASEBOOST_PHRASEBOOST_H_
#define PHRASEBOOST_PHRASEBOOST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PB_BUILDING_LIBRARY)
#define PB_API __attribute__((visibility("default")))
#else
#define PB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pb_status {
  PB_OK = 0,
  PB_ERR_INVALID_ARGUMENT = 1,
  PB_ERR_IO = 2,
  PB_ERR_FORMAT = 3,
  PB_ERR_INTERNAL = 4,
} pb_status;

PB_API const char* pb_last_error(void);
PB_API const char* pb_version(void);
PB_API char* pb_string_dup(const char* s);
PB_API void pb_string_free(char* s);

/* Vocabulary ------------------------------------------------------------- */

typedef struct pb_vocab pb_vocab;

/* blank_symbol / eos_symbol may be NULL. */
PB_API pb_status pb_vocab_load(const char* path, const char* blank_symbol,
                               const char* eos_symbol, pb_vocab** out);
PB_API void pb_vocab_free(pb_vocab* vocab);
PB_API int32_t pb_vocab_size(const pb_vocab* vocab);
PB_API int32_t pb_vocab_blank_id(const pb_vocab* vocab); /* -1 if none */
PB_API int32_t pb_vocab_eos_id(const pb_vocab* vocab);   /* -1 if none */
PB_API pb_status pb_vocab_tokenize(const pb_vocab* vocab, const char* text,
                                   int32_t ids_mode, int32_t** ids,
                                   size_t* count);
PB_API void pb_ids_free(int32_t* ids);

/* Context list ----------------------------------------------------------- */

typedef enum pb_tokenize_mode {
  PB_TOKENIZE_CHAR = 0,
  PB_TOKENIZE_IDS = 1,
} pb_tokenize_mode;

typedef struct pb_context_list pb_context_list;

PB_API pb_status pb_context_list_load(const char* path, const pb_vocab* vocab,
                                      pb_tokenize_mode mode, int32_t min_chars,
                                      pb_context_list** out);
PB_API void pb_context_list_free(pb_context_list* list);
PB_API int32_t pb_context_list_size(const pb_context_list* list);
PB_API int32_t pb_context_list_num_duplicates(const pb_context_list* list);
PB_API int32_t pb_context_list_num_too_short(const pb_context_list* list);

/* Boosting table --------------------------------------------------------- */

typedef enum pb_weight_mode {
  PB_WEIGHT_DEPTH_SCALED = 0,
  PB_WEIGHT_UNIFORM = 1,
} pb_weight_mode;

typedef struct pb_tree_params {
  float c0;
  float beta;
  pb_weight_mode weight_mode;
  float uniform_final_bonus;
  float unk_score;
} pb_tree_params;

/* c0 = 1, beta = 2, depth-scaled, bonus 0, unk_score 0. */
PB_API pb_tree_params pb_tree_params_default(void);

typedef struct pb_table pb_table;

typedef struct pb_table_summary {
  int32_t num_states;
  int32_t num_arcs;
  int32_t num_finals;
  int32_t max_depth;
  int32_t vocab_size;
  float unk_score;
} pb_table_summary;

PB_API pb_status pb_table_build(const pb_context_list* list,
                                const pb_vocab* vocab,
                                const pb_tree_params* params, pb_table** out);
PB_API pb_status pb_table_load(const char* path, pb_table** out);
PB_API pb_status pb_table_save(const pb_table* table, const char* path);
PB_API void pb_table_free(pb_table* table);
PB_API pb_status pb_table_get_summary(const pb_table* table,
                                      pb_table_summary* out);
/* scores and next_states must hold num_states * vocab_size entries. */
PB_API pb_status pb_table_get_scores(const pb_table* table,
                                     const int32_t* states, size_t num_states,
                                     float* scores, int32_t* next_states);
/* Human-readable listing of the prefix tree behind a context list. */
PB_API pb_status pb_tree_dump(const pb_context_list* list,
                              const pb_vocab* vocab,
                              const pb_tree_params* params, char** out);

/* Acoustic inputs -------------------------------------------------------- */

typedef struct pb_emissions pb_emissions;

PB_API pb_status pb_emissions_load(const char* path, int32_t strict,
                                   pb_emissions** out);
PB_API pb_status pb_emissions_save(const pb_emissions* em, const char* path);
PB_API void pb_emissions_free(pb_emissions* em);
PB_API int32_t pb_emissions_num_frames(const pb_emissions* em);
PB_API int32_t pb_emissions_vocab_size(const pb_emissions* em);
PB_API void pb_emissions_set_frame_duration(pb_emissions* em, float seconds);
/* TBT1 files carry no blank id; CTC and transducer decoding need one. */
PB_API pb_status pb_emissions_set_blank_id(pb_emissions* em, int32_t blank_id);
PB_API double pb_emissions_duration(const pb_emissions* em);

typedef struct pb_synth_options {
  float margin;
  uint64_t seed;
  int32_t frames_per_token;
  int32_t blank_frames;
  float clean_gap;
} pb_synth_options;

PB_API pb_synth_options pb_synth_options_default(void);

/* designated: per-position flags (NULL = all designated); avoid: tokens that
   may not act as distractors. */
PB_API pb_status pb_emissions_synth_ctc(
    const int32_t* target, size_t target_len, int32_t vocab_size,
    int32_t blank_id, const pb_synth_options* options,
    const uint8_t* designated, const int32_t* avoid, size_t avoid_len,
    pb_emissions** out);

typedef struct pb_step_model pb_step_model;

PB_API pb_status pb_step_model_load(const char* path, pb_step_model** out);
PB_API void pb_step_model_free(pb_step_model* model);
PB_API int32_t pb_step_model_num_frames(const pb_step_model* model);
PB_API int32_t pb_step_model_vocab_size(const pb_step_model* model);

/* Decoding --------------------------------------------------------------- */

typedef enum pb_decode_mode {
  PB_DECODE_CTC_GREEDY = 0,
  PB_DECODE_CTC_BEAM = 1,
  PB_DECODE_RNNT_GREEDY = 2,
  PB_DECODE_RNNT_BEAM = 3,
  PB_DECODE_AED_BEAM = 4,
} pb_decode_mode;

typedef struct pb_decode_config {
  float lambda;
  int32_t beam_size;
  int32_t max_symbols_per_frame;
  int32_t eos_bump_enabled;
  int32_t boost_enabled;
  int32_t keep_trace;
  int32_t num_frames; /* transducer; 0 = from the model */
  int32_t max_len;    /* AED; required */
} pb_decode_config;

/* Defaults per mode: lambda 1, beam 8 (3 for AED), 5 symbols per frame. */
PB_API pb_decode_config pb_decode_config_default(pb_decode_mode mode);

typedef struct pb_result pb_result;

/* table may be NULL (baseline decoding). vocab supplies blank/eos ids and
   the text rendering. */
PB_API pb_status pb_decode_emissions(pb_decode_mode mode,
                                     const pb_emissions* em,
                                     const pb_table* table,
                                     const pb_vocab* vocab,
                                     const pb_decode_config* config,
                                     pb_result** out);
PB_API pb_status pb_decode_step_model(pb_decode_mode mode,
                                      const pb_step_model* model,
                                      const pb_table* table,
                                      const pb_vocab* vocab,
                                      const pb_decode_config* config,
                                      pb_result** out);
PB_API void pb_result_free(pb_result* result);
PB_API int32_t pb_result_num_hypotheses(const pb_result* result);
PB_API pb_status pb_result_tokens(const pb_result* result, int32_t rank,
                                  const int32_t** tokens, size_t* count);
PB_API pb_status pb_result_scores(const pb_result* result, int32_t rank,
                                  float* am_score, float* boost_score);
/* One JSON object {"id","text","tokens","am_score","boost_score"[,"trace"]}
   for the best hypothesis, without a trailing newline. */
PB_API pb_status pb_result_to_json(const pb_result* result, const char* id,
                                   int32_t with_trace, char** out);

/* Evaluation ------------------------------------------------------------- */

/* refs / hyps: JSON-lines with "id" and "text". phrases_path may be NULL.
   report_json and report_table may be NULL when not wanted. */
PB_API pb_status pb_evaluate(const char* refs_path, const char* hyps_path,
                             const char* phrases_path, int32_t min_chars,
                             int32_t case_sensitive, char** report_json,
                             char** report_table);

PB_API pb_status pb_rtfx(double audio_seconds, double wall_seconds,
                         double* out);

/* Bench callback: performs one full decoding run and returns its output
   (allocated with pb_string_dup) for the determinism check. */
typedef pb_status (*pb_bench_fn)(void* user_data, char** output);

typedef struct pb_bench_report {
  int32_t warmup;
  int32_t runs_completed;
  double mean_seconds;
  double audio_seconds;
  double rtfx;
  int32_t deterministic;
} pb_bench_report;

/* run_seconds, if not NULL, receives up to runs timings. Returns an error
   when a run fails or outputs differ; the report is filled either way. */
PB_API pb_status pb_bench(pb_bench_fn fn, void* user_data, int32_t runs,
                          int32_t warmup, double audio_seconds,
                          double* run_seconds, pb_bench_report* report);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // PHRASEBOOST_PHRASEBOOST_H_
