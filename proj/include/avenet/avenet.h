/*
 * Copyright 2026 The AVENet Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef AVENET_AVENET_H_
#define AVENET_AVENET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AVENET_API __declspec(dllexport)
#else
#define AVENET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a message is available
 * from avenet_last_error() on the calling thread until the next call. */
typedef enum avenet_status {
  AVENET_OK = 0,
  AVENET_ERR_CONFIG = 1,
  AVENET_ERR_VALIDATION = 2,
  AVENET_ERR_PARSE = 3,
  AVENET_ERR_FORMAT = 4,
  AVENET_ERR_SHAPE = 5,
  AVENET_ERR_USAGE = 6,
  AVENET_ERR_IO = 7,
  AVENET_ERR_NUMERIC = 8,
  AVENET_ERR_INTERNAL = 9
} avenet_status;

typedef enum avenet_provenance {
  AVENET_PROVENANCE_RAW = 0,
  AVENET_PROVENANCE_AVENET = 1,
  AVENET_PROVENANCE_AVERAGE = 2,
  AVENET_PROVENANCE_CONVERTED = 3
} avenet_provenance;

typedef struct avenet_config avenet_config;
typedef struct avenet_corpus avenet_corpus;
typedef struct avenet_encoder avenet_encoder;
typedef struct avenet_decoder avenet_decoder;
typedef struct avenet_features avenet_features;
typedef struct avenet_text avenet_text;

AVENET_API const char* avenet_version(void);
AVENET_API const char* avenet_last_error(void);
AVENET_API const char* avenet_status_name(avenet_status status);
/* Process exit code for a status: 0 ok, 1 validation/config, 2 I/O,
 * 3 numerical abort. */
AVENET_API int avenet_exit_code(avenet_status status);

/* Owned text (JSON, CSV). */
AVENET_API const char* avenet_text_data(const avenet_text* text);
AVENET_API size_t avenet_text_size(const avenet_text* text);
AVENET_API void avenet_text_free(avenet_text* text);

/* Run configuration. `overrides` is an array of "section.key=value"
 * strings applied before validation; it may be NULL when count is 0. */
AVENET_API avenet_status avenet_config_default(avenet_config** out);
AVENET_API avenet_status avenet_config_load(const char* path, const char* const* overrides, size_t count,
                                            avenet_config** out);
AVENET_API avenet_status avenet_config_from_json(const char* json, const char* const* overrides,
                                                 size_t count, avenet_config** out);
/* Fully resolved config, defaults included. */
AVENET_API avenet_status avenet_config_to_json(const avenet_config* config, avenet_text** out);
AVENET_API void avenet_config_free(avenet_config* config);

/* Corpora. `threads` of 0 or 1 runs serially; output does not depend on it. */
AVENET_API avenet_status avenet_corpus_generate(const avenet_config* config, unsigned threads,
                                                avenet_corpus** out);
AVENET_API avenet_status avenet_corpus_write(const avenet_corpus* corpus, const char* dir, unsigned threads);
AVENET_API avenet_status avenet_corpus_load(const char* dir, unsigned threads, avenet_corpus** out);
AVENET_API size_t avenet_corpus_group_count(const avenet_corpus* corpus);
AVENET_API size_t avenet_corpus_feature_dim(const avenet_corpus* corpus);
/* Copies a base speaker's embedding into `out` (capacity `cap`), storing
 * its length in `dim`. Unknown ids are AVENET_ERR_VALIDATION. */
AVENET_API avenet_status avenet_corpus_speaker(const avenet_corpus* corpus, const char* id, float* out,
                                               size_t cap, size_t* dim);
AVENET_API void avenet_corpus_free(avenet_corpus* corpus);

typedef void (*avenet_log_fn)(uint64_t step, double avg_loss, double comp_loss, double total_loss, void* user);

typedef struct avenet_train_options {
  const char* checkpoint_path; /* NULL: no checkpoints */
  const char* log_path;        /* NULL: no log file */
  int resume;                  /* continue from checkpoint_path */
  avenet_log_fn on_log;
  void* user;
} avenet_train_options;

/* Encoder. */
AVENET_API avenet_status avenet_encoder_init(const avenet_config* config, avenet_encoder** out);
AVENET_API avenet_status avenet_encoder_train(const avenet_config* config, const avenet_corpus* corpus,
                                              const avenet_train_options* options, avenet_encoder** out);
AVENET_API avenet_status avenet_encoder_load(const char* path, avenet_encoder** out);
AVENET_API avenet_status avenet_encoder_save(const avenet_encoder* encoder, const char* path);
AVENET_API avenet_status avenet_encoder_encode(const avenet_encoder* encoder, const avenet_features* input,
                                               avenet_features** out);
/* Config echo stored with the weights (JSON). */
AVENET_API avenet_status avenet_encoder_config_json(const avenet_encoder* encoder, avenet_text** out);
AVENET_API void avenet_encoder_free(avenet_encoder* encoder);

/* Decoder (feature-domain conversion). The encoder is only read. */
AVENET_API avenet_status avenet_decoder_train(const avenet_config* config, const avenet_corpus* corpus,
                                              const avenet_encoder* encoder, const avenet_train_options* options,
                                              avenet_decoder** out);
AVENET_API avenet_status avenet_decoder_load(const char* path, avenet_decoder** out);
AVENET_API avenet_status avenet_decoder_save(const avenet_decoder* decoder, const char* path);
AVENET_API void avenet_decoder_free(avenet_decoder* decoder);
AVENET_API avenet_status avenet_convert(const avenet_decoder* decoder, const avenet_encoder* encoder,
                                        const avenet_features* source, const float* target_speaker,
                                        size_t speaker_dim, avenet_features** out);

/* Feature sequences (row-major frames x dim). */
AVENET_API avenet_status avenet_features_create(const float* data, size_t frames, size_t dim,
                                                avenet_provenance provenance, avenet_features** out);
AVENET_API avenet_status avenet_features_read(const char* path, avenet_features** out);
AVENET_API avenet_status avenet_features_write(const avenet_features* features, const char* path);
AVENET_API size_t avenet_features_frames(const avenet_features* features);
AVENET_API size_t avenet_features_dim(const avenet_features* features);
AVENET_API const float* avenet_features_data(const avenet_features* features);
AVENET_API avenet_provenance avenet_features_provenance(const avenet_features* features);
/* Mean absolute elementwise difference. */
AVENET_API avenet_status avenet_features_distance(const avenet_features* a, const avenet_features* b,
                                                  double* out);
AVENET_API void avenet_features_free(avenet_features* features);

/* Pipelines. Reports are JSON documents echoing the resolved config. */
AVENET_API avenet_status avenet_evaluate(const avenet_config* config, const avenet_corpus* corpus,
                                         const avenet_encoder* encoder, int with_probes, avenet_text** report);
/* `skip_labels` is a comma-separated label list or NULL. */
AVENET_API avenet_status avenet_align_files(const char* const* a_paths, const char* const* b_paths, size_t count,
                                            const char* skip_labels, avenet_text** report);
AVENET_API avenet_status avenet_align_corpus(const avenet_config* config, const char* corpus_dir,
                                             const char* skip_labels, avenet_text** report);
/* Swap test over held-out corpus pairs. */
AVENET_API avenet_status avenet_conversion_report(const avenet_config* config, const avenet_corpus* corpus,
                                                  const avenet_encoder* encoder, const avenet_decoder* decoder,
                                                  avenet_text** report);
/* Compares encoders trained with and without LWS on held-out blends. */
AVENET_API avenet_status avenet_unseen_speaker_report(const avenet_config* config, const avenet_corpus* corpus,
                                                      const avenet_encoder* with_lws,
                                                      const avenet_encoder* without_lws, avenet_text** report);
AVENET_API avenet_status avenet_project(const avenet_config* config, const avenet_corpus* corpus,
                                        const avenet_encoder* encoder, avenet_text** csv, avenet_text** report);

#ifdef __cplusplus
}
#endif

#endif /* AVENET_AVENET_H_ */
