// Copyright 2026 The AVENet Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "avenet/avenet.h"

#include <exception>
#include <new>
#include <string>

#include "common/binary_io.h"
#include "common/error.h"
#include "pipeline/pipeline.h"
#include "report/feature_file.h"

struct avenet_config {
  avenet::config::RunConfig cfg;
};
struct avenet_corpus {
  avenet::faps::Corpus corpus;
};
struct avenet_encoder {
  avenet::encoder::EncoderCheckpoint ckpt;
};
struct avenet_decoder {
  avenet::vc::DecoderCheckpoint ckpt;
};
struct avenet_features {
  avenet::FeatureSequence seq;
};
struct avenet_text {
  std::string text;
};

namespace {

using avenet::ErrorKind;
using avenet::fail;

thread_local std::string g_last_error;

avenet_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return AVENET_ERR_SHAPE;
    case ErrorKind::kConfig: return AVENET_ERR_CONFIG;
    case ErrorKind::kValidation: return AVENET_ERR_VALIDATION;
    case ErrorKind::kParse: return AVENET_ERR_PARSE;
    case ErrorKind::kFormat: return AVENET_ERR_FORMAT;
    case ErrorKind::kUsage: return AVENET_ERR_USAGE;
    case ErrorKind::kIo: return AVENET_ERR_IO;
    case ErrorKind::kNumeric: return AVENET_ERR_NUMERIC;
  }
  return AVENET_ERR_INTERNAL;
}

template <typename Fn>
avenet_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return AVENET_OK;
  } catch (const avenet::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    g_last_error = "internal error";
  }
  return AVENET_ERR_INTERNAL;
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::kUsage, std::string(what) + " must not be NULL");
  return *p;
}

const char* need(const char* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::kUsage, std::string(what) + " must not be NULL");
  return p;
}

void need_out(const void* p) {
  if (p == nullptr) fail(ErrorKind::kUsage, "output pointer must not be NULL");
}

avenet::config::RunConfig build_config(avenet::config::Json raw, const char* const* overrides, size_t count) {
  if (count > 0 && overrides == nullptr) fail(ErrorKind::kUsage, "overrides must not be NULL");
  for (size_t i = 0; i < count; ++i) avenet::config::apply_override(raw, need(overrides[i], "override"));
  return avenet::config::run_config_from_json(raw);
}

avenet_text* make_text(std::string s) { return new avenet_text{std::move(s)}; }

std::string dump(const avenet::config::Json& j) { return j.dump(2) + "\n"; }

avenet::encoder::TrainOptions train_options(const avenet_train_options* o) {
  avenet::encoder::TrainOptions out;
  if (o == nullptr) return out;
  if (o->checkpoint_path != nullptr) out.checkpoint_path = o->checkpoint_path;
  if (o->log_path != nullptr) out.log_path = o->log_path;
  out.resume = o->resume != 0;
  if (o->on_log != nullptr) {
    auto fn = o->on_log;
    void* user = o->user;
    out.on_log = [fn, user](const avenet::encoder::TrainLogEntry& e) {
      fn(e.step, e.avg_loss, e.comp_loss, e.total_loss, user);
    };
  }
  return out;
}

}  // namespace

extern "C" {

const char* avenet_version(void) { return "0.1.0"; }
const char* avenet_last_error(void) { return g_last_error.c_str(); }

const char* avenet_status_name(avenet_status s) {
  switch (s) {
    case AVENET_OK: return "ok";
    case AVENET_ERR_CONFIG: return "config error";
    case AVENET_ERR_VALIDATION: return "validation error";
    case AVENET_ERR_PARSE: return "parse error";
    case AVENET_ERR_FORMAT: return "format error";
    case AVENET_ERR_SHAPE: return "shape error";
    case AVENET_ERR_USAGE: return "usage error";
    case AVENET_ERR_IO: return "I/O error";
    case AVENET_ERR_NUMERIC: return "numerical error";
    case AVENET_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int avenet_exit_code(avenet_status s) {
  switch (s) {
    case AVENET_OK: return 0;
    case AVENET_ERR_IO: return 2;
    case AVENET_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

const char* avenet_text_data(const avenet_text* t) { return t ? t->text.c_str() : ""; }
size_t avenet_text_size(const avenet_text* t) { return t ? t->text.size() : 0; }
void avenet_text_free(avenet_text* t) { delete t; }

avenet_status avenet_config_default(avenet_config** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    auto cfg = avenet::config::run_config_from_json(avenet::config::Json::object());
    *out = new avenet_config{std::move(cfg)};
  });
}

avenet_status avenet_config_load(const char* path, const char* const* overrides, size_t count, avenet_config** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    const std::string p = need(path, "path");
    auto raw = avenet::config::parse_json_text(avenet::read_file(p), p);
    *out = new avenet_config{build_config(std::move(raw), overrides, count)};
  });
}

avenet_status avenet_config_from_json(const char* json, const char* const* overrides, size_t count,
                                      avenet_config** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    auto raw = avenet::config::parse_json_text(need(json, "json"), "config");
    *out = new avenet_config{build_config(std::move(raw), overrides, count)};
  });
}

avenet_status avenet_config_to_json(const avenet_config* c, avenet_text** out) {
  return guard([&] {
    need_out(out);
    *out = make_text(dump(avenet::config::to_json(need(c, "config").cfg)));
  });
}

void avenet_config_free(avenet_config* c) { delete c; }

avenet_status avenet_corpus_generate(const avenet_config* c, unsigned threads, avenet_corpus** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_corpus{avenet::faps::generate_corpus(need(c, "config").cfg.corpus, threads)};
  });
}

avenet_status avenet_corpus_write(const avenet_corpus* corpus, const char* dir, unsigned threads) {
  return guard([&] { avenet::faps::write_corpus(need(corpus, "corpus").corpus, need(dir, "dir"), threads); });
}

avenet_status avenet_corpus_load(const char* dir, unsigned threads, avenet_corpus** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_corpus{avenet::faps::load_corpus(need(dir, "dir"), threads)};
  });
}

size_t avenet_corpus_group_count(const avenet_corpus* c) { return c ? c->corpus.groups.size() : 0; }
size_t avenet_corpus_feature_dim(const avenet_corpus* c) { return c ? c->corpus.feature_dim() : 0; }

avenet_status avenet_corpus_speaker(const avenet_corpus* c, const char* id, float* out, size_t cap, size_t* dim) {
  return guard([&] {
    const std::string want = need(id, "id");
    for (const auto& s : need(c, "corpus").corpus.base_speakers) {
      if (s.id != want) continue;
      if (dim != nullptr) *dim = s.vector.size();
      if (out != nullptr) {
        if (cap < s.vector.size()) fail(ErrorKind::kUsage, "speaker buffer too small");
        std::copy(s.vector.begin(), s.vector.end(), out);
      }
      return;
    }
    fail(ErrorKind::kValidation, "unknown speaker id '" + want + "'");
  });
}

void avenet_corpus_free(avenet_corpus* c) { delete c; }

avenet_status avenet_encoder_init(const avenet_config* c, avenet_encoder** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    const auto& cfg = need(c, "config").cfg;
    *out = new avenet_encoder{{avenet::encoder::EncoderParams::initialize(cfg.encoder), cfg.training, std::nullopt}};
  });
}

avenet_status avenet_encoder_train(const avenet_config* c, const avenet_corpus* corpus,
                                   const avenet_train_options* options, avenet_encoder** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    const auto& cfg = need(c, "config").cfg;
    auto result = avenet::encoder::train_encoder(need(corpus, "corpus").corpus, cfg.encoder, cfg.training,
                                                 train_options(options));
    *out = new avenet_encoder{{std::move(result.params), cfg.training, std::move(result.state)}};
  });
}

avenet_status avenet_encoder_load(const char* path, avenet_encoder** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_encoder{avenet::encoder::load_checkpoint(need(path, "path"))};
  });
}

avenet_status avenet_encoder_save(const avenet_encoder* e, const char* path) {
  return guard([&] { avenet::encoder::save_checkpoint(need(e, "encoder").ckpt, need(path, "path")); });
}

avenet_status avenet_encoder_encode(const avenet_encoder* e, const avenet_features* in, avenet_features** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_features{avenet::encoder::encode(need(e, "encoder").ckpt.params, need(in, "input").seq)};
  });
}

avenet_status avenet_encoder_config_json(const avenet_encoder* e, avenet_text** out) {
  return guard([&] {
    need_out(out);
    const auto& ck = need(e, "encoder").ckpt;
    avenet::config::Json j;
    j["encoder"] = avenet::encoder::to_json(ck.params.config);
    j["training"] = avenet::encoder::to_json(ck.training);
    j["trained_steps"] = ck.state ? ck.state->step : 0;
    *out = make_text(dump(j));
  });
}

void avenet_encoder_free(avenet_encoder* e) { delete e; }

avenet_status avenet_decoder_train(const avenet_config* c, const avenet_corpus* corpus, const avenet_encoder* e,
                                   const avenet_train_options* options, avenet_decoder** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    const auto& cfg = need(c, "config").cfg;
    avenet::vc::DecoderTrainOptions opts;
    if (options != nullptr) {
      if (options->resume) fail(ErrorKind::kUsage, "decoder training does not support resume");
      if (options->checkpoint_path != nullptr) opts.checkpoint_path = options->checkpoint_path;
      if (options->log_path != nullptr) opts.log_path = options->log_path;
      opts.on_log = train_options(options).on_log;
    }
    auto r = avenet::vc::train_decoder(need(corpus, "corpus").corpus, need(e, "encoder").ckpt.params, cfg.decoder,
                                       cfg.decoder_training, opts);
    *out = new avenet_decoder{{std::move(r.params), cfg.decoder_training, std::move(r.state)}};
  });
}

avenet_status avenet_decoder_load(const char* path, avenet_decoder** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_decoder{avenet::vc::load_decoder_checkpoint(need(path, "path"))};
  });
}

avenet_status avenet_decoder_save(const avenet_decoder* d, const char* path) {
  return guard([&] { avenet::vc::save_decoder_checkpoint(need(d, "decoder").ckpt, need(path, "path")); });
}

void avenet_decoder_free(avenet_decoder* d) { delete d; }

avenet_status avenet_convert(const avenet_decoder* d, const avenet_encoder* e, const avenet_features* source,
                             const float* target_speaker, size_t speaker_dim, avenet_features** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    if (target_speaker == nullptr && speaker_dim > 0) fail(ErrorKind::kUsage, "target speaker must not be NULL");
    *out = new avenet_features{avenet::vc::convert(need(d, "decoder").ckpt.params, need(e, "encoder").ckpt.params,
                                                   need(source, "source").seq, {target_speaker, speaker_dim})};
  });
}

avenet_status avenet_features_create(const float* data, size_t frames, size_t dim, avenet_provenance prov,
                                     avenet_features** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    if (data == nullptr && frames * dim > 0) fail(ErrorKind::kUsage, "data must not be NULL");
    avenet::Provenance p;
    if (!avenet::provenance_from_u8(static_cast<std::uint8_t>(prov), p) || static_cast<int>(prov) < 0) {
      fail(ErrorKind::kValidation, "unknown provenance");
    }
    avenet::nn::Matrix m(frames, dim);
    if (frames * dim > 0) std::copy(data, data + frames * dim, m.ptr());
    *out = new avenet_features{avenet::FeatureSequence(std::move(m), p)};
  });
}

avenet_status avenet_features_read(const char* path, avenet_features** out) {
  return guard([&] {
    need_out(out);
    *out = nullptr;
    *out = new avenet_features{avenet::report::read_feature_file(need(path, "path"))};
  });
}

avenet_status avenet_features_write(const avenet_features* f, const char* path) {
  return guard([&] { avenet::report::write_feature_file(need(path, "path"), need(f, "features").seq); });
}

size_t avenet_features_frames(const avenet_features* f) { return f ? f->seq.frames() : 0; }
size_t avenet_features_dim(const avenet_features* f) { return f ? f->seq.dim() : 0; }
const float* avenet_features_data(const avenet_features* f) { return f ? f->seq.values().ptr() : nullptr; }
avenet_provenance avenet_features_provenance(const avenet_features* f) {
  return f ? static_cast<avenet_provenance>(f->seq.provenance()) : AVENET_PROVENANCE_RAW;
}

avenet_status avenet_features_distance(const avenet_features* a, const avenet_features* b, double* out) {
  return guard([&] {
    need_out(out);
    *out = avenet::pair_distance(need(a, "a").seq, need(b, "b").seq);
  });
}

void avenet_features_free(avenet_features* f) { delete f; }

avenet_status avenet_evaluate(const avenet_config* c, const avenet_corpus* corpus, const avenet_encoder* e,
                              int with_probes, avenet_text** report) {
  return guard([&] {
    need_out(report);
    *report = nullptr;
    const auto& cfg = need(c, "config").cfg;
    auto in = avenet::pipeline::evaluate(cfg, need(corpus, "corpus").corpus, need(e, "encoder").ckpt.params,
                                         {with_probes != 0});
    in.config["checkpoint"] = {{"encoder", avenet::encoder::to_json(e->ckpt.params.config)},
                               {"training", avenet::encoder::to_json(e->ckpt.training)}};
    *report = make_text(dump(avenet::report::aggregate_report(in)));
  });
}

avenet_status avenet_align_files(const char* const* a_paths, const char* const* b_paths, size_t count,
                                 const char* skip_labels, avenet_text** report) {
  return guard([&] {
    need_out(report);
    *report = nullptr;
    if (count == 0) fail(ErrorKind::kUsage, "align: no file pairs");
    std::vector<std::filesystem::path> a, b;
    if (a_paths == nullptr || b_paths == nullptr) fail(ErrorKind::kUsage, "path arrays must not be NULL");
    for (size_t i = 0; i < count; ++i) {
      a.emplace_back(need(a_paths[i], "path"));
      b.emplace_back(need(b_paths[i], "path"));
    }
    const auto skip = avenet::pipeline::parse_label_list(skip_labels ? skip_labels : "");
    avenet::report::ReportInputs in;
    in.command = "align";
    in.config = {{"skip_labels", std::vector<std::string>(skip.begin(), skip.end())}};
    in.alignment = avenet::pipeline::align_files(a, b, skip);
    *report = make_text(dump(avenet::report::aggregate_report(in)));
  });
}

avenet_status avenet_align_corpus(const avenet_config* c, const char* corpus_dir, const char* skip_labels,
                                  avenet_text** report) {
  return guard([&] {
    need_out(report);
    *report = nullptr;
    const auto& cfg = need(c, "config").cfg;
    const std::filesystem::path dir = need(corpus_dir, "corpus_dir");
    const auto corpus = avenet::faps::load_corpus(dir);
    const auto skip = avenet::pipeline::parse_label_list(skip_labels ? skip_labels : "");
    avenet::report::ReportInputs in;
    in.command = "align";
    in.config = avenet::config::to_json(cfg);
    in.config["skip_labels"] = std::vector<std::string>(skip.begin(), skip.end());
    in.alignment = avenet::pipeline::align_corpus(cfg, dir, corpus, skip);
    *report = make_text(dump(avenet::report::aggregate_report(in)));
  });
}

avenet_status avenet_conversion_report(const avenet_config* c, const avenet_corpus* corpus, const avenet_encoder* e,
                                       const avenet_decoder* d, avenet_text** report) {
  return guard([&] {
    need_out(report);
    *report = nullptr;
    const auto& cfg = need(c, "config").cfg;
    avenet::report::ReportInputs in;
    in.command = "convert";
    in.config = avenet::config::to_json(cfg);
    in.conversion = avenet::vc::conversion_oracle(need(corpus, "corpus").corpus, need(e, "encoder").ckpt.params,
                                                  need(d, "decoder").ckpt.params, cfg.eval.conversion_pairs,
                                                  cfg.eval.holdout_fraction, cfg.eval.seed);
    *report = make_text(dump(avenet::report::aggregate_report(in)));
  });
}

avenet_status avenet_unseen_speaker_report(const avenet_config* c, const avenet_corpus* corpus,
                                           const avenet_encoder* with_lws, const avenet_encoder* without_lws,
                                           avenet_text** report) {
  return guard([&] {
    need_out(report);
    *report = nullptr;
    const auto& cfg = need(c, "config").cfg;
    avenet::report::ReportInputs in;
    in.command = "eval";
    in.config = avenet::config::to_json(cfg);
    in.unseen_speakers = avenet::vc::probe_unseen_speakers(
        need(corpus, "corpus").corpus, with_lws ? &with_lws->ckpt : nullptr,
        without_lws ? &without_lws->ckpt : nullptr, cfg.probe, cfg.eval.pair_count, cfg.eval.seed);
    *report = make_text(dump(avenet::report::aggregate_report(in)));
  });
}

avenet_status avenet_project(const avenet_config* c, const avenet_corpus* corpus, const avenet_encoder* e,
                             avenet_text** csv, avenet_text** report) {
  return guard([&] {
    need_out(csv);
    *csv = nullptr;
    if (report != nullptr) *report = nullptr;
    const auto& cfg = need(c, "config").cfg;
    auto exp = avenet::report::project_selection(need(corpus, "corpus").corpus, need(e, "encoder").ckpt.params,
                                                 cfg.projection_selection());
    std::string text = avenet::report::projection_csv(exp.rows);
    if (report != nullptr) {
      avenet::report::ReportInputs in;
      in.command = "project";
      in.config = avenet::config::to_json(cfg);
      in.projection = std::move(exp);
      *report = make_text(dump(avenet::report::aggregate_report(in)));
    }
    *csv = make_text(std::move(text));
  });
}

}  // extern "C"
