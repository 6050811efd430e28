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
// avenet: command-line driver over the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "avenet/avenet.h"

namespace {

using Json = nlohmann::ordered_json;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void raise(int code, std::string message) { throw Failure{code, std::move(message)}; }

void check(avenet_status s) {
  if (s == AVENET_OK) return;
  raise(avenet_exit_code(s), std::string(avenet_status_name(s)) + ": " + avenet_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<avenet_config, Deleter<avenet_config, avenet_config_free>>;
using Corpus = std::unique_ptr<avenet_corpus, Deleter<avenet_corpus, avenet_corpus_free>>;
using Encoder = std::unique_ptr<avenet_encoder, Deleter<avenet_encoder, avenet_encoder_free>>;
using Decoder = std::unique_ptr<avenet_decoder, Deleter<avenet_decoder, avenet_decoder_free>>;
using Features = std::unique_ptr<avenet_features, Deleter<avenet_features, avenet_features_free>>;
using Text = std::unique_ptr<avenet_text, Deleter<avenet_text, avenet_text_free>>;

std::string take(avenet_text* t) {
  Text owned(t);
  return std::string(avenet_text_data(t), avenet_text_size(t));
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<unsigned> threads;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run config (JSON); defaults apply to omitted keys");
    cmd->add_option("--set", overrides, "Override a config value, e.g. --set training.steps=500 (repeatable)");
    cmd->add_option("--threads", threads,
                    "Worker threads for corpus generation and loading (default: $AVENET_THREADS or 1)")
        ->check(CLI::Range(1u, 1024u));
  }

  unsigned thread_count() const {
    if (threads) return *threads;
    const char* env = std::getenv("AVENET_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) raise(1, "AVENET_THREADS must be an integer in [1, 1024]");
    return static_cast<unsigned>(n);
  }

  Config load(std::vector<std::string> extra = {}) const {
    std::vector<std::string> all = overrides;
    all.insert(all.end(), extra.begin(), extra.end());
    std::vector<const char*> ptrs;
    for (const auto& s : all) ptrs.push_back(s.c_str());
    avenet_config* c = nullptr;
    if (config_path.empty()) {
      check(avenet_config_from_json("{}", ptrs.data(), ptrs.size(), &c));
    } else {
      check(avenet_config_load(config_path.c_str(), ptrs.data(), ptrs.size(), &c));
    }
    return Config(c);
  }
};

Json config_json(const avenet_config* c) {
  avenet_text* t = nullptr;
  check(avenet_config_to_json(c, &t));
  return Json::parse(take(t));
}

std::string path_or(const std::string& flag, const avenet_config* c, const char* key, const char* what) {
  if (!flag.empty()) return flag;
  const std::string p = config_json(c)["paths"][key].get<std::string>();
  if (p.empty()) raise(1, std::string("no ") + what + " given (flag or paths." + key + ")");
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(2, "cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) raise(2, "write failed for '" + path + "'");
}

Corpus load_corpus(const std::string& dir, unsigned threads) {
  avenet_corpus* c = nullptr;
  check(avenet_corpus_load(dir.c_str(), threads, &c));
  return Corpus(c);
}

Encoder load_encoder(const std::string& path) {
  avenet_encoder* e = nullptr;
  check(avenet_encoder_load(path.c_str(), &e));
  return Encoder(e);
}

void print_log(uint64_t step, double avg, double comp, double total, void*) {
  std::fprintf(stderr, "step %llu  avg %.6f  comp %.6f  total %.6f\n", static_cast<unsigned long long>(step), avg,
               comp, total);
}

// synth

struct SynthCmd {
  Common common;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic FAPS corpus");
    common.attach(cmd);
    cmd->add_option("--out", out, "Output corpus directory (default: paths.corpus)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    const std::string dir = path_or(out, cfg.get(), "corpus", "output directory");
    const unsigned threads = common.thread_count();
    avenet_corpus* c = nullptr;
    check(avenet_corpus_generate(cfg.get(), threads, &c));
    Corpus corpus(c);
    check(avenet_corpus_write(corpus.get(), dir.c_str(), threads));
    std::fprintf(stderr, "wrote %zu groups to %s\n", avenet_corpus_group_count(corpus.get()), dir.c_str());
  }
};

// train

struct TrainCmd {
  Common common;
  std::string corpus, out, log, encoder;
  bool resume = false, no_comp = false, no_lws = false, decoder = false;
  std::optional<unsigned long long> steps, seed;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train the AVENet encoder, or the conversion decoder with --decoder");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus directory (default: paths.corpus)");
    cmd->add_option("--out", out, "Checkpoint path (default: paths.encoder, or paths.decoder with --decoder)");
    cmd->add_option("--log", log, "Training log (TSV: step, avg, comp, total)");
    cmd->add_option("--steps", steps, "Override the number of training steps");
    cmd->add_option("--seed", seed, "Override the training seed");
    cmd->add_flag("--resume", resume, "Continue an encoder run from the checkpoint at --out");
    cmd->add_flag("--no-comp-loss", no_comp, "Disable the contrastive term (ablation)");
    cmd->add_flag("--no-lws", no_lws, "Train on base speakers only (ablation)");
    cmd->add_flag("--decoder", decoder, "Train the conversion decoder on a trained encoder");
    cmd->add_option("--encoder", encoder, "Encoder checkpoint for --decoder (default: paths.encoder)");
    cmd->callback([this] { run(); });
  }

  void run() {
    if (decoder && (resume || no_comp || no_lws)) {
      raise(1, "--resume, --no-comp-loss and --no-lws apply to encoder training only");
    }
    if (!decoder && !encoder.empty()) raise(1, "--encoder is only used with --decoder");
    const std::string section = decoder ? "decoder_training" : "training";
    std::vector<std::string> extra;
    if (steps) extra.push_back(section + ".steps=" + std::to_string(*steps));
    if (seed) extra.push_back(section + ".seed=" + std::to_string(*seed));
    if (no_comp) extra.push_back("training.comp_loss_enabled=false");
    if (no_lws) extra.push_back("training.lws_in_training=false");
    auto cfg = common.load(extra);
    const std::string corpus_dir = path_or(corpus, cfg.get(), "corpus", "corpus directory");
    const std::string ckpt = path_or(out, cfg.get(), decoder ? "decoder" : "encoder", "checkpoint path");
    auto data = load_corpus(corpus_dir, common.thread_count());

    avenet_train_options opts{};
    opts.checkpoint_path = ckpt.c_str();
    opts.log_path = log.empty() ? nullptr : log.c_str();
    opts.resume = resume ? 1 : 0;
    opts.on_log = print_log;

    if (decoder) {
      auto enc = load_encoder(path_or(encoder, cfg.get(), "encoder", "encoder checkpoint"));
      avenet_decoder* d = nullptr;
      check(avenet_decoder_train(cfg.get(), data.get(), enc.get(), &opts, &d));
      avenet_decoder_free(d);
    } else {
      avenet_encoder* e = nullptr;
      check(avenet_encoder_train(cfg.get(), data.get(), &opts, &e));
      avenet_encoder_free(e);
    }
    std::fprintf(stderr, "checkpoint: %s\n", ckpt.c_str());
  }
};

// eval

struct EvalCmd {
  Common common;
  std::string corpus, encoder, without_lws, out;
  bool no_probes = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Distance, probe and unseen-speaker evaluation of an encoder");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus directory (default: paths.corpus)");
    cmd->add_option("--encoder", encoder, "Encoder checkpoint (default: paths.encoder)");
    cmd->add_option("--without-lws", without_lws,
                    "Encoder trained with --no-lws; adds the unseen blended-speaker comparison");
    cmd->add_flag("--no-probes", no_probes, "Skip the linear speaker probes");
    cmd->add_option("--out", out, "Report path (default: paths.out, or stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    auto data = load_corpus(path_or(corpus, cfg.get(), "corpus", "corpus directory"), common.thread_count());
    auto enc = load_encoder(path_or(encoder, cfg.get(), "encoder", "encoder checkpoint"));
    avenet_text* t = nullptr;
    check(avenet_evaluate(cfg.get(), data.get(), enc.get(), no_probes ? 0 : 1, &t));
    Json report = Json::parse(take(t));
    if (!without_lws.empty()) {
      auto base = load_encoder(without_lws);
      check(avenet_unseen_speaker_report(cfg.get(), data.get(), enc.get(), base.get(), &t));
      report["unseen_speakers"] = Json::parse(take(t))["unseen_speakers"];
    }
    const std::string dest = out.empty() ? config_json(cfg.get())["paths"]["out"].get<std::string>() : out;
    write_text(dest, report.dump(2) + "\n");
    if (report.contains("distance")) {
      std::fprintf(stderr, "reduction_ratio %.4f\n", report["distance"]["reduction_ratio"].get<double>());
    }
  }
};

// align

struct AlignCmd {
  Common common;
  std::vector<std::string> a, b;
  std::string corpus, skip, out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("align", "Phoneme boundary error between parallel interval files");
    common.attach(cmd);
    cmd->add_option("-a,--a", a, "Interval TSV of the first member of a pair (repeatable)");
    cmd->add_option("-b,--b", b, "Interval TSV of the second member of a pair (repeatable, same count as --a)");
    cmd->add_option("--corpus", corpus, "Score sampled within-group pairs of a corpus directory instead");
    cmd->add_option("--skip-labels", skip, "Comma-separated labels excluded from scoring");
    cmd->add_option("--out", out, "Report path (default: stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    avenet_text* t = nullptr;
    if (!corpus.empty()) {
      if (!a.empty() || !b.empty()) raise(1, "--corpus cannot be combined with --a/--b");
      auto cfg = common.load();
      check(avenet_align_corpus(cfg.get(), corpus.c_str(), skip.empty() ? nullptr : skip.c_str(), &t));
    } else {
      if (a.empty() || a.size() != b.size()) raise(1, "align needs matching --a and --b files, or --corpus");
      std::vector<const char*> pa, pb;
      for (const auto& s : a) pa.push_back(s.c_str());
      for (const auto& s : b) pb.push_back(s.c_str());
      check(avenet_align_files(pa.data(), pb.data(), pa.size(), skip.empty() ? nullptr : skip.c_str(), &t));
    }
    const std::string text = take(t);
    write_text(out, text);
    std::fprintf(stderr, "e_avg %.9f\n", Json::parse(text)["alignment"]["e_avg"].get<double>());
  }
};

// convert

struct ConvertCmd {
  Common common;
  std::string corpus, encoder, decoder, source, target, out, reference, report;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("convert", "Convert a feature file to a corpus speaker and run the swap test");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus directory holding the speaker table (default: paths.corpus)");
    cmd->add_option("--encoder", encoder, "Encoder checkpoint (default: paths.encoder)");
    cmd->add_option("--decoder", decoder, "Decoder checkpoint (default: paths.decoder)");
    cmd->add_option("--source", source, "Source FPK1 feature file")->required();
    cmd->add_option("--target-speaker", target, "Base speaker id, e.g. spk03")->required();
    cmd->add_option("--out", out, "Converted FPK1 output")->required();
    cmd->add_option("--reference", reference, "Target-speaker rendering of the same content; prints L1 before/after");
    cmd->add_option("--report", report, "Swap-test report path (default: paths.out, or stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    auto data = load_corpus(path_or(corpus, cfg.get(), "corpus", "corpus directory"), common.thread_count());
    auto enc = load_encoder(path_or(encoder, cfg.get(), "encoder", "encoder checkpoint"));
    avenet_decoder* d = nullptr;
    check(avenet_decoder_load(path_or(decoder, cfg.get(), "decoder", "decoder checkpoint").c_str(), &d));
    Decoder dec(d);

    size_t dim = 0;
    check(avenet_corpus_speaker(data.get(), target.c_str(), nullptr, 0, &dim));
    std::vector<float> spk(dim);
    check(avenet_corpus_speaker(data.get(), target.c_str(), spk.data(), spk.size(), &dim));

    avenet_features* f = nullptr;
    check(avenet_features_read(source.c_str(), &f));
    Features src(f);
    check(avenet_convert(dec.get(), enc.get(), src.get(), spk.data(), spk.size(), &f));
    Features converted(f);
    check(avenet_features_write(converted.get(), out.c_str()));

    if (!reference.empty()) {
      check(avenet_features_read(reference.c_str(), &f));
      Features ref(f);
      double before = 0, after = 0;
      check(avenet_features_distance(src.get(), ref.get(), &before));
      check(avenet_features_distance(converted.get(), ref.get(), &after));
      std::fprintf(stderr, "l1 source->reference %.6f  converted->reference %.6f\n", before, after);
    }

    avenet_text* t = nullptr;
    check(avenet_conversion_report(cfg.get(), data.get(), enc.get(), dec.get(), &t));
    const std::string text = take(t);
    const Json j = Json::parse(text);
    std::fprintf(stderr, "swap test: improved %.4f  median factor %.4f over %llu pairs\n",
                 j["conversion"]["improved_fraction"].get<double>(),
                 j["conversion"]["median_improvement_factor"].get<double>(),
                 j["conversion"]["pair_count"].get<unsigned long long>());
    write_text(report.empty() ? config_json(cfg.get())["paths"]["out"].get<std::string>() : report, text);
  }
};

// project

struct ProjectCmd {
  Common common;
  std::string corpus, encoder, out, report;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("project", "2-D PCA export of origin, average and AVENet frames");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus directory (default: paths.corpus)");
    cmd->add_option("--encoder", encoder, "Encoder checkpoint (default: paths.encoder)");
    cmd->add_option("--out", out, "CSV output (default: stdout)");
    cmd->add_option("--report", report, "Also write the JSON report with mean 2-D distances");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    auto data = load_corpus(path_or(corpus, cfg.get(), "corpus", "corpus directory"), common.thread_count());
    auto enc = load_encoder(path_or(encoder, cfg.get(), "encoder", "encoder checkpoint"));
    avenet_text* csv = nullptr;
    avenet_text* rep = nullptr;
    check(avenet_project(cfg.get(), data.get(), enc.get(), &csv, report.empty() ? nullptr : &rep));
    write_text(out, take(csv));
    if (rep != nullptr) write_text(report, take(rep));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AVENet average-feature disentanglement lab"};
  app.set_version_flag("--version", std::string(avenet_version()));
  app.require_subcommand(1);

  SynthCmd synth;
  TrainCmd train;
  EvalCmd eval;
  AlignCmd align;
  ConvertCmd convert;
  ProjectCmd project;
  synth.attach(app);
  train.attach(app);
  eval.attach(app);
  align.attach(app);
  convert.attach(app);
  project.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Failure& f) {
    std::fprintf(stderr, "avenet: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "avenet: %s\n", e.what());
    return 1;
  }
  return 0;
}
