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

#include "faps/corpus.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "common/binary_io.h"
#include "common/error.h"
#include "report/feature_file.h"

namespace avenet::faps {
namespace {

constexpr std::uint64_t kWorldStream = 1;
constexpr std::uint64_t kGroupStream = 2;
constexpr int kManifestVersion = 1;

void check_range(const IntRange& r, const char* name, std::int64_t min_lo) {
  if (r.lo < min_lo || r.lo > r.hi) {
    fail(ErrorKind::kConfig, std::string("corpus: ") + name + " range [" + std::to_string(r.lo) +
                                 ", " + std::to_string(r.hi) + "] is invalid");
  }
}

config::Json range_json(const IntRange& r) { return config::Json::array({r.lo, r.hi}); }

void read_range(config::FieldReader& rd, const char* key, IntRange& out, const std::string& path) {
  std::vector<std::int64_t> v{out.lo, out.hi};
  rd.get(key, v);
  if (v.size() != 2) fail(ErrorKind::kConfig, "config: " + path + "." + key + " must be [lo, hi]");
  out = {v[0], v[1]};
}

std::string group_dir(std::uint32_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "groups/%06u", id);
  return buf;
}

std::string script_text(const PhonemeScript& s) {
  std::string out;
  for (const auto& e : s.entries) out += std::to_string(e.phoneme) + "\t" + std::to_string(e.duration) + "\n";
  return out;
}

PhonemeScript parse_script(std::string_view text, const std::string& context) {
  PhonemeScript s;
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string row(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line;
    if (row.empty()) continue;
    unsigned p = 0, d = 0;
    int consumed = 0;
    if (std::sscanf(row.c_str(), "%u\t%u%n", &p, &d, &consumed) != 2 ||
        static_cast<std::size_t>(consumed) != row.size()) {
      fail(ErrorKind::kParse, context + ": line " + std::to_string(line) + ": expected 'phoneme<TAB>duration'");
    }
    s.entries.push_back({p, d});
  }
  s.validate();
  return s;
}

config::Json speaker_json(const SpeakerEmbedding& s) {
  config::Json j;
  j["id"] = s.id;
  j["vector"] = s.vector;
  if (s.blended()) {
    j["sources"] = s.sources;
    j["weights"] = s.weights;
  }
  return j;
}

SpeakerEmbedding speaker_from_json(const config::Json& j, std::size_t dim, const std::string& ctx) {
  SpeakerEmbedding s;
  try {
    s.id = j.at("id").get<std::string>();
    s.vector = j.at("vector").get<std::vector<float>>();
    if (j.contains("sources")) {
      s.sources = j.at("sources").get<std::vector<std::uint32_t>>();
      s.weights = j.at("weights").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, ctx + ": bad speaker entry: " + e.what());
  }
  if (s.vector.size() != dim) fail(ErrorKind::kFormat, ctx + ": speaker " + s.id + " has wrong dimension");
  if (s.sources.size() != s.weights.size()) fail(ErrorKind::kFormat, ctx + ": speaker " + s.id + " blend record is inconsistent");
  for (char c : s.id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) {
      fail(ErrorKind::kFormat, ctx + ": invalid speaker id '" + s.id + "'");
    }
  }
  return s;
}

}  // namespace

void CorpusConfig::validate() const {
  if (groups == 0) fail(ErrorKind::kConfig, "corpus: groups must be >= 1");
  if (base_speakers < 2) fail(ErrorKind::kConfig, "corpus: need at least 2 base speakers");
  if (feature_dim == 0 || content_dim == 0 || speaker_dim == 0) {
    fail(ErrorKind::kConfig, "corpus: dimensions must be >= 1");
  }
  if (phonemes < 2) fail(ErrorKind::kConfig, "corpus: need at least 2 phonemes");
  check_range(script_length, "script_length", 1);
  check_range(phoneme_duration, "phoneme_duration", 1);
  check_range(frames, "frames", 1);
  if (lws_members > 0) check_range(blend_arity, "blend_arity", 1);
  if (script_length.hi * phoneme_duration.hi < frames.lo || script_length.lo * phoneme_duration.lo > frames.hi) {
    fail(ErrorKind::kConfig, "corpus: frame range cannot be reached with the script and duration ranges");
  }
  if (!(drift_bound >= 0.0) || !(speaker_scale >= 0.0) || !(interaction_strength >= 0.0) || !(noise_std >= 0.0)) {
    fail(ErrorKind::kConfig, "corpus: drift, scales and noise must be non-negative");
  }
  if (!(frame_hop_seconds > 0.0)) fail(ErrorKind::kConfig, "corpus: frame_hop_seconds must be > 0");
}

config::Json to_json(const CorpusConfig& c) {
  config::Json j;
  j["groups"] = c.groups;
  j["base_speakers"] = c.base_speakers;
  j["lws_members"] = c.lws_members;
  j["feature_dim"] = c.feature_dim;
  j["content_dim"] = c.content_dim;
  j["speaker_dim"] = c.speaker_dim;
  j["phonemes"] = c.phonemes;
  j["script_length"] = range_json(c.script_length);
  j["phoneme_duration"] = range_json(c.phoneme_duration);
  j["frames"] = range_json(c.frames);
  j["blend_arity"] = range_json(c.blend_arity);
  j["drift_bound"] = c.drift_bound;
  j["speaker_scale"] = c.speaker_scale;
  j["interaction_strength"] = c.interaction_strength;
  j["noise_std"] = c.noise_std;
  j["frame_hop_seconds"] = c.frame_hop_seconds;
  j["seed"] = c.seed;
  return j;
}

CorpusConfig corpus_config_from_json(const config::Json& j, const std::string& path) {
  CorpusConfig c;
  config::FieldReader rd(j, path);
  rd.get("groups", c.groups);
  rd.get("base_speakers", c.base_speakers);
  rd.get("lws_members", c.lws_members);
  rd.get("feature_dim", c.feature_dim);
  rd.get("content_dim", c.content_dim);
  rd.get("speaker_dim", c.speaker_dim);
  rd.get("phonemes", c.phonemes);
  read_range(rd, "script_length", c.script_length, path);
  read_range(rd, "phoneme_duration", c.phoneme_duration, path);
  read_range(rd, "frames", c.frames, path);
  read_range(rd, "blend_arity", c.blend_arity, path);
  rd.get("drift_bound", c.drift_bound);
  rd.get("speaker_scale", c.speaker_scale);
  rd.get("interaction_strength", c.interaction_strength);
  rd.get("noise_std", c.noise_std);
  rd.get("frame_hop_seconds", c.frame_hop_seconds);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

GeneratorWorld GeneratorWorld::create(const CorpusConfig& cfg) {
  cfg.validate();
  Rng rng = Rng::derive(cfg.seed, {kWorldStream});
  GeneratorWorld w;
  w.phoneme_codes = nn::Matrix(cfg.phonemes, cfg.content_dim);
  for (auto& v : w.phoneme_codes.data()) v = static_cast<float>(rng.normal());
  w.mix = MixingModel::sample(cfg.content_dim, cfg.speaker_dim, cfg.feature_dim, cfg.speaker_scale,
                              cfg.interaction_strength, cfg.noise_std, rng);
  for (std::size_t i = 0; i < cfg.base_speakers; ++i) {
    SpeakerEmbedding s;
    char id[16];
    std::snprintf(id, sizeof id, "spk%02zu", i);
    s.id = id;
    s.vector.resize(cfg.speaker_dim);
    for (auto& v : s.vector) v = static_cast<float>(rng.normal());
    w.base_speakers.push_back(std::move(s));
  }
  return w;
}

FapsGroup generate_group(const CorpusConfig& cfg, const GeneratorWorld& world, std::uint32_t id) {
  Rng rng = Rng::derive(cfg.seed, {kGroupStream, id});
  PhonemeScript script;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 100000) fail(ErrorKind::kConfig, "corpus: could not sample a script inside the frame range");
    script = sample_script(rng, cfg.phonemes, cfg.script_length, cfg.phoneme_duration);
    const auto t = static_cast<std::int64_t>(script.total_frames());
    if (t >= cfg.frames.lo && t <= cfg.frames.hi) break;
  }
  const nn::Matrix content = expand_content(script, world.phoneme_codes, cfg.drift_bound, rng);
  return make_faps_group(id, script, content, world.base_speakers, cfg.lws_members, cfg.blend_arity,
                         world.mix, rng);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned w = 0; w < count; ++w) {
    workers.emplace_back([&] {
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop.store(true);
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

Corpus generate_corpus(const CorpusConfig& cfg, unsigned threads) {
  cfg.validate();
  const GeneratorWorld world = GeneratorWorld::create(cfg);
  Corpus corpus;
  corpus.config = cfg;
  corpus.base_speakers = world.base_speakers;
  corpus.groups.resize(cfg.groups);
  parallel_for(cfg.groups, threads, [&](std::size_t g) {
    corpus.groups[g] = generate_group(cfg, world, static_cast<std::uint32_t>(g));
  });
  return corpus;
}

std::filesystem::path member_feature_path(const FapsGroup& g, const FapsMember& m) {
  return std::filesystem::path(group_dir(g.id)) / (m.speaker.id + ".fpk");
}

std::filesystem::path member_interval_path(const FapsGroup& g, const FapsMember& m) {
  return std::filesystem::path(group_dir(g.id)) / (m.speaker.id + ".tsv");
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, unsigned threads) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "groups", ec);
  if (ec) fail(ErrorKind::kIo, "cannot create corpus directory " + dir.string() + ": " + ec.message());

  config::Json manifest;
  manifest["format"] = "avenet-corpus";
  manifest["version"] = kManifestVersion;
  manifest["seed"] = corpus.config.seed;
  manifest["config"] = to_json(corpus.config);
  config::Json speakers = config::Json::array();
  for (const auto& s : corpus.base_speakers) speakers.push_back(speaker_json(s));
  manifest["speakers"] = std::move(speakers);
  config::Json groups = config::Json::array();
  for (const auto& g : corpus.groups) {
    config::Json gj;
    gj["id"] = g.id;
    gj["frames"] = g.frames();
    gj["script"] = group_dir(g.id) + "/script.tsv";
    config::Json members = config::Json::array();
    for (const auto& m : g.members) {
      config::Json mj;
      mj["speaker"] = m.speaker.id;
      mj["role"] = to_string(m.role);
      mj["features"] = member_feature_path(g, m).generic_string();
      mj["intervals"] = member_interval_path(g, m).generic_string();
      if (m.role == MemberRole::kLws) mj["blend"] = speaker_json(m.speaker);
      members.push_back(std::move(mj));
    }
    gj["members"] = std::move(members);
    groups.push_back(std::move(gj));
  }
  manifest["groups"] = std::move(groups);

  parallel_for(corpus.groups.size(), threads, [&](std::size_t i) {
    const auto& g = corpus.groups[i];
    const auto gdir = dir / group_dir(g.id);
    std::error_code mk;
    std::filesystem::create_directories(gdir, mk);
    if (mk) fail(ErrorKind::kIo, "cannot create " + gdir.string() + ": " + mk.message());
    write_file(gdir / "script.tsv", script_text(g.script));
    const std::string intervals =
        align::serialize_intervals(export_intervals(g.script, corpus.config.frame_hop_seconds));
    for (const auto& m : g.members) {
      report::write_feature_file(dir / member_feature_path(g, m), m.features);
      write_file(dir / member_interval_path(g, m), intervals);
    }
  });
  write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

Corpus load_corpus(const std::filesystem::path& dir, unsigned threads) {
  const auto manifest_path = (dir / "manifest.json").string();
  config::Json m;
  try {
    m = config::Json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, manifest_path + ": " + e.what());
  }
  Corpus corpus;
  std::vector<config::Json> group_entries;
  try {
    if (m.at("format") != "avenet-corpus") fail(ErrorKind::kFormat, manifest_path + ": not a corpus manifest");
    if (m.at("version") != kManifestVersion) fail(ErrorKind::kFormat, manifest_path + ": unsupported manifest version");
    corpus.config = corpus_config_from_json(m.at("config"), "manifest.config");
    corpus.config.validate();
    for (const auto& s : m.at("speakers")) {
      corpus.base_speakers.push_back(speaker_from_json(s, corpus.config.speaker_dim, manifest_path));
    }
    for (const auto& g : m.at("groups")) group_entries.push_back(g);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, manifest_path + ": " + e.what());
  }
  if (corpus.base_speakers.size() != corpus.config.base_speakers) {
    fail(ErrorKind::kFormat, manifest_path + ": speaker table does not match the config");
  }
  if (group_entries.size() != corpus.config.groups) {
    fail(ErrorKind::kFormat, manifest_path + ": group count does not match the config");
  }
  corpus.groups.resize(group_entries.size());
  parallel_for(group_entries.size(), threads, [&](std::size_t i) {
    const auto& gj = group_entries[i];
    FapsGroup g;
    try {
      g.id = gj.at("id").get<std::uint32_t>();
      const auto script_rel = gj.at("script").get<std::string>();
      g.script = parse_script(read_file(dir / script_rel), script_rel);
      for (const auto& mj : gj.at("members")) {
        FapsMember member;
        const auto role = mj.at("role").get<std::string>();
        if (role == "base") {
          member.role = MemberRole::kBase;
          const auto id = mj.at("speaker").get<std::string>();
          auto it = std::find_if(corpus.base_speakers.begin(), corpus.base_speakers.end(),
                                 [&](const SpeakerEmbedding& s) { return s.id == id; });
          if (it == corpus.base_speakers.end()) fail(ErrorKind::kFormat, manifest_path + ": unknown speaker " + id);
          member.speaker = *it;
        } else if (role == "lws") {
          member.role = MemberRole::kLws;
          member.speaker = speaker_from_json(mj.at("blend"), corpus.config.speaker_dim, manifest_path);
        } else {
          fail(ErrorKind::kFormat, manifest_path + ": unknown member role '" + role + "'");
        }
        const auto rel = member_feature_path(g, member);
        if (mj.at("features").get<std::string>() != rel.generic_string()) {
          fail(ErrorKind::kFormat, manifest_path + ": unexpected feature path for " + member.speaker.id);
        }
        member.features = report::read_feature_file(dir / rel);
        if (member.features.dim() != corpus.config.feature_dim) {
          fail(ErrorKind::kFormat, rel.string() + ": feature dimension differs from the manifest");
        }
        g.members.push_back(std::move(member));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kFormat, manifest_path + ": group entry " + std::to_string(i) + ": " + e.what());
    }
    if (g.id != i) fail(ErrorKind::kFormat, manifest_path + ": groups are not listed in id order");
    if (g.members.empty()) fail(ErrorKind::kFormat, manifest_path + ": group " + std::to_string(i) + " has no members");
    g.validate();
    corpus.groups[i] = std::move(g);
  });
  return corpus;
}

std::size_t holdout_begin(std::size_t n, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) fail(ErrorKind::kConfig, "holdout fraction must be in [0, 1)");
  if (fraction == 0.0) return n;
  auto held = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  held = std::max<std::size_t>(held, 1);
  if (held >= n) fail(ErrorKind::kConfig, "holdout fraction leaves no training groups");
  return n - held;
}

}  // namespace avenet::faps
