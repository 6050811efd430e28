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
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("avenet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::vector<std::string>& args, const std::string& env = "") {
  static const fs::path io = scratch("io");
  std::string cmd = env + (env.empty() ? "" : " ") + quote(AVENET_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >" + quote((io / "out").string()) + " 2>" + quote((io / "err").string());
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(io / "out");
  r.err = slurp(io / "err");
  return r;
}

std::vector<std::string> small(std::vector<std::string> args) {
  for (const char* s : {"corpus.groups=30", "corpus.base_speakers=4", "corpus.lws_members=2", "corpus.feature_dim=6",
                        "corpus.content_dim=2", "corpus.speaker_dim=2", "encoder.model_dim=8", "training.batch_size=4",
                        "training.log_interval=5", "training.checkpoint_interval=10", "decoder.hidden_dim=8",
                        "decoder_training.batch_size=4", "probe.steps=50", "eval.pair_count=20",
                        "eval.align_pair_count=20", "eval.conversion_pairs=10", "eval.projection_frames=5",
                        "eval.projection_speakers=3"}) {
    args.push_back("--set");
    args.push_back(s);
  }
  return args;
}

// Generated once per process: a small corpus and a 20-step encoder.
struct Fixture {
  fs::path dir = scratch("fixture");
  fs::path corpus = dir / "corpus";
  fs::path encoder = dir / "enc.avn";
  Fixture() {
    REQUIRE(run(small({"synth", "--out", corpus.string()})).code == 0);
    REQUIRE(run(small({"train", "--corpus", corpus.string(), "--out", encoder.string(), "--steps", "20"})).code == 0);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help, version and usage errors") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  for (const char* sub : {"synth", "train", "eval", "align", "convert", "project"}) {
    CHECK(help.out.find(sub) != std::string::npos);
  }
  CHECK(run({"train", "--help"}).code == 0);
  const auto version = run({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"synth"}).code == 1);  // --out falls back to paths.out, which is empty
  CHECK(run({"synth", "--threads", "0", "--out", "x"}).code == 1);
  CHECK(run({"convert", "--source", "a.fpk"}).code == 1);
}

TEST_CASE("configuration errors map to exit codes") {
  const auto dir = scratch("config");
  auto missing = run({"synth", "--config", (dir / "none.json").string(), "--out", (dir / "c").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("none.json") != std::string::npos);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK(run({"synth", "--config", (dir / "bad.json").string(), "--out", (dir / "c").string()}).code == 1);
  std::ofstream(dir / "unknown.json") << R"({"corpus": {"groupz": 3}})";
  const auto unknown = run({"synth", "--config", (dir / "unknown.json").string(), "--out", (dir / "c").string()});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("groupz") != std::string::npos);
  CHECK(run({"synth", "--set", "corpus.groups", "--out", (dir / "c").string()}).code == 1);

  // paths.* in the config file stand in for flags.
  std::ofstream(dir / "paths.json") << Json{{"paths", {{"corpus", (dir / "from_config").string()}}}}.dump();
  CHECK(run(small({"synth", "--config", (dir / "paths.json").string()})).code == 0);
  CHECK(fs::exists(dir / "from_config" / "manifest.json"));
}

TEST_CASE("synth is independent of the thread count and the environment default") {
  const auto dir = scratch("threads");
  REQUIRE(run(small({"synth", "--out", (dir / "a").string(), "--threads", "1"})).code == 0);
  REQUIRE(run(small({"synth", "--out", (dir / "b").string()}), "AVENET_THREADS=3").code == 0);
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    CHECK(slurp(e.path()) == slurp(dir / "b" / rel));
  }
}

TEST_CASE("train: log, ablation echo, resume, numeric abort") {
  const auto& fx = fixture();
  const auto dir = scratch("train");
  const auto log = dir / "train.log";
  const auto enc = dir / "ablated.avn";
  const auto r = run(small({"train", "--corpus", fx.corpus.string(), "--out", enc.string(), "--log", log.string(),
                            "--steps", "15", "--no-comp-loss", "--no-lws"}));
  REQUIRE(r.code == 0);
  int lines = 0;
  for (char c : slurp(log)) lines += c == '\n';
  CHECK(lines == 3);  // steps 0, 5, 10

  const auto rep = run(small({"eval", "--corpus", fx.corpus.string(), "--encoder", enc.string(), "--no-probes"}));
  REQUIRE(rep.code == 0);
  const auto j = Json::parse(rep.out);
  CHECK(j["config"]["checkpoint"]["training"]["comp_loss_enabled"] == false);
  CHECK(j["config"]["checkpoint"]["training"]["lws_in_training"] == false);
  CHECK(j["config"]["checkpoint"]["training"]["steps"] == 15);
  CHECK_FALSE(j.contains("probe"));

  // Resuming a finished run reproduces it.
  const auto before = slurp(enc);
  REQUIRE(run(small({"train", "--corpus", fx.corpus.string(), "--out", enc.string(), "--steps", "15",
                     "--no-comp-loss", "--no-lws", "--resume"})).code == 0);
  CHECK(slurp(enc) == before);
  // A resume with a different configuration is refused.
  CHECK(run(small({"train", "--corpus", fx.corpus.string(), "--out", enc.string(), "--steps", "15", "--resume"})).code == 1);

  const auto nan = run(small({"train", "--corpus", fx.corpus.string(), "--out", (dir / "nan.avn").string(), "--steps",
                              "20", "--set", "training.learning_rate=1e30"}));
  CHECK(nan.code == 3);
  CHECK(run(small({"train", "--corpus", (dir / "nowhere").string(), "--out", (dir / "x.avn").string()})).code == 2);
}

TEST_CASE("eval, project, align, convert") {
  const auto& fx = fixture();
  const auto dir = scratch("pipeline");

  const auto ev = run(small({"eval", "--corpus", fx.corpus.string(), "--encoder", fx.encoder.string(),
                             "--without-lws", fx.encoder.string(), "--out", (dir / "eval.json").string()}));
  REQUIRE(ev.code == 0);
  CHECK(ev.err.find("reduction_ratio") != std::string::npos);
  const auto report = Json::parse(slurp(dir / "eval.json"));
  CHECK(report["schema_version"] == 1);
  CHECK(report["probe"].contains("avenet"));
  CHECK(report["unseen_speakers"]["with_lws"]["probe_accuracy"] ==
        report["unseen_speakers"]["without_lws"]["probe_accuracy"]);

  const auto pr = run(small({"project", "--corpus", fx.corpus.string(), "--encoder", fx.encoder.string(), "--out",
                             (dir / "proj.csv").string(), "--report", (dir / "proj.json").string()}));
  REQUIRE(pr.code == 0);
  const auto csv = slurp(dir / "proj.csv");
  CHECK(csv.rfind("group_id,frame_index,speaker,representation,x,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 3 * 5);

  const auto al = run(small({"align", "--corpus", fx.corpus.string()}));
  REQUIRE(al.code == 0);
  CHECK(Json::parse(al.out)["alignment"]["e_avg"] == 0.0);
  std::ofstream(dir / "a.tsv") << "x\t0.000000\t0.060000\ny\t0.060000\t0.100000\n";
  std::ofstream(dir / "b.tsv") << "x\t0.000000\t0.050000\ny\t0.050000\t0.100000\n";
  const auto files = run({"align", "-a", (dir / "a.tsv").string(), "-b", (dir / "b.tsv").string()});
  REQUIRE(files.code == 0);
  CHECK(Json::parse(files.out)["alignment"]["e_avg"].get<double>() == doctest::Approx(0.005).epsilon(1e-9));
  std::ofstream(dir / "broken.tsv") << "x\t0.1\n";
  CHECK(run({"align", "-a", (dir / "a.tsv").string(), "-b", (dir / "broken.tsv").string()}).code == 1);

  const auto dec = dir / "dec.vcl";
  REQUIRE(run(small({"train", "--decoder", "--corpus", fx.corpus.string(), "--encoder", fx.encoder.string(), "--out",
                     dec.string(), "--steps", "20"})).code == 0);
  // Source: the first base member of group 0; target: another base speaker.
  const auto manifest = Json::parse(slurp(fx.corpus / "manifest.json"));
  const auto speakers = manifest["speakers"];
  REQUIRE(speakers.size() >= 2);
  const std::string src_id = speakers[0]["id"], tgt_id = speakers[1]["id"];
  const auto group0 = fx.corpus / "groups" / "000000";
  const auto out = dir / "converted.fpk";
  const auto cv = run(small({"convert", "--corpus", fx.corpus.string(), "--encoder", fx.encoder.string(), "--decoder",
                             dec.string(), "--source", (group0 / (src_id + ".fpk")).string(), "--target-speaker",
                             tgt_id, "--reference", (group0 / (tgt_id + ".fpk")).string(), "--out", out.string(),
                             "--report", (dir / "conv.json").string()}));
  REQUIRE(cv.code == 0);
  const auto bytes = slurp(out);
  REQUIRE(bytes.size() > 15);
  CHECK(bytes.substr(0, 4) == "FPK1");
  CHECK(int(bytes[14]) == 3);  // converted provenance
  CHECK(bytes.size() == fs::file_size(group0 / (src_id + ".fpk")));
  CHECK(Json::parse(slurp(dir / "conv.json")).contains("conversion"));
  const auto unknown = run(small({"convert", "--corpus", fx.corpus.string(), "--encoder", fx.encoder.string(),
                                  "--decoder", dec.string(), "--source", (group0 / (src_id + ".fpk")).string(),
                                  "--target-speaker", "nobody", "--out", out.string()}));
  CHECK(unknown.code == 1);
}

}  // TEST_SUITE
