// Copyright 2026 The fpdesc Authors
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

#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "fpdesc/cli.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using fpdesc::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string toy(const std::string& name) { return (testutil::fixture_dir() / "toy" / name).string(); }

std::string toy_config() { return (testutil::fixture_dir() / "toy_models.cfg").string(); }

}  // namespace

TEST_CASE("stats on a small manifest") {
  testutil::ScratchDir dir("cli_stats");
  std::string manifest;
  for (int i = 0; i < 3; ++i) {
    const std::string p = "plan_0" + std::to_string(i);
    manifest += p + "\t" + toy(p + ".xml") + "\t" + toy(p + ".json") + "\t" + toy(p + ".txt") + "\n";
  }
  testutil::write_file(dir / "m.tsv", manifest);
  const auto r = call({"stats", "--manifest", (dir / "m.tsv").string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("record_count") == 3);
  CHECK(r.out.back() == '\n');
  CHECK(r.out[r.out.size() - 2] != '\n');

  const auto saved = call({"stats", "--manifest", (dir / "m.tsv").string(), "--out", (dir / "o").string()});
  CHECK(saved.code == 0);
  CHECK(testutil::read_file(dir / "o" / "stats.json") == saved.out);
  const auto record = nlohmann::json::parse(testutil::read_file(dir / "o" / "stats.run.json"));
  CHECK(record.at("command") == "stats");
}

TEST_CASE("eval text on identical pairs") {
  testutil::ScratchDir dir("cli_eval_text");
  testutil::write_file(dir / "pairs.jsonl",
                       "{\"id\":\"a\",\"candidate\":\"The bed is big.\",\"reference\":\"The bed is big.\"}\n"
                       "{\"id\":\"b\",\"candidate\":\"A sink.\",\"reference\":\"A sink.\"}\n");
  const auto r = call({"eval", "text", "--pairs", (dir / "pairs.jsonl").string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("summary").at("record_count") == 2);
  CHECK(doc.at("summary").at("bleu1").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("train tbdg twice with the same seed") {
  testutil::ScratchDir dir("cli_determinism");
  std::vector<std::string> out_dirs;
  for (int run_index = 0; run_index < 2; ++run_index) {
    const auto out_dir = (dir / ("run" + std::to_string(run_index))).string();
    out_dirs.push_back(out_dir);
    const auto r = call({"train", "tbdg", "--manifest", toy("manifest.tsv"), "--config", toy_config(), "--seed",
                         "7", "--epochs", "3", "--out", out_dir});
    INFO(r.err);
    REQUIRE(r.code == 0);
  }
  for (const char* name : {"tbdg.bin", "tbdg.manifest", "tbdg.loss.txt", "vocab.txt", "train_tbdg.run.json"}) {
    INFO(name);
    const auto a = testutil::read_file(fs::path(out_dirs[0]) / name);
    CHECK_FALSE(a.empty());
    CHECK(a == testutil::read_file(fs::path(out_dirs[1]) / name));
  }
  const auto record = nlohmann::json::parse(testutil::read_file(fs::path(out_dirs[0]) / "train_tbdg.run.json"));
  CHECK(record.at("seed") == 7);
  CHECK(record.dump().find("time") == std::string::npos);

  const auto other = call({"train", "tbdg", "--manifest", toy("manifest.tsv"), "--config", toy_config(), "--seed",
                           "8", "--epochs", "3", "--out", (dir / "run8").string()});
  REQUIRE(other.code == 0);
  CHECK(testutil::read_file(dir / "run8" / "tbdg.bin") != testutil::read_file(fs::path(out_dirs[0]) / "tbdg.bin"));
}

TEST_CASE("template generation matches the golden output") {
  testutil::ScratchDir dir("cli_template");
  const auto golden = testutil::golden_dir() / "template";
  const auto r = call({"generate", "template", "--input", (golden / "custom.json").string(), "--grammar",
                       (golden / "custom.grammar").string(), "--out", dir.path().string()});
  REQUIRE(r.code == 0);
  CHECK(testutil::read_file(dir / "template.txt") == testutil::read_file(golden / "custom.expected.txt"));
  CHECK(r.out == testutil::read_file(golden / "custom.expected.txt"));
}

TEST_CASE("exit codes") {
  CHECK(call({}).code == fpdesc::cli::kExitUsage);
  CHECK(call({"stats", "--bogus"}).code == fpdesc::cli::kExitUsage);
  CHECK(call({"frobnicate"}).code == fpdesc::cli::kExitUsage);
  CHECK(call({"--help"}).code == fpdesc::cli::kExitOk);
  const auto version = call({"--version"});
  CHECK(version.code == fpdesc::cli::kExitOk);
  CHECK_FALSE(version.out.empty());

  const auto missing = call({"stats", "--manifest", "/nonexistent/manifest.tsv"});
  CHECK(missing.code == fpdesc::cli::kExitData);
  CHECK(missing.err.find("/nonexistent/manifest.tsv") != std::string::npos);

  const auto dup = call({"ingest", "--manifest", (testutil::fixture_dir() / "malformed" / "duplicate_ids.tsv").string()});
  CHECK(dup.code == fpdesc::cli::kExitData);
  CHECK(dup.err.find("fp_001") != std::string::npos);

  testutil::ScratchDir dir("cli_exit");
  testutil::write_file(dir / "bad.cfg", "no equals sign here\n");
  CHECK(call({"train", "skipgram", "--manifest", toy("manifest.tsv"), "--config", (dir / "bad.cfg").string()}).code ==
        fpdesc::cli::kExitData);
  testutil::write_file(dir / "unknown.cfg", "attic.size = 1\n");
  testutil::write_file(dir / "undotted.cfg", "nosection = 1\n");
  CHECK(call({"train", "skipgram", "--manifest", toy("manifest.tsv"), "--config", (dir / "undotted.cfg").string()})
            .code == fpdesc::cli::kExitUsage);
  CHECK(call({"train", "skipgram", "--manifest", toy("manifest.tsv"), "--config", (dir / "unknown.cfg").string()})
            .code == fpdesc::cli::kExitUsage);
  testutil::write_file(dir / "vocab.cfg", "tbdg.vocab_size = 3\n");
  CHECK(call({"train", "tbdg", "--manifest", toy("manifest.tsv"), "--config", (dir / "vocab.cfg").string()}).code ==
        fpdesc::cli::kExitUsage);
  CHECK(call({"eval", "detect", "--manifest", toy("manifest.tsv"), "--detections",
              (testutil::fixture_dir() / "malformed" / "bad_box_detections.jsonl").string()})
            .code == fpdesc::cli::kExitData);
  CHECK(call({"eval", "detect", "--manifest", toy("manifest.tsv"), "--detections",
              (testutil::fixture_dir() / "malformed" / "bad_box_detections.jsonl").string(), "--iou-thresh", "0"})
            .code == fpdesc::cli::kExitUsage);
  CHECK(call({"prep", "--manifest", toy("manifest.tsv")}).code == fpdesc::cli::kExitUsage);
}

TEST_CASE("skip-gram training writes embeddings") {
  testutil::ScratchDir dir("cli_skipgram");
  const auto r = call({"train", "skipgram", "--manifest", toy("manifest.tsv"), "--config", toy_config(), "--epochs",
                       "1", "--out", dir.path().string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "skipgram.manifest"));
  CHECK(fs::exists(dir / "skipgram.bin"));
}
