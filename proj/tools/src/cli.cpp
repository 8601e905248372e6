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

#include "fpdesc/cli.hpp"

#include <algorithm>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/version.hpp"

namespace fpdesc::cli {
namespace {

using Handler = std::function<int(const RunConfig&, std::ostream&)>;

enum Flag : unsigned {
  kManifest = 1u << 0,
  kRoot = 1u << 1,
  kOut = 1u << 2,
  kSeed = 1u << 3,
  kConfig = 1u << 4,
  kEpochs = 1u << 5,
  kVocab = 1u << 6,
  kKeywords = 1u << 7,
  kFeatures = 1u << 8,
  kDetections = 1u << 9,
  kPairs = 1u << 10,
  kIouThresh = 1u << 11,
  kModelDir = 1u << 12,
  kClasses = 1u << 13,
  kGrammar = 1u << 14,
  kMinCount = 1u << 15,
  kInput = 1u << 16,
  kEmbeddings = 1u << 17,
};

constexpr unsigned kCorpus = kManifest | kRoot | kClasses | kOut;
constexpr unsigned kTraining = kCorpus | kSeed | kConfig | kEpochs | kVocab | kMinCount;

void add_flags(CLI::App& app, RunConfig& cfg, unsigned flags) {
  if (flags & kManifest) app.add_option("--manifest", cfg.manifest, "Tab-separated corpus manifest");
  if (flags & kRoot) app.add_option("--root", cfg.root, "Directory that relative manifest paths resolve against");
  if (flags & kOut) app.add_option("--out", cfg.out, "Output directory");
  if (flags & kSeed) app.add_option("--seed", cfg.seed, "Random seed");
  if (flags & kConfig) app.add_option("--config", cfg.config_file, "Config file of 'section.key = value' lines");
  if (flags & kEpochs) app.add_option("--epochs", cfg.epochs, "Training epochs (overrides the config file)");
  if (flags & kVocab) app.add_option("--vocab", cfg.vocab, "Vocabulary file");
  if (flags & kKeywords) app.add_option("--keywords", cfg.keywords, "Room/object keyword list");
  if (flags & kFeatures) app.add_option("--features-file", cfg.features_file, "Precomputed region features");
  if (flags & kDetections) app.add_option("--detections", cfg.detections, "Detections, one JSON object per line");
  if (flags & kPairs) app.add_option("--pairs", cfg.pairs, "Candidate/reference pairs, one JSON object per line");
  if (flags & kIouThresh) app.add_option("--iou-thresh", cfg.iou_thresh, "IoU threshold for a true positive");
  if (flags & kModelDir) app.add_option("--model-dir", cfg.model_dir, "Directory holding trained checkpoints");
  if (flags & kClasses) app.add_option("--classes", cfg.classes, "Decor class list, one name per line");
  if (flags & kGrammar) app.add_option("--grammar", cfg.grammar, "Template grammar file");
  if (flags & kMinCount) app.add_option("--min-count", cfg.min_count, "Minimum token count for the vocabulary");
  if (flags & kInput) app.add_option("--input", cfg.input, "Template input JSON");
  if (flags & kEmbeddings) app.add_option("--embeddings", cfg.embeddings, "Skip-gram embedding prefix");
}

struct Command {
  CLI::App* app;
  std::string name;
  Handler handler;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fpdesc: floor plan description toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<Command> commands;

  auto leaf = [&](CLI::App& parent, const std::string& name, const std::string& full, const std::string& help,
                  unsigned flags, Handler handler) {
    CLI::App* sub = parent.add_subcommand(name, help);
    add_flags(*sub, cfg, flags);
    commands.push_back({sub, full, std::move(handler)});
  };

  leaf(app, "ingest", "ingest", "Validate the corpus and cache it as JSON", kCorpus, cmd_ingest);
  leaf(app, "stats", "stats", "Corpus statistics", kCorpus | kMinCount, cmd_stats);
  leaf(app, "prep", "prep", "Tokenize, build the vocabulary, keyword-filter and fuse captions",
       kCorpus | kVocab | kKeywords | kMinCount, cmd_prep);

  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->require_subcommand(1);
  leaf(*train, "dsic", "train dsic", "Hierarchical paragraph model", kTraining | kFeatures, cmd_train_dsic);
  leaf(*train, "captioner", "train captioner", "Region captioner", kTraining | kFeatures, cmd_train_captioner);
  leaf(*train, "tbdg", "train tbdg", "Caption-to-paragraph model", kTraining | kKeywords | kEmbeddings,
       cmd_train_tbdg);
  leaf(*train, "skipgram", "train skipgram", "Word embeddings", kTraining, cmd_train_skipgram);

  CLI::App* generate = app.add_subcommand("generate", "Generate descriptions");
  generate->require_subcommand(1);
  leaf(*generate, "dsic", "generate dsic", "Paragraphs from the hierarchical model",
       kCorpus | kModelDir | kVocab | kFeatures, cmd_generate_dsic);
  leaf(*generate, "tbdg", "generate tbdg", "Paragraphs through captioner and caption-to-paragraph model",
       kCorpus | kModelDir | kVocab | kFeatures, cmd_generate_tbdg);
  leaf(*generate, "template", "generate template", "Template-filled descriptions",
       kCorpus | kGrammar | kInput, cmd_generate_template);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate outputs");
  eval->require_subcommand(1);
  leaf(*eval, "text", "eval text", "BLEU, ROUGE and METEOR over text pairs", kPairs | kOut, cmd_eval_text);
  leaf(*eval, "detect", "eval detect", "Per-class AP and mAP of symbol detections",
       kCorpus | kDetections | kIouThresh, cmd_eval_detect);

  leaf(app, "gradcheck", "gradcheck", "Finite-difference check of every trainable path", kSeed | kOut,
       cmd_gradcheck);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* failing = &app;
    for (const auto& c : commands) {
      if (c.app->parsed()) failing = c.app;
    }
    err << failing->help();
    return kExitUsage;
  }

  auto chosen = std::find_if(commands.begin(), commands.end(), [](const Command& c) { return c.app->parsed(); });
  if (chosen == commands.end()) {
    err << app.help();
    return kExitUsage;
  }
  cfg.command = chosen->name;
  try {
    cfg.validate();
    return chosen->handler(cfg, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fpdesc::cli
