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

#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fpdesc/captioner.hpp"
#include "fpdesc/corpus.hpp"
#include "fpdesc/detect_eval.hpp"
#include "fpdesc/dsic.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/features.hpp"
#include "fpdesc/gradient_suite.hpp"
#include "fpdesc/log.hpp"
#include "fpdesc/metrics.hpp"
#include "fpdesc/nn/checkpoint.hpp"
#include "fpdesc/pipeline.hpp"
#include "fpdesc/skipgram.hpp"
#include "fpdesc/tbdg.hpp"
#include "fpdesc/template_desc.hpp"
#include "fpdesc/textprep.hpp"

namespace fpdesc::cli {
namespace {

using nlohmann::ordered_json;

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidArgument(std::string(flag) + " is required");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DecorClassList class_list(const RunConfig& cfg) {
  return cfg.classes.empty() ? DecorClassList::defaults() : DecorClassList::load(cfg.classes);
}

std::vector<FloorPlanRecord> load_records(const RunConfig& cfg) {
  require(cfg.manifest, "--manifest");
  return load_corpus(cfg.corpus_root(), cfg.manifest, class_list(cfg));
}

KeywordSet keyword_set(const RunConfig& cfg) {
  return cfg.keywords.empty() ? KeywordSet::defaults() : KeywordSet::load(cfg.keywords);
}

/// Paragraph sentences and region phrases, tokenized.
std::vector<Tokens> corpus_token_lists(const std::vector<FloorPlanRecord>& records) {
  std::vector<Tokens> lists;
  for (const auto& r : records) {
    lists.push_back(tokenize(r.paragraph));
    for (const auto& region : r.regions) lists.push_back(tokenize(region.phrase));
  }
  return lists;
}

Vocabulary resolve_vocab(const RunConfig& cfg, const std::vector<FloorPlanRecord>& records) {
  if (!cfg.vocab.empty()) return Vocabulary::load(cfg.vocab);
  return Vocabulary::build(corpus_token_lists(records), cfg.min_count);
}

Vocabulary model_vocab(const RunConfig& cfg) {
  if (!cfg.vocab.empty()) return Vocabulary::load(cfg.vocab);
  return Vocabulary::load(fs::path(cfg.model_dir) / "vocab.txt");
}

std::optional<FeatureMap> feature_map(const RunConfig& cfg) {
  if (cfg.features_file.empty()) return std::nullopt;
  return read_features_file(cfg.features_file);
}

std::vector<RegionFeature> record_features(const FloorPlanRecord& record, const FeatureMap* map,
                                           std::size_t dim) {
  if (map) {
    auto rows = features_for_record(*map, record);
    for (const auto& r : rows) {
      if (r.values.size() != dim) {
        throw SchemaError("features for record " + record.id + " have " + std::to_string(r.values.size()) +
                          " values per region, the model expects " + std::to_string(dim));
      }
    }
    return rows;
  }
  std::vector<BBox> boxes;
  for (const auto& region : record.regions) boxes.push_back(region.bbox);
  return extract_region_features(record, boxes, dim);
}

template <typename TrainConfigT>
TrainConfigT train_config(const RunConfig& cfg, TrainConfigT train) {
  static const std::vector<std::string> kKeys = {"epochs", "batch_size", "learning_rate", "clip_norm",
                                                 "beta1", "beta2", "epsilon"};
  const ConfigMap values = cfg.train_section();
  for (const auto& [k, v] : values) {
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) {
      throw InvalidArgument("unknown train config key '" + k + "'");
    }
  }
  auto size_of = [&](const std::string& key, std::size_t fallback) {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::size_t parsed = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), parsed);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
      throw InvalidArgument("train." + key + " must be a non-negative integer, got '" + it->second + "'");
    }
    return parsed;
  };
  auto real_of = [&](const std::string& key, double fallback) {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    double parsed = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), parsed);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
      throw InvalidArgument("train." + key + " must be a number, got '" + it->second + "'");
    }
    return parsed;
  };
  train.epochs = size_of("epochs", train.epochs);
  train.batch_size = size_of("batch_size", train.batch_size);
  train.adam.learning_rate = real_of("learning_rate", train.adam.learning_rate);
  train.adam.beta1 = real_of("beta1", train.adam.beta1);
  train.adam.beta2 = real_of("beta2", train.adam.beta2);
  train.adam.epsilon = real_of("epsilon", train.adam.epsilon);
  train.clip_norm = real_of("clip_norm", train.clip_norm);
  train.seed = cfg.seed;
  if (train.batch_size == 0) throw InvalidArgument("train.batch_size must be positive");
  return train;
}

template <typename TrainConfigT>
ConfigMap train_map(const TrainConfigT& train) {
  return {{"epochs", std::to_string(train.epochs)},
          {"batch_size", std::to_string(train.batch_size)},
          {"learning_rate", format_number(train.adam.learning_rate)},
          {"beta1", format_number(train.adam.beta1)},
          {"beta2", format_number(train.adam.beta2)},
          {"epsilon", format_number(train.adam.epsilon)},
          {"clip_norm", format_number(train.clip_norm)}};
}

SkipgramConfig skipgram_config(const RunConfig& cfg) {
  SkipgramConfig c;
  const ConfigMap& values = cfg.config.section("skipgram");
  for (const auto& [k, v] : values) {
    if (k != "dim" && k != "window" && k != "negatives" && k != "epochs" && k != "learning_rate") {
      throw InvalidArgument("unknown skipgram config key '" + k + "'");
    }
  }
  auto get = [&](const std::string& key) -> std::optional<double> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    double parsed = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), parsed);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size() || parsed < 0) {
      throw InvalidArgument("skipgram." + key + " must be a non-negative number, got '" + it->second + "'");
    }
    return parsed;
  };
  if (auto v = get("dim")) c.dim = static_cast<std::size_t>(*v);
  if (auto v = get("window")) c.window = static_cast<std::size_t>(*v);
  if (auto v = get("negatives")) c.negatives = static_cast<std::size_t>(*v);
  if (auto v = get("epochs")) c.epochs = static_cast<std::size_t>(*v);
  if (auto v = get("learning_rate")) c.learning_rate = *v;
  if (cfg.epochs) c.epochs = *cfg.epochs;
  c.seed = cfg.seed;
  return c;
}

ConfigMap skipgram_map(const SkipgramConfig& c) {
  return {{"dim", std::to_string(c.dim)},           {"window", std::to_string(c.window)},
          {"negatives", std::to_string(c.negatives)}, {"epochs", std::to_string(c.epochs)},
          {"learning_rate", format_number(c.learning_rate)}};
}

/// Starts from the config file section and pins vocab_size to the vocabulary in use.
ConfigMap model_section(const RunConfig& cfg, const std::string& name, const Vocabulary& vocab) {
  ConfigMap values = cfg.config.section(name);
  if (auto it = values.find("vocab_size"); it != values.end() && it->second != std::to_string(vocab.size())) {
    throw InvalidArgument(name + ".vocab_size is " + it->second + " but the vocabulary holds " +
                          std::to_string(vocab.size()) + " tokens");
  }
  values["vocab_size"] = std::to_string(vocab.size());
  return values;
}

std::size_t optimizer_steps(std::size_t epochs, std::size_t samples, std::size_t batch) {
  return epochs * ((samples + batch - 1) / batch);
}

/// Writes the report to stdout and, with --out, to <out>/<name>.
void emit(const RunConfig& cfg, RunRecord& record, std::ostream& out, const std::string& name,
          std::string text) {
  while (!text.empty() && text.back() == '\n') text.pop_back();
  text += '\n';
  out << text;
  if (cfg.out.empty()) return;
  const fs::path path = fs::path(cfg.out) / name;
  write_text_file(path, text);
  record.add_output(path);
}

ordered_json train_summary(const std::string& model, std::size_t samples, const std::vector<double>& losses,
                           const fs::path& prefix) {
  ordered_json s;
  s["model"] = model;
  s["samples"] = samples;
  s["epochs"] = losses.size();
  if (!losses.empty()) {
    s["initial_loss"] = losses.front();
    s["final_loss"] = losses.back();
  }
  s["checkpoint"] = prefix.filename().string();
  return s;
}

void save_model(const RunConfig& cfg, RunRecord& record, const std::string& model, const ConfigMap& config,
                std::size_t steps, std::span<const nn::NamedTensor> params, const std::vector<double>& losses,
                const Vocabulary& vocab) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  const fs::path prefix = dir / model;
  nn::CheckpointMeta meta{model, cfg.seed, steps, config};
  nn::save_checkpoint(prefix, meta, params);
  record.add_output(nn::manifest_path(prefix));
  record.add_output(nn::blob_path(prefix));
  const fs::path loss_path = dir / (model + ".loss.txt");
  write_loss_history(loss_path, losses);
  record.add_output(loss_path);
  vocab.save(dir / "vocab.txt");
  record.add_output(dir / "vocab.txt");
}

void add_common_inputs(RunRecord& record, const RunConfig& cfg) {
  record.add_input("manifest", cfg.manifest);
  record.add_input("root", cfg.root);
  record.add_input("config", cfg.config_file);
  record.add_input("vocab", cfg.vocab);
  record.add_input("keywords", cfg.keywords);
  record.add_input("features_file", cfg.features_file);
  record.add_input("classes", cfg.classes);
  record.add_input("model_dir", cfg.model_dir);
  record.add_input("embeddings", cfg.embeddings);
  record.add_input("grammar", cfg.grammar);
  record.add_input("input", cfg.input);
  record.add_input("pairs", cfg.pairs);
  record.add_input("detections", cfg.detections);
}

std::string paragraph_text(const dsic::Paragraph& sentences, const Vocabulary& vocab) {
  std::string text;
  for (const auto& s : sentences) {
    const Tokens words = decode(s, vocab);
    if (words.empty()) continue;
    if (!text.empty()) text += ' ';
    text += detokenize(words);
  }
  return text;
}

}  // namespace

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  std::size_t symbols = 0, regions = 0, images = 0;
  for (const auto& r : records) {
    symbols += r.symbols.size();
    regions += r.regions.size();
    images += r.image_path ? 1 : 0;
  }
  if (!cfg.out.empty()) {
    const fs::path cache = fs::path(cfg.out) / "corpus.json";
    write_text_file(cache, corpus_to_json(records) + "\n");
    record.add_output(cache);
  }
  ordered_json summary;
  summary["record_count"] = records.size();
  summary["symbol_count"] = symbols;
  summary["region_count"] = regions;
  summary["records_with_images"] = images;
  emit(cfg, record, out, "ingest.json", summary.dump(2) + "\n");
  record.write();
  return 0;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  record.set_config("stats", {{"min_count", std::to_string(cfg.min_count)}});
  const auto records = load_records(cfg);
  emit(cfg, record, out, "stats.json", corpus_stats_to_json(corpus_stats(records, cfg.min_count)) + "\n");
  record.write();
  return 0;
}

int cmd_prep(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out, "--out");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  record.set_config("prep", {{"min_count", std::to_string(cfg.min_count)},
                             {"fused_captions", std::to_string(tbdg::kFusedCaptions)}});
  const auto records = load_records(cfg);
  const Vocabulary vocab = resolve_vocab(cfg, records);
  const KeywordSet keywords = keyword_set(cfg);

  std::string lines;
  std::vector<Tokens> fused_all;
  for (const auto& r : records) {
    const auto captions = tbdg::ground_truth_captions(r);
    Tokens fused = fuse_captions(captions, tbdg::kFusedCaptions);
    const std::string target = keyword_filter(r.paragraph, keywords);
    const Tokens target_tokens = tokenize(target);
    ordered_json line;
    line["id"] = r.id;
    line["fused"] = detokenize(fused);
    line["target"] = target;
    line["fused_tokens"] = fused.size();
    line["target_tokens"] = target_tokens.size();
    lines += line.dump() + "\n";
    fused_all.push_back(std::move(fused));
  }
  const fs::path dir(cfg.out);
  write_text_file(dir / "prep.jsonl", lines);
  record.add_output(dir / "prep.jsonl");
  vocab.save(dir / "vocab.txt");
  record.add_output(dir / "vocab.txt");

  ordered_json summary;
  summary["record_count"] = records.size();
  summary["vocab_size"] = vocab.size();
  summary["min_fused_length"] = fused_all.empty() ? 0 : min_sequence_length(fused_all);
  emit(cfg, record, out, "prep.json", summary.dump(2) + "\n");
  record.write();
  return 0;
}

int cmd_train_dsic(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out, "--out");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = resolve_vocab(cfg, records);
  const auto model = dsic::HierarchicalConfig::from_map(model_section(cfg, "dsic", vocab));
  model.validate();
  const auto train = train_config(cfg, dsic::TrainConfig{});
  record.set_config("dsic", model.to_map());
  record.set_config("train", train_map(train));

  const auto features = feature_map(cfg);
  std::vector<dsic::Sample> samples;
  for (const auto& r : records) {
    auto target = dsic::prepare_paragraph(r.paragraph, vocab, model);
    if (target.empty()) {
      log::warn("record " + r.id + " has an empty paragraph; skipped");
      continue;
    }
    samples.push_back({record_features(r, features ? &*features : nullptr, model.feature_dim), std::move(target)});
  }
  if (samples.empty()) throw DataError("no trainable records");

  auto result = dsic::dsic_train(samples, model, train);
  save_model(cfg, record, "dsic", model.to_map(), optimizer_steps(train.epochs, samples.size(), train.batch_size),
             result.params.parameters(), result.loss_history, vocab);
  out << train_summary("dsic", samples.size(), result.loss_history, fs::path(cfg.out) / "dsic").dump(2) << "\n";
  record.write();
  return 0;
}

int cmd_train_captioner(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out, "--out");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = resolve_vocab(cfg, records);
  const auto model = tbdg::CaptionerConfig::from_map(model_section(cfg, "captioner", vocab));
  model.validate();
  const auto train = train_config(cfg, tbdg::TrainConfig{});
  record.set_config("captioner", model.to_map());
  record.set_config("train", train_map(train));

  const auto features = feature_map(cfg);
  std::vector<tbdg::CaptionPair> pairs;
  for (const auto& r : records) {
    if (r.regions.empty()) continue;
    const auto regions = record_features(r, features ? &*features : nullptr, model.feature_dim);
    for (auto& p : tbdg::caption_pairs(r, regions, vocab, model.max_len)) {
      if (!p.caption.empty()) pairs.push_back(std::move(p));
    }
  }
  if (pairs.empty()) throw DataError("no region captions to train on");

  auto result = tbdg::captioner_train(pairs, model, train);
  save_model(cfg, record, "captioner", model.to_map(),
             optimizer_steps(train.epochs, pairs.size(), train.batch_size), result.params.parameters(),
             result.loss_history, vocab);
  out << train_summary("captioner", pairs.size(), result.loss_history, fs::path(cfg.out) / "captioner").dump(2)
      << "\n";
  record.write();
  return 0;
}

int cmd_train_tbdg(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out, "--out");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = resolve_vocab(cfg, records);
  const auto model = tbdg::TbdgConfig::from_map(model_section(cfg, "tbdg", vocab));
  model.validate();
  const auto train = train_config(cfg, tbdg::TrainConfig{});
  record.set_config("tbdg", model.to_map());
  record.set_config("train", train_map(train));
  const KeywordSet keywords = keyword_set(cfg);

  std::vector<tbdg::TbdgSample> samples;
  for (const auto& r : records) {
    if (r.regions.empty()) {
      log::warn("record " + r.id + " has no region captions; skipped");
      continue;
    }
    const Tokens fused = fuse_captions(tbdg::ground_truth_captions(r), tbdg::kFusedCaptions);
    auto sample = tbdg::make_tbdg_sample(fused, r.paragraph, vocab, keywords, model);
    if (non_pad_length(sample.target) < 3) {
      log::warn("record " + r.id + " has no keyword sentence; skipped");
      continue;
    }
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) throw DataError("no trainable records");

  std::optional<EmbeddingTable> embeddings;
  if (!cfg.embeddings.empty()) embeddings = load_embeddings(cfg.embeddings);
  auto result = tbdg::tbdg_train(samples, model, train, embeddings ? &*embeddings : nullptr);
  save_model(cfg, record, "tbdg", model.to_map(), optimizer_steps(train.epochs, samples.size(), train.batch_size),
             result.params.parameters(), result.loss_history, vocab);
  out << train_summary("tbdg", samples.size(), result.loss_history, fs::path(cfg.out) / "tbdg").dump(2) << "\n";
  record.write();
  return 0;
}

int cmd_train_skipgram(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out, "--out");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = resolve_vocab(cfg, records);
  const SkipgramConfig config = skipgram_config(cfg);
  record.set_config("skipgram", skipgram_map(config));

  std::vector<std::vector<TokenId>> corpus;
  for (const auto& tokens : corpus_token_lists(records)) {
    if (tokens.empty()) continue;
    corpus.push_back(encode(tokens, vocab, tokens.size(), false).ids);
  }
  const auto result = train_skipgram(corpus, vocab.size(), config);
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  save_embeddings(dir / "skipgram", result.table);
  record.add_output(dir / "skipgram.manifest");
  record.add_output(dir / "skipgram.bin");
  write_loss_history(dir / "skipgram.loss.txt", result.loss_history);
  record.add_output(dir / "skipgram.loss.txt");
  vocab.save(dir / "vocab.txt");
  record.add_output(dir / "vocab.txt");
  out << train_summary("skipgram", corpus.size(), result.loss_history, dir / "skipgram").dump(2) << "\n";
  record.write();
  return 0;
}

int cmd_generate_dsic(const RunConfig& cfg, std::ostream& out) {
  require(cfg.model_dir, "--model-dir");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = model_vocab(cfg);
  const fs::path prefix = fs::path(cfg.model_dir) / "dsic";
  const auto manifest = nn::read_checkpoint_manifest(prefix);
  const auto model = dsic::HierarchicalConfig::from_map(manifest.meta.config);
  if (model.vocab_size != vocab.size()) throw SchemaError("dsic checkpoint vocabulary does not match vocab.txt");
  auto params = dsic::DsicParams::init(model, 0);
  nn::load_checkpoint(prefix, "dsic", params.parameters());
  record.set_config("dsic", model.to_map());

  const auto features = feature_map(cfg);
  std::string lines;
  for (const auto& r : records) {
    const auto regions = record_features(r, features ? &*features : nullptr, model.feature_dim);
    if (regions.empty()) throw DataError("record " + r.id + " has no regions");
    const auto gen = dsic::dsic_generate(params, regions);
    ordered_json line;
    line["id"] = r.id;
    line["paragraph"] = paragraph_text(gen.sentences, vocab);
    line["sentences"] = gen.sentences.size();
    line["continue_probs"] = gen.continue_probs;
    lines += line.dump() + "\n";
  }
  emit(cfg, record, out, "dsic.generated.jsonl", lines);
  record.write();
  return 0;
}

int cmd_generate_tbdg(const RunConfig& cfg, std::ostream& out) {
  require(cfg.model_dir, "--model-dir");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const auto records = load_records(cfg);
  const Vocabulary vocab = model_vocab(cfg);

  const fs::path cap_prefix = fs::path(cfg.model_dir) / "captioner";
  const auto cap_config = tbdg::CaptionerConfig::from_map(nn::read_checkpoint_manifest(cap_prefix).meta.config);
  auto captioner = tbdg::CaptionerParams::init(cap_config, 0);
  nn::load_checkpoint(cap_prefix, "captioner", captioner.parameters());

  const fs::path tbdg_prefix = fs::path(cfg.model_dir) / "tbdg";
  const auto tbdg_config = tbdg::TbdgConfig::from_map(nn::read_checkpoint_manifest(tbdg_prefix).meta.config);
  auto model = tbdg::TbdgParams::init(tbdg_config, 0);
  nn::load_checkpoint(tbdg_prefix, "tbdg", model.parameters());
  if (cap_config.vocab_size != vocab.size() || tbdg_config.vocab_size != vocab.size()) {
    throw SchemaError("captioner and tbdg checkpoints must share the vocabulary in vocab.txt");
  }
  record.set_config("captioner", cap_config.to_map());
  record.set_config("tbdg", tbdg_config.to_map());

  const auto features = feature_map(cfg);
  std::string lines;
  for (const auto& r : records) {
    const auto result = tbdg::tbdg_pipeline(r, features ? &*features : nullptr, captioner, model, vocab);
    ordered_json line;
    line["id"] = r.id;
    line["paragraph"] = result.paragraph;
    line["captions"] = result.captions;
    line["attention_shape"] = {result.attention_rows, result.attention_cols};
    lines += line.dump() + "\n";
  }
  emit(cfg, record, out, "tbdg.generated.jsonl", lines);
  record.write();
  return 0;
}

int cmd_generate_template(const RunConfig& cfg, std::ostream& out) {
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  const tmpl::TemplateGrammar grammar =
      cfg.grammar.empty() ? tmpl::TemplateGrammar::defaults() : tmpl::TemplateGrammar::load(cfg.grammar);
  if (!cfg.input.empty()) {
    const auto input = tmpl::parse_template_input(read_text(cfg.input), class_list(cfg));
    emit(cfg, record, out, "template.txt", tmpl::generate_template_description(input, grammar) + "\n");
    record.write();
    return 0;
  }
  if (cfg.manifest.empty()) throw InvalidArgument("either --input or --manifest is required");
  std::string lines;
  for (const auto& r : load_records(cfg)) {
    ordered_json line;
    line["id"] = r.id;
    line["paragraph"] = tmpl::generate_template_description(tmpl::template_input_from_record(r), grammar);
    lines += line.dump() + "\n";
  }
  emit(cfg, record, out, "template.jsonl", lines);
  record.write();
  return 0;
}

int cmd_eval_text(const RunConfig& cfg, std::ostream& out) {
  require(cfg.pairs, "--pairs");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  metrics::EvalConfig config;
  record.set_config("metrics", {{"max_order", std::to_string(config.max_order)},
                                {"meteor_node_budget", std::to_string(config.meteor_node_budget)}});
  const auto report = metrics::evaluate_corpus(metrics::read_pairs(cfg.pairs), config);
  emit(cfg, record, out, "eval_text.json", metrics::to_json(report) + "\n");
  record.write();
  return 0;
}

int cmd_eval_detect(const RunConfig& cfg, std::ostream& out) {
  require(cfg.detections, "--detections");
  RunRecord record(cfg);
  add_common_inputs(record, cfg);
  record.set_config("detect", {{"iou_thresh", format_number(cfg.iou_thresh)}});
  if (!(cfg.iou_thresh > 0 && cfg.iou_thresh <= 1)) throw InvalidArgument("--iou-thresh must lie in (0, 1]");
  const auto records = load_records(cfg);
  std::map<std::string, std::vector<SymbolAnnotation>> gts;
  for (const auto& r : records) gts[r.id] = r.symbols;
  const auto dets = detect::read_detections(cfg.detections);
  for (const auto& d : dets) {
    if (!gts.count(d.image_id)) throw SchemaError("detection for unknown image id " + d.image_id);
  }
  const DecorClassList classes = class_list(cfg);
  const auto result = detect::evaluate_detections(dets, gts, cfg.iou_thresh, classes.names());
  emit(cfg, record, out, "eval_detect.json", detect::to_json(result) + "\n");
  record.write();
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out) {
  RunRecord record(cfg);
  record.set_config("gradcheck", {{"tolerance", "0.001"}, {"step", "0.01"}});
  const auto cases = run_gradient_suite(cfg.seed);
  emit(cfg, record, out, "gradcheck.json", gradient_suite_json(cases) + "\n");
  record.write();
  for (const auto& c : cases) {
    if (!c.report.passed()) return 3;
  }
  return 0;
}

}  // namespace fpdesc::cli
