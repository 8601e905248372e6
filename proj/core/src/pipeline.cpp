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

#include "fpdesc/pipeline.hpp"

#include <utility>

#include "fpdesc/error.hpp"

namespace fpdesc::tbdg {
namespace {

template <typename F>
auto run_stage(const char* stage, const std::string& record_id, F&& body) {
  const std::string prefix = std::string("tbdg pipeline stage '") + stage + "' for record " + record_id + ": ";
  try {
    return body();
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

std::vector<TokenId> to_ids(const Tokens& tokens, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

}  // namespace

std::vector<ScoredCaption> ground_truth_captions(const FloorPlanRecord& record) {
  std::vector<ScoredCaption> out;
  out.reserve(record.regions.size());
  for (const auto& r : record.regions) out.push_back(ScoredCaption{tokenize(r.phrase), r.bbox.area()});
  return out;
}

TbdgSample make_tbdg_sample(const Tokens& fused, std::string_view paragraph, const Vocabulary& vocab,
                            const KeywordSet& keywords, const TbdgConfig& config) {
  TbdgSample s;
  s.input = encode(fused, vocab, config.input_len, false).ids;
  s.target = encode(tokenize(keyword_filter(paragraph, keywords)), vocab, config.output_len, true).ids;
  return s;
}

std::vector<CaptionPair> caption_pairs(const FloorPlanRecord& record,
                                       std::span<const RegionFeature> features,
                                       const Vocabulary& vocab, std::size_t max_len) {
  std::vector<CaptionPair> out;
  const std::size_t n = std::min(record.regions.size(), features.size());
  for (std::size_t i = 0; i < n; ++i) {
    Tokens tokens = tokenize(record.regions[i].phrase);
    if (tokens.size() > max_len) tokens.resize(max_len);
    out.push_back(CaptionPair{features[i].values, to_ids(tokens, vocab)});
  }
  return out;
}

PipelineResult tbdg_pipeline(const FloorPlanRecord& record, const FeatureMap* features,
                             const CaptionerParams& captioner, const TbdgParams& tbdg,
                             const Vocabulary& vocab) {
  const auto regions = run_stage("features", record.id, [&] {
    if (record.regions.empty()) throw DataError("no regions");
    if (features) return features_for_record(*features, record);
    std::vector<BBox> boxes;
    for (const auto& r : record.regions) boxes.push_back(r.bbox);
    return extract_region_features(record, boxes, captioner.config.feature_dim);
  });

  const auto captions = run_stage("captions", record.id, [&] {
    std::vector<ScoredCaption> out;
    for (const auto& f : regions) {
      Caption c = captioner_generate(captioner, f.values);
      out.push_back(ScoredCaption{decode(c.tokens, vocab), c.score});
    }
    return out;
  });

  PipelineResult result;
  const Tokens fused = run_stage("fuse", record.id, [&] {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < captions.size(); ++i) ranked.emplace_back(-captions[i].score, i);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < ranked.size() && i < kFusedCaptions; ++i) {
      result.captions.push_back(detokenize(captions[ranked[i].second].tokens));
    }
    return fuse_captions(captions, kFusedCaptions);
  });

  const auto input = run_stage("encode", record.id, [&] {
    auto ids = encode(fused, vocab, tbdg.config.input_len, false).ids;
    if (non_pad_length(ids) == 0) throw DataError("fused captions are empty");
    return ids;
  });

  const TbdgOutput out = run_stage("generate", record.id, [&] { return tbdg_generate(tbdg, input); });
  result.tokens = out.tokens;
  result.attention_rows = out.attention.size();
  result.attention_cols = out.attention.empty() ? 0 : out.attention.front().size();
  result.paragraph = run_stage("detokenize", record.id, [&] { return detokenize(decode(out.tokens, vocab)); });
  return result;
}

}  // namespace fpdesc::tbdg
