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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpdesc/captioner.hpp"
#include "fpdesc/corpus.hpp"
#include "fpdesc/features.hpp"
#include "fpdesc/tbdg.hpp"
#include "fpdesc/textprep.hpp"

namespace fpdesc::tbdg {

inline constexpr std::size_t kFusedCaptions = 5;

/// Region phrases as scored captions, scored by box area. Used in place of generated
/// captions when no captioner is available.
std::vector<ScoredCaption> ground_truth_captions(const FloorPlanRecord& record);

/// W_e from fused caption tokens and T_e from the keyword-filtered paragraph.
TbdgSample make_tbdg_sample(const Tokens& fused, std::string_view paragraph, const Vocabulary& vocab,
                            const KeywordSet& keywords, const TbdgConfig& config);

/// One (feature, caption ids) pair per region that has a feature row; captions are truncated
/// to max_len tokens.
std::vector<CaptionPair> caption_pairs(const FloorPlanRecord& record,
                                       std::span<const RegionFeature> features,
                                       const Vocabulary& vocab, std::size_t max_len);

struct PipelineResult {
  std::string paragraph;
  std::vector<std::string> captions;  // fused captions, best first
  std::vector<TokenId> tokens;
  std::size_t attention_rows = 0;
  std::size_t attention_cols = 0;
};

/// Region features -> captions -> fuse top 5 -> encode to input_len -> decode -> detokenize.
/// Stage failures are rethrown with the stage name; a record without regions fails with
/// "no regions". When features is null they are extracted from the record's image.
PipelineResult tbdg_pipeline(const FloorPlanRecord& record, const FeatureMap* features,
                             const CaptionerParams& captioner, const TbdgParams& tbdg,
                             const Vocabulary& vocab);

}  // namespace fpdesc::tbdg
