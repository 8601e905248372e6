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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpdesc/features.hpp"
#include "fpdesc/nn/adam.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"
#include "fpdesc/textprep.hpp"

namespace fpdesc::dsic {

inline constexpr std::size_t kStop = 0;
inline constexpr std::size_t kContinue = 1;

struct HierarchicalConfig {
  std::size_t vocab_size = 0;
  std::size_t feature_dim = 64;
  std::size_t pooled_dim = 1024;
  std::size_t sentence_hidden = 512;
  std::size_t word_hidden = 512;
  std::size_t fc_width = 1024;
  std::size_t topic_dim = 512;
  std::size_t embed_dim = 512;
  std::size_t sent_max = 5;
  std::size_t word_max = 60;
  std::size_t top_regions = 5;
  double threshold = 0.5;
  double beta_sent = 5.0;
  double beta_word = 1.0;

  /// Throws InvalidArgument naming the first violated bound.
  void validate() const;
  std::map<std::string, std::string> to_map() const;
  /// Unknown keys are rejected; missing keys keep their defaults.
  static HierarchicalConfig from_map(const std::map<std::string, std::string>& values);
};

struct PoolingParams {
  nn::Tensor M;     // pooled_dim x feature_dim
  nn::Tensor bias;  // pooled_dim
};

struct DsicParams {
  HierarchicalConfig config;
  PoolingParams pool;
  nn::LstmParams sentence;
  nn::Tensor stop_W, stop_b;  // 2 x sentence_hidden, 2
  nn::Tensor fc1_W, fc1_b;    // fc_width x sentence_hidden
  nn::Tensor fc2_W, fc2_b;    // topic_dim x fc_width
  nn::Tensor embed;           // vocab x embed_dim
  nn::LstmParams word1;       // input topic_dim + embed_dim
  nn::LstmParams word2;
  nn::Tensor out_W, out_b;    // vocab x word_hidden

  static DsicParams init(const HierarchicalConfig& config, std::uint64_t seed);
  std::vector<nn::NamedTensor> parameters();
};

/// Target paragraph: sentences of token ids, without BOS/EOS.
using Paragraph = std::vector<std::vector<TokenId>>;

/// P_d = max_i (M R_i + bias)_d.
std::vector<float> pool_regions(const PoolingParams& params, std::span<const RegionFeature> regions);
nn::Var pool_regions(nn::Tape& tape, nn::Param M, nn::Param bias, std::span<const nn::Var> regions);

/// Splits on sentence terminators, tokenizes, keeps the first sent_max non-empty sentences
/// and truncates each to word_max-1 tokens so EOS still fits.
Paragraph prepare_paragraph(std::string_view text, const Vocabulary& vocab,
                            const HierarchicalConfig& config);

/// Throws InvalidArgument when K is empty, holds more than sent_max sentences, or a sentence
/// has more than word_max-1 tokens (it would not fit together with EOS).
void validate_target(const Paragraph& K, const HierarchicalConfig& config);

/// Weighted sentence and word cross-entropy sums for one paragraph, recorded on tape.
/// Sentence step i targets CONTINUE for i < |K| and STOP at i = |K| (only when |K| < sent_max).
nn::Var dsic_loss(nn::Tape& tape, DsicParams& params, nn::Var P, const Paragraph& K);
double dsic_loss(const DsicParams& params, std::span<const float> P, const Paragraph& K);

/// Region features -> pooled vector -> loss, with every parameter trainable.
nn::Var dsic_record_loss(nn::Tape& tape, DsicParams& params, std::span<const RegionFeature> regions,
                         const Paragraph& K);

struct Generation {
  Paragraph sentences;
  /// Continue probability at each sentence step that was evaluated.
  std::vector<double> continue_probs;
};

/// Number of sentences produced for a run of continue probabilities: generation stops at the
/// first probability below threshold or at sent_max.
std::size_t sentences_from_probs(std::span<const double> continue_probs, double threshold,
                                 std::size_t sent_max);

/// Greedy decoding. PAD and BOS are never emitted; each sentence ends at EOS or word_max words.
Generation dsic_generate(const DsicParams& params, std::span<const float> P);
Generation dsic_generate(const DsicParams& params, std::span<const RegionFeature> regions);

struct Sample {
  std::vector<RegionFeature> regions;
  Paragraph target;
};

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  nn::AdamConfig adam{2e-3, 0.9, 0.999, 1e-8};
  double clip_norm = 5.0;
};

struct TrainResult {
  DsicParams params;
  /// Mean per-sample loss of each epoch.
  std::vector<double> loss_history;
};

/// Parameters are initialized from train.seed, which also drives the per-epoch shuffle.
TrainResult dsic_train(std::span<const Sample> corpus, const HierarchicalConfig& config,
                       const TrainConfig& train);

/// Uses at most config.top_regions regions, ranked by box area.
std::vector<RegionFeature> top_regions(std::span<const RegionFeature> regions, std::size_t k);

}  // namespace fpdesc::dsic
