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

#include "fpdesc/nn/adam.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"
#include "fpdesc/textprep.hpp"

namespace fpdesc::tbdg {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  nn::AdamConfig adam{5e-3, 0.9, 0.999, 1e-8};
  double clip_norm = 5.0;
};

struct CaptionerConfig {
  std::size_t vocab_size = 0;
  std::size_t feature_dim = 64;
  std::size_t embed_dim = 150;
  std::size_t hidden = 256;
  std::size_t max_len = 20;

  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static CaptionerConfig from_map(const std::map<std::string, std::string>& values);
};

/// The region feature sets the initial hidden state h0 = tanh(feat_W f + feat_b); the LSTM
/// then reads embeddings of BOS, w_1, ... and predicts w_1, ..., EOS.
struct CaptionerParams {
  CaptionerConfig config;
  nn::Tensor feat_W, feat_b;  // hidden x feature_dim, hidden
  nn::Tensor embed;           // vocab x embed_dim
  nn::LstmParams lstm;        // embed_dim -> hidden
  nn::Tensor out_W, out_b;    // vocab x hidden

  static CaptionerParams init(const CaptionerConfig& config, std::uint64_t seed);
  std::vector<nn::NamedTensor> parameters();
};

/// Mean cross-entropy over the caption tokens and the closing EOS (teacher forcing).
nn::Var captioner_loss(nn::Tape& tape, CaptionerParams& params, std::span<const float> feature,
                       std::span<const TokenId> caption);
double captioner_loss(const CaptionerParams& params, std::span<const float> feature,
                      std::span<const TokenId> caption);

struct Caption {
  std::vector<TokenId> tokens;
  /// Mean log-probability of the emitted tokens, EOS included when it was emitted.
  double score = 0;
};

/// Greedy decoding until EOS (not included) or max_len tokens. PAD and BOS are never emitted.
Caption captioner_generate(const CaptionerParams& params, std::span<const float> feature);

struct CaptionPair {
  std::vector<float> feature;
  std::vector<TokenId> caption;
};

struct CaptionerTrainResult {
  CaptionerParams params;
  std::vector<double> loss_history;
};

/// Captions longer than max_len tokens are rejected before training starts.
CaptionerTrainResult captioner_train(std::span<const CaptionPair> pairs, const CaptionerConfig& config,
                                     const TrainConfig& train);

}  // namespace fpdesc::tbdg
