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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpdesc/attention.hpp"
#include "fpdesc/captioner.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"
#include "fpdesc/skipgram.hpp"
#include "fpdesc/textprep.hpp"

namespace fpdesc::tbdg {

struct TbdgConfig {
  std::size_t vocab_size = 0;
  std::size_t input_len = 80;
  std::size_t output_len = 80;
  std::size_t embed_dim = 150;
  std::size_t decoder_hidden = 256;
  std::size_t encoder_hidden = 128;
  AlignMode align = AlignMode::Dot;

  /// Dot alignment needs decoder_hidden == 2 * encoder_hidden.
  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static TbdgConfig from_map(const std::map<std::string, std::string>& values);
};

/// Bi-LSTM encoder over the shared embeddings of W_e; the decoder starts from
/// h0 = tanh(bridge_W [fwd_last ; bwd_first] + bridge_b), c0 = 0. At step t it attends
/// with h_{t-1}, reads [embed(y_{t-1}) ; cv_t] and projects h_t to the vocabulary.
struct TbdgParams {
  TbdgConfig config;
  nn::Tensor embed;                   // vocab x embed_dim
  nn::LstmParams enc_fwd, enc_bwd;    // embed_dim -> encoder_hidden
  nn::Tensor bridge_W, bridge_b;      // decoder_hidden x 2*encoder_hidden
  nn::LstmParams decoder;             // embed_dim + 2*encoder_hidden -> decoder_hidden
  nn::Tensor align_W;                 // decoder_hidden x 2*encoder_hidden, general mode only
  nn::Tensor out_W, out_b;            // vocab x decoder_hidden

  /// Optional pretrained embeddings (rows must match vocab_size and embed_dim).
  static TbdgParams init(const TbdgConfig& config, std::uint64_t seed,
                         const EmbeddingTable* embeddings = nullptr);
  std::vector<nn::NamedTensor> parameters();
};

/// Mean cross-entropy over target positions 1.. up to the first PAD of T_e (which starts
/// with BOS). PAD positions of W_e are not encoded.
nn::Var tbdg_loss(nn::Tape& tape, TbdgParams& params, std::span<const TokenId> W_e,
                  std::span<const TokenId> T_e);
double tbdg_loss(const TbdgParams& params, std::span<const TokenId> W_e, std::span<const TokenId> T_e);

struct TbdgOutput {
  std::vector<TokenId> tokens;
  /// One row of attention weights per decode step, over the encoded input positions.
  std::vector<std::vector<double>> attention;
};

/// Greedy decoding from BOS for at most output_len-1 steps, stopping at EOS (not included).
TbdgOutput tbdg_generate(const TbdgParams& params, std::span<const TokenId> W_e);

struct TbdgSample {
  std::vector<TokenId> input;   // W_e, length input_len
  std::vector<TokenId> target;  // T_e, length output_len, BOS ... EOS PAD ...
};

struct TbdgTrainResult {
  TbdgParams params;
  std::vector<double> loss_history;
};

TbdgTrainResult tbdg_train(std::span<const TbdgSample> corpus, const TbdgConfig& config,
                           const TrainConfig& train, const EmbeddingTable* embeddings = nullptr);

}  // namespace fpdesc::tbdg
