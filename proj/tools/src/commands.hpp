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

#include <iosfwd>

#include "run_config.hpp"

namespace fpdesc::cli {

int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_stats(const RunConfig& cfg, std::ostream& out);
int cmd_prep(const RunConfig& cfg, std::ostream& out);

int cmd_train_dsic(const RunConfig& cfg, std::ostream& out);
int cmd_train_captioner(const RunConfig& cfg, std::ostream& out);
int cmd_train_tbdg(const RunConfig& cfg, std::ostream& out);
int cmd_train_skipgram(const RunConfig& cfg, std::ostream& out);

int cmd_generate_dsic(const RunConfig& cfg, std::ostream& out);
int cmd_generate_tbdg(const RunConfig& cfg, std::ostream& out);
int cmd_generate_template(const RunConfig& cfg, std::ostream& out);

int cmd_eval_text(const RunConfig& cfg, std::ostream& out);
int cmd_eval_detect(const RunConfig& cfg, std::ostream& out);

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out);

}  // namespace fpdesc::cli
