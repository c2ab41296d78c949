// Copyright 2026 The mgre Authors.
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

// Run configuration for the command-line tool: model and trainer settings
// plus file paths, read from a key=value file and overridden by flags.

#ifndef MGRE_TOOLS_CLI_RUN_CONFIG_H_
#define MGRE_TOOLS_CLI_RUN_CONFIG_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgre/ablation.h"
#include "mgre/model.h"
#include "mgre/trainer.h"

namespace mgre::cli {

// Bad keys or values; reported as a usage error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelConfig model;
  TrainerConfig trainer;

  std::string train;
  std::string dev;
  std::string test;
  std::string input;
  std::string embeddings;  // precomputed vectors; empty selects the hash fallback
  std::string checkpoint;
  std::string output_dir = ".";

  std::uint64_t embedding_seed = 7;
  std::optional<double> span_mean;
  std::optional<double> span_stddev;
  AblationGrid grid;
};

// Every accepted key, in documentation order.
const std::vector<std::string> &ConfigKeys();

// Throws ConfigError for an unknown key or a malformed value.
void ApplySetting(RunConfig &config, std::string_view key, std::string_view value);

// One `key = value` per line; blank lines and `#` comments are ignored.
// Errors name the line.
void ApplyConfigText(RunConfig &config, std::string_view text);
void ApplyConfigFile(RunConfig &config, const std::string &path);

// Model and trainer validation, rethrown as ConfigError.
void ValidateRunConfig(const RunConfig &config);

}  // namespace mgre::cli

#endif  // MGRE_TOOLS_CLI_RUN_CONFIG_H_
