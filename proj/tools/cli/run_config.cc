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

#include "run_config.h"

#include <charconv>
#include <functional>
#include <map>

#include "mgre/corpus.h"

namespace mgre::cli {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Bad(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key) +
                    " (expected " + std::string(expected) + ")");
}

std::size_t ToSize(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "a non-negative integer");
  return out;
}

std::uint64_t ToU64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "a non-negative integer");
  return out;
}

double ToDouble(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "a number");
  return out;
}

bool ToBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  Bad(key, v, "true or false");
}

template <typename T, typename F>
std::vector<T> ToList(std::string_view key, std::string_view v, F parse) {
  std::vector<T> out;
  while (true) {
    std::size_t comma = v.find(',');
    std::string_view item = Trim(v.substr(0, comma));
    if (item.empty()) Bad(key, v, "a comma-separated list");
    out.push_back(parse(item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <typename F>
auto Wrap(std::string_view key, std::string_view value, F f) {
  try {
    return f(value);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

using Setter = std::function<void(RunConfig &, std::string_view key, std::string_view value)>;

const std::vector<std::pair<std::string, Setter>> &Setters() {
  static const std::vector<std::pair<std::string, Setter>> setters = {
      // model
      {"context_dim", [](RunConfig &c, auto k, auto v) { c.model.context_dim = ToSize(k, v); }},
      {"feature_dim", [](RunConfig &c, auto k, auto v) { c.model.feature_dim = ToSize(k, v); }},
      {"word_type_dim", [](RunConfig &c, auto k, auto v) { c.model.word_type_dim = ToSize(k, v); }},
      {"lstm_dim", [](RunConfig &c, auto k, auto v) { c.model.lstm_dim = ToSize(k, v); }},
      {"graph_dim", [](RunConfig &c, auto k, auto v) { c.model.graph_dim = ToSize(k, v); }},
      {"heads", [](RunConfig &c, auto k, auto v) { c.model.heads = ToSize(k, v); }},
      {"edge_dim", [](RunConfig &c, auto k, auto v) { c.model.edge_dim = ToSize(k, v); }},
      {"graph_layer",
       [](RunConfig &c, auto k, auto v) { c.model.graph_layer = Wrap(k, v, ParseGraphLayer); }},
      {"contextual", [](RunConfig &c, auto k, auto v) { c.model.contextual = ToBool(k, v); }},
      {"graph_mode",
       [](RunConfig &c, auto k, auto v) { c.model.graph_mode = Wrap(k, v, ParseGraphMode); }},
      {"edge_mode",
       [](RunConfig &c, auto k, auto v) { c.model.edge_mode = Wrap(k, v, ParseEdgeMode); }},
      {"expansion_order",
       [](RunConfig &c, auto k, auto v) { c.model.expansion_order = ToSize(k, v); }},
      {"graph_layers", [](RunConfig &c, auto k, auto v) { c.model.graph_layers = ToSize(k, v); }},
      {"dref_scale_by_ratio",
       [](RunConfig &c, auto k, auto v) { c.model.dref_scale_by_ratio = ToBool(k, v); }},
      {"dref_same_pos_only",
       [](RunConfig &c, auto k, auto v) { c.model.dref_same_pos_only = ToBool(k, v); }},
      {"seed",
       [](RunConfig &c, auto k, auto v) { c.model.seed = c.trainer.seed = ToU64(k, v); }},
      // trainer
      {"batch_size", [](RunConfig &c, auto k, auto v) { c.trainer.batch_size = ToSize(k, v); }},
      {"epochs", [](RunConfig &c, auto k, auto v) { c.trainer.epochs = ToSize(k, v); }},
      {"budget_unit",
       [](RunConfig &c, auto k, auto v) { c.trainer.budget_unit = Wrap(k, v, ParseBudgetUnit); }},
      {"learning_rate",
       [](RunConfig &c, auto k, auto v) { c.trainer.learning_rate = ToDouble(k, v); }},
      {"lr_decay", [](RunConfig &c, auto k, auto v) { c.trainer.lr_decay = ToDouble(k, v); }},
      {"dev_fraction",
       [](RunConfig &c, auto k, auto v) { c.trainer.dev_fraction = ToDouble(k, v); }},
      {"clip_norm", [](RunConfig &c, auto k, auto v) { c.trainer.clip_norm = ToDouble(k, v); }},
      {"threads", [](RunConfig &c, auto k, auto v) { c.trainer.threads = ToSize(k, v); }},
      {"track_train_accuracy",
       [](RunConfig &c, auto k, auto v) { c.trainer.track_train_accuracy = ToBool(k, v); }},
      {"stop_at_perfect_train",
       [](RunConfig &c, auto k, auto v) { c.trainer.stop_at_perfect_train = ToBool(k, v); }},
      // paths
      {"train", [](RunConfig &c, auto, auto v) { c.train = v; }},
      {"dev", [](RunConfig &c, auto, auto v) { c.dev = v; }},
      {"test", [](RunConfig &c, auto, auto v) { c.test = v; }},
      {"input", [](RunConfig &c, auto, auto v) { c.input = v; }},
      {"embeddings", [](RunConfig &c, auto, auto v) { c.embeddings = v; }},
      {"checkpoint", [](RunConfig &c, auto, auto v) { c.checkpoint = v; }},
      {"output_dir", [](RunConfig &c, auto, auto v) { c.output_dir = v; }},
      // misc
      {"embedding_seed", [](RunConfig &c, auto k, auto v) { c.embedding_seed = ToU64(k, v); }},
      {"span_mean", [](RunConfig &c, auto k, auto v) { c.span_mean = ToDouble(k, v); }},
      {"span_stddev", [](RunConfig &c, auto k, auto v) { c.span_stddev = ToDouble(k, v); }},
      {"sweep_graph_layers",
       [](RunConfig &c, auto k, auto v) {
         c.grid.graph_layers = ToList<GraphLayer>(
             k, v, [&](std::string_view s) { return Wrap(k, s, ParseGraphLayer); });
       }},
      {"sweep_contextual",
       [](RunConfig &c, auto k, auto v) {
         c.grid.contextual = ToList<bool>(k, v, [&](std::string_view s) { return ToBool(k, s); });
       }},
      {"sweep_graph_modes",
       [](RunConfig &c, auto k, auto v) {
         c.grid.graph_modes = ToList<GraphMode>(
             k, v, [&](std::string_view s) { return Wrap(k, s, ParseGraphMode); });
       }},
      {"sweep_edge_modes",
       [](RunConfig &c, auto k, auto v) {
         c.grid.edge_modes = ToList<EdgeMode>(
             k, v, [&](std::string_view s) { return Wrap(k, s, ParseEdgeMode); });
       }},
      {"sweep_expansion_orders",
       [](RunConfig &c, auto k, auto v) {
         c.grid.expansion_orders =
             ToList<std::size_t>(k, v, [&](std::string_view s) { return ToSize(k, s); });
       }},
  };
  return setters;
}

}  // namespace

const std::vector<std::string> &ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto &[name, setter] : Setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void ApplySetting(RunConfig &config, std::string_view key, std::string_view value) {
  for (const auto &[name, setter] : Setters()) {
    if (name == key) {
      setter(config, key, Trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void ApplyConfigText(RunConfig &config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      ApplySetting(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const ConfigError &e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ApplyConfigFile(RunConfig &config, const std::string &path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const IoError &e) {
    throw ConfigError(e.what());
  }
  try {
    ApplyConfigText(config, text);
  } catch (const ConfigError &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void ValidateRunConfig(const RunConfig &config) {
  try {
    config.model.Validate();
    config.trainer.Validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (config.span_mean.has_value() != config.span_stddev.has_value()) {
    throw ConfigError("span_mean and span_stddev must be given together");
  }
}

}  // namespace mgre::cli
