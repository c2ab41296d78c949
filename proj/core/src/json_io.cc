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

#include "json_io.h"

#include <stdexcept>
#include <string>

namespace mgre {

Json ToJson(const ModelConfig &c) {
  return Json{{"context_dim", c.context_dim},
              {"feature_dim", c.feature_dim},
              {"word_type_dim", c.word_type_dim},
              {"lstm_dim", c.lstm_dim},
              {"graph_dim", c.graph_dim},
              {"heads", c.heads},
              {"edge_dim", c.edge_dim},
              {"graph_layer", GraphLayerName(c.graph_layer)},
              {"contextual", c.contextual},
              {"graph_mode", c.graph_mode == GraphMode::kMulti ? "multi" : "single"},
              {"edge_mode", EdgeModeName(c.edge_mode)},
              {"expansion_order", c.expansion_order},
              {"graph_layers", c.graph_layers},
              {"dref_scale_by_ratio", c.dref_scale_by_ratio},
              {"dref_same_pos_only", c.dref_same_pos_only},
              {"zero_init_classifier", c.zero_init_classifier},
              {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const Json &j) {
  try {
    ModelConfig c;
    c.context_dim = j.at("context_dim").get<std::size_t>();
    c.feature_dim = j.at("feature_dim").get<std::size_t>();
    c.word_type_dim = j.at("word_type_dim").get<std::size_t>();
    c.lstm_dim = j.at("lstm_dim").get<std::size_t>();
    c.graph_dim = j.at("graph_dim").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.edge_dim = j.at("edge_dim").get<std::size_t>();
    c.graph_layer = ParseGraphLayer(j.at("graph_layer").get<std::string>());
    c.contextual = j.at("contextual").get<bool>();
    c.graph_mode = ParseGraphMode(j.at("graph_mode").get<std::string>());
    c.edge_mode = ParseEdgeMode(j.at("edge_mode").get<std::string>());
    c.expansion_order = j.at("expansion_order").get<std::size_t>();
    c.graph_layers = j.at("graph_layers").get<std::size_t>();
    c.dref_scale_by_ratio = j.at("dref_scale_by_ratio").get<bool>();
    c.dref_same_pos_only = j.at("dref_same_pos_only").get<bool>();
    c.zero_init_classifier = j.at("zero_init_classifier").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument(std::string("bad model config: ") + e.what());
  }
}

Json ToJson(const TrainerConfig &c) {
  return Json{{"batch_size", c.batch_size},
              {"budget", c.epochs},
              {"budget_unit", BudgetUnitName(c.budget_unit)},
              {"learning_rate", c.learning_rate},
              {"lr_decay", c.lr_decay},
              {"dev_fraction", c.dev_fraction},
              {"seed", c.seed},
              {"clip_norm", c.clip_norm},
              {"threads", c.threads},
              {"track_train_accuracy", c.track_train_accuracy},
              {"stop_at_perfect_train", c.stop_at_perfect_train}};
}

Json ToJson(const ClassScore &s) {
  return Json{{"name", s.name},           {"correct", s.correct}, {"predicted", s.predicted},
              {"gold", s.gold},           {"precision", s.precision},
              {"recall", s.recall},       {"f1", s.f1}};
}

Json ToJson(const EvalReport &r) {
  Json bases = Json::array();
  for (const ClassScore &s : r.bases) bases.push_back(ToJson(s));
  Json labels = Json::array();
  for (const ClassScore &s : r.labels) labels.push_back(ToJson(s));
  return Json{{"instances", r.instances},
              {"exact_correct", r.exact_correct},
              {"accuracy", r.accuracy},
              {"macro_f1", r.macro_f1},
              {"bases", std::move(bases)},
              {"labels", std::move(labels)},
              {"confusion", r.confusion}};
}

Json ToJson(const EpochRecord &e) {
  Json j{{"epoch", e.epoch},
         {"steps", e.steps},
         {"learning_rate", e.learning_rate},
         {"train_loss", e.train_loss},
         {"dev_macro_f1", e.dev_macro_f1},
         {"dev_accuracy", e.dev_accuracy}};
  if (e.train_accuracy) j["train_accuracy"] = *e.train_accuracy;
  return j;
}

}  // namespace mgre
