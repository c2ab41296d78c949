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

#include "mgre/ablation.h"

#include <cstdio>
#include <set>
#include <stdexcept>

namespace mgre {

namespace {

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

bool SameExceptMode(const ModelConfig &a, const ModelConfig &b) {
  ModelConfig x = a;
  x.graph_mode = b.graph_mode;
  return x.RowName() == b.RowName() && x.graph_layers == b.graph_layers &&
         x.heads == b.heads && x.graph_dim == b.graph_dim;
}

}  // namespace

std::vector<ModelConfig> AblationGrid::Expand(const ModelConfig &base) const {
  if (graph_layers.empty() || contextual.empty() || graph_modes.empty() || edge_modes.empty() ||
      expansion_orders.empty()) {
    throw std::invalid_argument("ablation grid has an empty axis");
  }
  std::vector<ModelConfig> cells;
  for (GraphLayer layer : graph_layers) {
    for (bool ctx : contextual) {
      for (GraphMode mode : graph_modes) {
        for (EdgeMode edges : edge_modes) {
          for (std::size_t order : expansion_orders) {
            ModelConfig c = base;
            c.graph_layer = layer;
            c.contextual = ctx;
            c.graph_mode = mode;
            c.edge_mode = edges;
            c.expansion_order = order;
            c.Validate();
            cells.push_back(c);
          }
        }
      }
    }
  }
  return cells;
}

std::vector<AblationRow> RunAblation(std::span<const Sentence> train,
                                     std::span<const Sentence> test,
                                     std::span<const ModelConfig> cells,
                                     const TrainerConfig &trainer,
                                     const EmbeddingProvider &provider,
                                     const AblationProgress &progress) {
  std::set<std::string> names;
  for (const ModelConfig &c : cells) {
    if (!names.insert(c.RowName()).second) {
      throw std::invalid_argument("duplicate ablation row " + c.RowName());
    }
  }
  if (test.empty()) throw std::invalid_argument("empty test set");
  std::vector<AblationRow> rows;
  for (const ModelConfig &c : cells) {
    TrainResult result = Train(train, c, trainer, provider);
    const std::vector<PreparedSentence> prepared = PrepareAll(result.model, test, provider);
    AblationRow row;
    row.name = c.RowName();
    row.config = c;
    row.epochs_run = result.log.size();
    row.best_epoch = result.best_epoch;
    row.best_dev_f1 = result.best_dev_f1;
    row.test = Evaluate(result.model, prepared, trainer.threads);
    if (progress) progress(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string AblationCsv(std::span<const AblationRow> rows) {
  std::string out =
      "row,graph_layer,contextual,graph_mode,edge_mode,expansion_order,epochs_run,best_epoch,"
      "dev_macro_f1,test_macro_f1,test_accuracy,test_size\n";
  for (const AblationRow &r : rows) {
    const ModelConfig &c = r.config;
    out += r.name + "," + std::string(GraphLayerName(c.graph_layer)) + "," +
           (c.contextual ? "1" : "0") + "," + std::string(GraphModeName(c.graph_mode)) + "," +
           std::string(EdgeModeName(c.edge_mode)) + "," + std::to_string(c.expansion_order) +
           "," + std::to_string(r.epochs_run) + "," + std::to_string(r.best_epoch) + "," +
           Fixed(r.best_dev_f1) + "," + Fixed(r.test.macro_f1) + "," + Fixed(r.test.accuracy) +
           "," + std::to_string(r.test.instances) + "\n";
  }
  return out;
}

std::vector<GraphModeComparison> CompareGraphModes(std::span<const AblationRow> rows) {
  std::vector<GraphModeComparison> out;
  for (const AblationRow &m : rows) {
    if (m.config.graph_mode != GraphMode::kMulti) continue;
    for (const AblationRow &s : rows) {
      if (s.config.graph_mode != GraphMode::kSingle || !SameExceptMode(m.config, s.config)) {
        continue;
      }
      out.push_back({m.name, s.name, m.test.macro_f1, s.test.macro_f1});
    }
  }
  return out;
}

}  // namespace mgre
