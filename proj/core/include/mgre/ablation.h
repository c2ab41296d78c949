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

// Ablation sweeps: train and evaluate one model per grid cell and tabulate
// the results under the ablation row-naming scheme.

#ifndef MGRE_ABLATION_H_
#define MGRE_ABLATION_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgre/model.h"
#include "mgre/scorer.h"
#include "mgre/trainer.h"

namespace mgre {

struct AblationGrid {
  std::vector<GraphLayer> graph_layers = {GraphLayer::kGcn, GraphLayer::kGat};
  std::vector<bool> contextual = {true};
  std::vector<GraphMode> graph_modes = {GraphMode::kSingle, GraphMode::kMulti};
  std::vector<EdgeMode> edge_modes = {EdgeMode::kNone, EdgeMode::kDref};
  std::vector<std::size_t> expansion_orders = {0};

  // Cartesian product over `base`, in field order with the last field
  // varying fastest. Throws std::invalid_argument if any axis is empty.
  std::vector<ModelConfig> Expand(const ModelConfig &base) const;
};

struct AblationRow {
  std::string name;
  ModelConfig config;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
  EvalReport test;
};

using AblationProgress = std::function<void(const AblationRow &)>;

// Trains each configuration on `train` and scores it on `test`. Throws
// std::invalid_argument if two cells share a row name.
std::vector<AblationRow> RunAblation(std::span<const Sentence> train,
                                     std::span<const Sentence> test,
                                     std::span<const ModelConfig> cells,
                                     const TrainerConfig &trainer,
                                     const EmbeddingProvider &provider,
                                     const AblationProgress &progress = nullptr);

// Header plus one line per row:
// row,graph_layer,contextual,graph_mode,edge_mode,expansion_order,
// epochs_run,best_epoch,dev_macro_f1,test_macro_f1,test_accuracy,test_size
std::string AblationCsv(std::span<const AblationRow> rows);

// Multi-graph vs single-graph F1 for rows that differ only in graph mode.
struct GraphModeComparison {
  std::string multi_row;
  std::string single_row;
  double multi_f1 = 0.0;
  double single_f1 = 0.0;
  double delta() const { return multi_f1 - single_f1; }
};

std::vector<GraphModeComparison> CompareGraphModes(std::span<const AblationRow> rows);

}  // namespace mgre

#endif  // MGRE_ABLATION_H_
