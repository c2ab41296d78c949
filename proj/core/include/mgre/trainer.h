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

// Mini-batch SGD training with dev-based model selection, and batch
// evaluation helpers.

#ifndef MGRE_TRAINER_H_
#define MGRE_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgre/corpus.h"
#include "mgre/features.h"
#include "mgre/model.h"
#include "mgre/scorer.h"

namespace mgre {

enum class BudgetUnit { kEpochs, kSteps };

std::string_view BudgetUnitName(BudgetUnit unit);  // "epochs", "steps"
BudgetUnit ParseBudgetUnit(std::string_view text);

struct TrainerConfig {
  std::size_t batch_size = 50;
  // Number of epochs, or optimizer steps when budget_unit is kSteps.
  std::size_t epochs = 200;
  BudgetUnit budget_unit = BudgetUnit::kEpochs;
  double learning_rate = 0.1;
  // Multiplies the learning rate after an epoch that does not improve dev F1.
  double lr_decay = 0.9;
  double dev_fraction = 0.10;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;  // 0 disables clipping
  std::size_t threads = 1;  // evaluation only
  bool track_train_accuracy = false;
  // Stop as soon as every training sentence is classified correctly. Implies
  // track_train_accuracy.
  bool stop_at_perfect_train = false;

  void Validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  std::size_t steps = 0;  // cumulative optimizer steps
  double learning_rate = 0.0;  // rate used during the epoch
  double train_loss = 0.0;     // mean over the epoch's sentences
  double dev_macro_f1 = 0.0;
  double dev_accuracy = 0.0;
  std::optional<double> train_accuracy;
};

// Raised when the loss or a gradient stops being finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t batch, const std::string &what);
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

struct TrainResult {
  Model model;  // parameters of the best dev epoch
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
  std::vector<std::size_t> train_indices;  // into the input corpus
  std::vector<std::size_t> dev_indices;    // empty when an explicit dev set was given
};

using EpochCallback = std::function<void(const EpochRecord &)>;

// Splits off a seeded dev portion (unless `dev` is given), builds the model
// from the remaining training sentences only and trains it. Deterministic
// for a fixed seed. Throws std::invalid_argument on bad configs or an
// unusable corpus and TrainingDiverged on non-finite values.
TrainResult Train(std::span<const Sentence> corpus, const ModelConfig &model_config,
                  const TrainerConfig &config, const EmbeddingProvider &provider,
                  std::optional<std::span<const Sentence>> dev = std::nullopt,
                  const EpochCallback &on_epoch = nullptr);

// Seeded disjoint split; both lists ascending. The dev part has
// round(fraction * n) sentences, at least one, and leaves at least one for
// training. Throws std::invalid_argument for fewer than two sentences.
void SplitDev(std::size_t n, double fraction, std::uint64_t seed,
              std::vector<std::size_t> &train, std::vector<std::size_t> &dev);

// Rescales the gradients in place so their global L2 norm is at most
// max_norm; returns the norm before clipping.
double ClipGradients(std::span<Parameter *const> params, double max_norm);

std::vector<PreparedSentence> PrepareAll(const Model &model, std::span<const Sentence> sentences,
                                         const EmbeddingProvider &provider);

// Predicted label indices, computed on up to `threads` threads; the result
// does not depend on the thread count.
std::vector<std::size_t> PredictAll(const Model &model,
                                    std::span<const PreparedSentence> prepared,
                                    std::size_t threads = 1);

// Throws std::invalid_argument if a sentence is unlabeled.
EvalReport Evaluate(const Model &model, std::span<const PreparedSentence> prepared,
                    std::size_t threads = 1);

// {config, per_epoch, final}. Contains no timings, so identical runs give
// identical bytes.
std::string MetricsJson(const ModelConfig &model_config, const TrainerConfig &config,
                        std::span<const EpochRecord> log, const EvalReport &final_report);

}  // namespace mgre

#endif  // MGRE_TRAINER_H_
