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

#include "mgre/trainer.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "json_io.h"

namespace mgre {

namespace {

void Shuffle(std::vector<std::size_t> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

bool AllFinite(std::span<Parameter *const> params) {
  for (const Parameter *p : params) {
    if (p->requires_grad && !p->grad.AllFinite()) return false;
  }
  return true;
}

double Accuracy(const Model &model, std::span<const PreparedSentence> prepared,
                std::size_t threads) {
  return Evaluate(model, prepared, threads).accuracy;
}

}  // namespace

std::string_view BudgetUnitName(BudgetUnit unit) {
  return unit == BudgetUnit::kEpochs ? "epochs" : "steps";
}

BudgetUnit ParseBudgetUnit(std::string_view text) {
  if (text == "epochs" || text == "epoch") return BudgetUnit::kEpochs;
  if (text == "steps" || text == "step") return BudgetUnit::kSteps;
  throw std::invalid_argument("unknown budget unit '" + std::string(text) +
                              "' (expected epochs or steps)");
}

void TrainerConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw std::invalid_argument("invalid trainer config: " + what);
  };
  require(batch_size >= 1, "batch_size must be at least 1");
  require(epochs >= 1, "the training budget must be at least 1");
  require(std::isfinite(learning_rate) && learning_rate >= 0.0,
          "learning_rate must be finite and non-negative");
  require(lr_decay > 0.0 && lr_decay <= 1.0, "lr_decay must lie in (0, 1]");
  require(dev_fraction > 0.0 && dev_fraction < 1.0, "dev_fraction must lie in (0, 1)");
  require(clip_norm >= 0.0, "clip_norm must be non-negative");
  require(threads >= 1, "threads must be at least 1");
}

TrainingDiverged::TrainingDiverged(std::size_t epoch, std::size_t batch, const std::string &what)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch) + ": " + what),
      epoch_(epoch),
      batch_(batch) {}

void SplitDev(std::size_t n, double fraction, std::uint64_t seed, std::vector<std::size_t> &train,
              std::vector<std::size_t> &dev) {
  if (n < 2) throw std::invalid_argument("need at least two sentences to split off a dev set");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  Shuffle(order, rng);
  std::size_t dev_size = static_cast<std::size_t>(std::llround(fraction * n));
  dev_size = std::clamp<std::size_t>(dev_size, 1, n - 1);
  dev.assign(order.begin(), order.begin() + dev_size);
  train.assign(order.begin() + dev_size, order.end());
  std::sort(dev.begin(), dev.end());
  std::sort(train.begin(), train.end());
}

double ClipGradients(std::span<Parameter *const> params, double max_norm) {
  double sq = 0.0;
  for (const Parameter *p : params) {
    if (p->requires_grad) sq += p->grad.SquaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Parameter *p : params) {
      if (p->requires_grad) p->grad *= scale;
    }
  }
  return norm;
}

std::vector<PreparedSentence> PrepareAll(const Model &model, std::span<const Sentence> sentences,
                                         const EmbeddingProvider &provider) {
  std::vector<PreparedSentence> out;
  out.reserve(sentences.size());
  for (const Sentence &s : sentences) out.push_back(model.Prepare(s, provider));
  return out;
}

std::vector<std::size_t> PredictAll(const Model &model,
                                    std::span<const PreparedSentence> prepared,
                                    std::size_t threads) {
  std::vector<std::size_t> out(prepared.size());
  threads = std::max<std::size_t>(1, std::min(threads, prepared.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < prepared.size(); ++i) out[i] = model.Predict(prepared[i]);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < prepared.size(); i += threads) {
          out[i] = model.Predict(prepared[i]);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread &w : workers) w.join();
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EvalReport Evaluate(const Model &model, std::span<const PreparedSentence> prepared,
                    std::size_t threads) {
  std::vector<std::size_t> gold;
  gold.reserve(prepared.size());
  for (const PreparedSentence &p : prepared) {
    if (!p.sentence.label) {
      throw std::invalid_argument("sentence " + p.sentence.id + " has no gold label");
    }
    gold.push_back(p.sentence.label->index());
  }
  return Score(gold, PredictAll(model, prepared, threads));
}

TrainResult Train(std::span<const Sentence> corpus, const ModelConfig &model_config,
                  const TrainerConfig &config, const EmbeddingProvider &provider,
                  std::optional<std::span<const Sentence>> dev, const EpochCallback &on_epoch) {
  model_config.Validate();
  config.Validate();
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");
  for (const Sentence &s : corpus) {
    if (!s.label) throw std::invalid_argument("training sentence " + s.id + " has no label");
  }

  std::vector<std::size_t> train_idx, dev_idx;
  if (dev) {
    if (dev->empty()) throw std::invalid_argument("empty dev set");
    for (std::size_t i = 0; i < corpus.size(); ++i) train_idx.push_back(i);
  } else {
    SplitDev(corpus.size(), config.dev_fraction, config.seed, train_idx, dev_idx);
  }
  std::vector<Sentence> train_set, dev_set;
  for (std::size_t i : train_idx) train_set.push_back(corpus[i]);
  if (dev) {
    dev_set.assign(dev->begin(), dev->end());
  } else {
    for (std::size_t i : dev_idx) dev_set.push_back(corpus[i]);
  }

  Model model = Model::Create(train_set, model_config);
  const std::vector<PreparedSentence> train_prep = PrepareAll(model, train_set, provider);
  const std::vector<PreparedSentence> dev_prep = PrepareAll(model, dev_set, provider);
  std::vector<Parameter *> params = model.Parameters();

  const bool track_train = config.track_train_accuracy || config.stop_at_perfect_train;
  const bool step_budget = config.budget_unit == BudgetUnit::kSteps;
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_prep.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::optional<Model> best;
  std::vector<EpochRecord> log;
  double best_f1 = 0.0, best_acc = 0.0;
  std::size_t best_epoch = 0;
  double lr = config.learning_rate;
  std::size_t steps = 0;

  for (std::size_t epoch = 1;; ++epoch) {
    if (!step_budget && epoch > config.epochs) break;
    if (step_budget && steps >= config.epochs) break;
    Shuffle(order, rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      if (step_budget && steps >= config.epochs) break;
      ++batch_no;
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (Parameter *p : params) p->ZeroGrad();
      for (std::size_t k = start; k < end; ++k) {
        Tape tape;
        Var loss = model.Loss(tape, train_prep[order[k]]);
        const double value = loss.value()[0];
        if (!std::isfinite(value)) {
          throw TrainingDiverged(epoch, batch_no,
                                 "non-finite loss on sentence " +
                                     train_prep[order[k]].sentence.id);
        }
        tape.Backward(loss);
        loss_sum += value;
      }
      seen += end - start;
      const double inv = 1.0 / static_cast<double>(end - start);
      for (Parameter *p : params) {
        if (p->requires_grad) p->grad *= inv;
      }
      if (!AllFinite(params)) throw TrainingDiverged(epoch, batch_no, "non-finite gradient");
      ClipGradients(params, config.clip_norm);
      for (Parameter *p : params) {
        if (!p->requires_grad) continue;
        double *v = p->value.data();
        const double *g = p->grad.data();
        for (std::size_t i = 0; i < p->value.size(); ++i) v[i] -= lr * g[i];
      }
      ++steps;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.steps = steps;
    rec.learning_rate = lr;
    rec.train_loss = seen == 0 ? 0.0 : loss_sum / seen;
    const EvalReport dev_report = Evaluate(model, dev_prep, config.threads);
    rec.dev_macro_f1 = dev_report.macro_f1;
    rec.dev_accuracy = dev_report.accuracy;
    if (track_train) rec.train_accuracy = Accuracy(model, train_prep, config.threads);

    const bool improved = !best || rec.dev_macro_f1 > best_f1 ||
                          (rec.dev_macro_f1 == best_f1 && rec.dev_accuracy > best_acc);
    if (improved) {
      best = model;
      best_f1 = rec.dev_macro_f1;
      best_acc = rec.dev_accuracy;
      best_epoch = epoch;
    } else {
      lr *= config.lr_decay;
    }
    log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (config.stop_at_perfect_train && rec.train_accuracy && *rec.train_accuracy == 1.0) break;
  }

  for (Parameter *p : best->Parameters()) p->ZeroGrad();
  return TrainResult{std::move(*best), std::move(log), best_epoch, best_f1,
                     std::move(train_idx), std::move(dev_idx)};
}

std::string MetricsJson(const ModelConfig &model_config, const TrainerConfig &config,
                        std::span<const EpochRecord> log, const EvalReport &final_report) {
  Json epochs = Json::array();
  for (const EpochRecord &e : log) epochs.push_back(ToJson(e));
  Json j{{"config", Json{{"model", ToJson(model_config)}, {"trainer", ToJson(config)}}},
         {"per_epoch", std::move(epochs)},
         {"final", ToJson(final_report)}};
  return j.dump(2);
}

}  // namespace mgre
