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

#include "commands.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "mgre/ablation.h"
#include "mgre/checkpoint.h"
#include "mgre/corpus.h"
#include "mgre/features.h"
#include "mgre/scorer.h"
#include "mgre/spans.h"
#include "mgre/trainer.h"
#include "mgre/vocab.h"
#include "run_config.h"

namespace mgre::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string FlagName(const std::string &key) {
  std::string flag = "--" + key;
  for (char &ch : flag) {
    if (ch == '_') ch = '-';
  }
  return flag;
}

void RequireSetting(const std::string &value, const std::string &key) {
  if (value.empty()) throw ConfigError("missing required setting " + FlagName(key));
}

void RequireFile(const std::string &path, const std::string &key) {
  RequireSetting(path, key);
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("input file not found: " + path);
}

std::string OutputPath(const RunConfig &c, const std::string &name) {
  std::filesystem::create_directories(c.output_dir);
  return (std::filesystem::path(c.output_dir) / name).string();
}

std::string Format(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::unique_ptr<EmbeddingProvider> MakeProvider(const RunConfig &c, std::size_t dim) {
  if (c.embeddings.empty()) return std::make_unique<HashEmbeddingProvider>(dim, c.embedding_seed);
  auto p = std::make_unique<PrecomputedEmbeddingProvider>(
      PrecomputedEmbeddingProvider::Load(c.embeddings));
  if (p->dim() != dim) {
    throw std::runtime_error("embedding file has dimension " + std::to_string(p->dim()) +
                             ", the model expects " + std::to_string(dim));
  }
  return p;
}

std::vector<Sentence> ReadConllu(const std::string &path) { return ParseConllu(ReadFile(path)); }

Json ParseJson(const std::string &text) { return Json::parse(text); }

// ---- subcommands -----------------------------------------------------------------

int Prepare(const RunConfig &c, std::ostream &out) {
  RequireFile(c.train, "train");
  const std::vector<Sentence> corpus = ReadConllu(c.train);
  const VocabSet vocabs = BuildVocabs(corpus);
  std::mt19937_64 rng(c.model.seed);
  const DrefTable table = BuildDrefTable(corpus, c.model.edge_dim, rng, c.model.dref_same_pos_only);
  const std::pair<const char *, std::string> files[] = {
      {"dref.json", DrefTableJson(table)},
      {"vocabs.json", VocabsJson(vocabs)},
      {"stats.json", CorpusStatsJson(corpus, c.model.expansion_order)}};
  for (const auto &[name, text] : files) {
    const std::string path = OutputPath(c, name);
    WriteFile(path, text + "\n");
    out << "wrote " << path << "\n";
  }
  return kExitOk;
}

int Stats(const RunConfig &c, std::ostream &out) {
  const std::string &path = c.input.empty() ? c.train : c.input;
  RequireFile(path, c.input.empty() ? "train" : "input");
  const std::vector<Sentence> corpus = ReadConllu(path);
  out << CorpusStatsJson(corpus, c.model.expansion_order) << "\n";
  return kExitOk;
}

int TrainCommand(const RunConfig &c, std::ostream &out, std::ostream &err) {
  RequireFile(c.train, "train");
  if (!c.dev.empty()) RequireFile(c.dev, "dev");
  if (!c.test.empty()) RequireFile(c.test, "test");
  const std::vector<Sentence> corpus = ReadConllu(c.train);
  std::vector<Sentence> dev;
  if (!c.dev.empty()) dev = ReadConllu(c.dev);
  const auto provider = MakeProvider(c, c.model.context_dim);

  std::optional<std::span<const Sentence>> dev_span;
  if (!c.dev.empty()) dev_span = std::span<const Sentence>(dev);
  TrainResult result = Train(corpus, c.model, c.trainer, *provider, dev_span,
                             [&](const EpochRecord &e) {
                               err << "epoch " << e.epoch << " loss " << Format(e.train_loss, 6)
                                   << " dev-f1 " << Format(e.dev_macro_f1, 4) << " lr "
                                   << Format(e.learning_rate, 6) << "\n";
                             });

  std::vector<Sentence> final_set;
  if (!c.test.empty()) {
    final_set = ReadConllu(c.test);
  } else if (!c.dev.empty()) {
    final_set = dev;
  } else {
    for (std::size_t i : result.dev_indices) final_set.push_back(corpus[i]);
  }
  const std::vector<PreparedSentence> prepared = PrepareAll(result.model, final_set, *provider);
  const EvalReport report = Evaluate(result.model, prepared, c.trainer.threads);

  const std::string ckpt = c.checkpoint.empty() ? OutputPath(c, "model.ckpt") : c.checkpoint;
  if (auto parent = std::filesystem::path(ckpt).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  SaveCheckpoint(result.model, ckpt);
  const std::string metrics = OutputPath(c, "metrics.json");
  WriteFile(metrics, MetricsJson(c.model, c.trainer, result.log, report) + "\n");
  out << "row " << c.model.RowName() << "\n"
      << "best epoch " << result.best_epoch << " dev macro-F1 " << Format(result.best_dev_f1, 4)
      << "\n"
      << (c.test.empty() ? "dev" : "test") << " macro-F1 (excluding Other): "
      << Format(report.macro_f1, 4) << "\n"
      << "wrote " << ckpt << "\nwrote " << metrics << "\n";
  return kExitOk;
}

int EvalCommand(const RunConfig &c, std::ostream &out) {
  RequireFile(c.checkpoint, "checkpoint");
  RequireFile(c.test, "test");
  const Model model = LoadCheckpoint(c.checkpoint);
  const std::vector<Sentence> test = ReadConllu(c.test);
  const auto provider = MakeProvider(c, model.config().context_dim);
  const std::vector<PreparedSentence> prepared = PrepareAll(model, test, *provider);
  std::vector<std::size_t> gold;
  for (const Sentence &s : test) {
    if (!s.label) throw std::runtime_error("test sentence " + s.id + " has no gold label");
    gold.push_back(s.label->index());
  }
  const std::vector<std::size_t> predicted = PredictAll(model, prepared, c.trainer.threads);
  const EvalReport report = Score(gold, predicted);

  Json j{{"checkpoint_row", model.config().RowName()}, {"report", ParseJson(EvalReportJson(report))}};
  if (!test.empty()) {
    const SpanThresholds t = c.span_mean ? FixedSpanThresholds(*c.span_mean, *c.span_stddev)
                                         : DeriveSpanThresholds(test);
    Json buckets = Json::array();
    for (const BucketReport &b : SpanBucketEval(test, predicted, t)) {
      buckets.push_back(Json{{"bucket", SpanBucketName(b.bucket)},
                             {"size", b.size},
                             {"empty", b.empty},
                             {"macro_f1", b.report.macro_f1},
                             {"accuracy", b.report.accuracy}});
    }
    j["span_thresholds"] = Json{{"mean", t.mean},
                                {"stddev", t.stddev},
                                {"short_max", t.short_max()},
                                {"long_min", t.long_min()},
                                {"data_derived", t.data_derived}};
    j["span_buckets"] = std::move(buckets);
  }
  const std::string path = OutputPath(c, "eval.json");
  WriteFile(path, j.dump(2) + "\n");
  out << "macro-F1 (excluding Other): " << Format(report.macro_f1, 4) << "\n"
      << "accuracy: " << Format(100.0 * report.accuracy, 4) << "\n"
      << "wrote " << path << "\n";
  return kExitOk;
}

int PredictCommand(const RunConfig &c, std::ostream &out) {
  RequireFile(c.checkpoint, "checkpoint");
  RequireFile(c.input, "input");
  const Model model = LoadCheckpoint(c.checkpoint);
  const std::vector<Sentence> input = ReadConllu(c.input);
  const auto provider = MakeProvider(c, model.config().context_dim);
  const std::vector<PreparedSentence> prepared = PrepareAll(model, input, *provider);
  for (std::size_t label : PredictAll(model, prepared, c.trainer.threads)) {
    out << RelationLabel::FromIndex(label).ToString() << "\n";
  }
  return kExitOk;
}

int SweepCommand(const RunConfig &c, std::ostream &out, std::ostream &err) {
  RequireFile(c.train, "train");
  RequireFile(c.test, "test");
  std::vector<ModelConfig> cells;
  try {
    cells = c.grid.Expand(c.model);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  const std::vector<Sentence> train = ReadConllu(c.train);
  const std::vector<Sentence> test = ReadConllu(c.test);
  const auto provider = MakeProvider(c, c.model.context_dim);
  const std::vector<AblationRow> rows =
      RunAblation(train, test, cells, c.trainer, *provider, [&](const AblationRow &r) {
        err << "finished " << r.name << " test macro-F1 " << Format(r.test.macro_f1, 4) << "\n";
      });
  const std::string csv = AblationCsv(rows);
  const std::string path = OutputPath(c, "ablation.csv");
  WriteFile(path, csv);
  out << csv;
  for (const GraphModeComparison &cmp : CompareGraphModes(rows)) {
    out << "mg-vs-sg " << cmp.multi_row << " - " << cmp.single_row << " = "
        << (cmp.delta() >= 0 ? "+" : "") << Format(cmp.delta(), 4) << "\n";
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Relation extraction with edge-featured graph attention over dependency sub-graphs",
               "mgre"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> flags;
  const std::pair<const char *, const char *> commands[] = {
      {"prepare", "build the DREF table, vocabularies and corpus statistics"},
      {"train", "train a model and write a checkpoint and metrics"},
      {"eval", "score a checkpoint on a labeled corpus"},
      {"predict", "print one predicted label per input sentence"},
      {"stats", "print sub-graph size histograms as JSON"},
      {"sweep", "train and evaluate an ablation grid"}};
  std::map<std::string, CLI::App *> subs;
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "key = value configuration file");
    for (const std::string &key : ConfigKeys()) {
      sub->add_option_function<std::string>(
          FlagName(key), [&flags, key](const std::string &v) { flags[key] = v; },
          "config key " + key);
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) ApplyConfigFile(config, config_path);
    for (const std::string &key : ConfigKeys()) {
      if (auto it = flags.find(key); it != flags.end()) ApplySetting(config, key, it->second);
    }
    ValidateRunConfig(config);
  } catch (const ConfigError &e) {
    err << "mgre: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (subs["prepare"]->parsed()) return Prepare(config, out);
    if (subs["stats"]->parsed()) return Stats(config, out);
    if (subs["train"]->parsed()) return TrainCommand(config, out, err);
    if (subs["eval"]->parsed()) return EvalCommand(config, out);
    if (subs["predict"]->parsed()) return PredictCommand(config, out);
    if (subs["sweep"]->parsed()) return SweepCommand(config, out, err);
  } catch (const ConfigError &e) {
    err << "mgre: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "mgre: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mgre::cli
