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

// The multi-sub-graph relation classifier.
//
// Per sub-graph: token encodings -> BiLSTM (or a linear projection) -> graph
// layer(s) with edge features -> attention pooling. The sentence vector is
// h_e1 + h_e2 + the sum of pooled graph vectors, with the entity states read
// from the SDP graph, followed by a linear classifier over the 19 labels.
// Encoder, graph layers and pooling are shared by all sub-graphs.

#ifndef MGRE_MODEL_H_
#define MGRE_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mgre/autodiff.h"
#include "mgre/corpus.h"
#include "mgre/features.h"
#include "mgre/graph.h"
#include "mgre/layers.h"
#include "mgre/vocab.h"

namespace mgre {

enum class GraphLayer { kGat, kGcn };
enum class GraphMode { kMulti, kSingle };

std::string_view GraphLayerName(GraphLayer layer);  // "gat", "gcn"
std::string_view GraphModeName(GraphMode mode);     // "mg", "sg"
GraphLayer ParseGraphLayer(std::string_view text);
// Accepts mg/multi and sg/single.
GraphMode ParseGraphMode(std::string_view text);

struct ModelConfig {
  std::size_t context_dim = 768;
  std::size_t feature_dim = 40;
  std::size_t word_type_dim = 10;
  std::size_t lstm_dim = 256;  // per direction
  std::size_t graph_dim = 256;
  std::size_t heads = 4;
  std::size_t edge_dim = 40;
  GraphLayer graph_layer = GraphLayer::kGat;
  bool contextual = true;
  GraphMode graph_mode = GraphMode::kMulti;
  EdgeMode edge_mode = EdgeMode::kDref;
  std::size_t expansion_order = 0;
  std::size_t graph_layers = 1;
  bool dref_scale_by_ratio = false;
  bool dref_same_pos_only = false;
  bool zero_init_classifier = false;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
  std::size_t input_dim() const { return context_dim + 3 * feature_dim + word_type_dim; }
  std::size_t effective_edge_dim() const { return edge_mode == EdgeMode::kNone ? 0 : edge_dim; }
  // Ablation row label, e.g. "c+gat+mg+dref" or "gcn+sg_1".
  std::string RowName() const;
};

struct ModelWeights {
  FeatureEmbeddings features;
  std::optional<DrefTable> dref;  // DREF edge modes only
  std::optional<BiLstmParams> lstm;
  std::optional<LinearParams> projection;  // replaces the BiLSTM when not contextual
  std::vector<GatLayerParams> gat;
  std::vector<GcnLayerParams> gcn;
  PoolingParams pooling;
  LinearParams classifier;  // graph_dim x kNumLabels
};

// Everything about a sentence that does not depend on parameters.
struct PreparedSentence {
  Sentence sentence;
  Tensor context;  // tokens x context_dim
  SubGraphSet subgraphs;
  // Sub-graphs fed to the network: all three, or just the SDP graph.
  std::vector<std::size_t> active;
  std::array<EdgeFeatureAssignment, 3> edges;
  std::array<Tensor, 3> masks;  // adjacency plus self-loops
  std::size_t e1_local = 0;     // entity head positions inside the SDP graph
  std::size_t e2_local = 0;
};

struct GraphTrace {
  SubGraphKind kind = SubGraphKind::kSdp;
  std::vector<std::size_t> vertices;
  std::vector<Tensor> attention;  // per layer and head (GAT only)
  Tensor pooling;                 // n x 1
};

struct ForwardTrace {
  std::vector<GraphTrace> graphs;
  Tensor entity1;  // 1 x graph_dim
  Tensor entity2;
  std::vector<Tensor> pooled;  // 1 x graph_dim each
  Tensor sentence;
  Tensor logits;
};

class Model {
 public:
  // Builds vocabularies (and the DREF table when needed) from `train` and
  // initializes every parameter from config.seed.
  static Model Create(std::span<const Sentence> train, const ModelConfig &config);
  // Fresh parameters for the given vocabularies and DREF table (required
  // exactly when the edge mode uses DREF), drawn from `rng`.
  static Model Initialize(const ModelConfig &config, VocabSet vocabs,
                          std::optional<DrefTable> dref, std::mt19937_64 &rng);
  // Assembles a model from stored parts.
  static Model FromParts(ModelConfig config, VocabSet vocabs, ModelWeights weights);

  const ModelConfig &config() const { return config_; }
  const VocabSet &vocabs() const { return vocabs_; }
  const ModelWeights &weights() const { return weights_; }
  ModelWeights &weights() { return weights_; }
  const DrefTable *dref() const { return weights_.dref ? &*weights_.dref : nullptr; }

  // Throws std::invalid_argument if the sentence has no parse or the
  // provider's dimension differs from config.context_dim.
  PreparedSentence Prepare(const Sentence &sentence, const EmbeddingProvider &provider) const;

  // 1 x kNumLabels logits. With a tracking binder gradients reach the
  // parameters; with a read-only binder the model is never written.
  Var Forward(const ParamBinder &bind, const PreparedSentence &prepared,
              ForwardTrace *trace = nullptr) const;
  // Cross-entropy against the gold label; throws std::invalid_argument if
  // the sentence is unlabeled.
  Var Loss(Tape &tape, const PreparedSentence &prepared);

  // Read-only; safe to call concurrently.
  Tensor Logits(const PreparedSentence &prepared, ForwardTrace *trace = nullptr) const;
  // Label index with the highest logit (lowest index on ties).
  std::size_t Predict(const PreparedSentence &prepared) const;

  // Every parameter exactly once, in a fixed order.
  std::vector<Parameter *> Parameters();
  std::vector<const Parameter *> Parameters() const;
  std::size_t NumScalars() const;

 private:
  Model() = default;
  void CheckWeights() const;

  ModelConfig config_;
  VocabSet vocabs_;
  ModelWeights weights_;
};

std::size_t ArgMax(const Tensor &values);

}  // namespace mgre

#endif  // MGRE_MODEL_H_
