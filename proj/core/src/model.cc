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

#include "mgre/model.h"

#include <random>
#include <stdexcept>

namespace mgre {

std::string_view GraphLayerName(GraphLayer layer) {
  return layer == GraphLayer::kGat ? "gat" : "gcn";
}

std::string_view GraphModeName(GraphMode mode) {
  return mode == GraphMode::kMulti ? "mg" : "sg";
}

GraphLayer ParseGraphLayer(std::string_view text) {
  if (text == "gat") return GraphLayer::kGat;
  if (text == "gcn") return GraphLayer::kGcn;
  throw std::invalid_argument("unknown graph layer '" + std::string(text) +
                              "' (expected gat or gcn)");
}

GraphMode ParseGraphMode(std::string_view text) {
  if (text == "mg" || text == "multi") return GraphMode::kMulti;
  if (text == "sg" || text == "single") return GraphMode::kSingle;
  throw std::invalid_argument("unknown graph mode '" + std::string(text) +
                              "' (expected multi or single)");
}

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw std::invalid_argument("invalid model config: " + what);
  };
  require(context_dim > 0, "context_dim must be positive");
  require(feature_dim > 0 && word_type_dim > 0, "feature dimensions must be positive");
  require(lstm_dim > 0, "lstm_dim must be positive");
  require(graph_dim > 0, "graph_dim must be positive");
  require(heads > 0, "heads must be positive");
  require(graph_layer != GraphLayer::kGat || graph_dim % heads == 0,
          "graph_dim " + std::to_string(graph_dim) + " is not divisible by " +
              std::to_string(heads) + " heads");
  require(edge_mode == EdgeMode::kNone || edge_dim > 0, "edge_dim must be positive");
  require(expansion_order <= 2, "expansion_order must be 0, 1 or 2");
  require(graph_layers >= 1, "graph_layers must be at least 1");
}

std::string ModelConfig::RowName() const {
  std::string name = contextual ? "c+" : "";
  name += GraphLayerName(graph_layer);
  name += "+";
  name += GraphModeName(graph_mode);
  switch (edge_mode) {
    case EdgeMode::kNone: break;
    case EdgeMode::kDref: name += "+dref"; break;
    case EdgeMode::kCtef: name += "+ctef"; break;
    case EdgeMode::kDrefCtef: name += "+ctef+dref"; break;
  }
  if (expansion_order > 0) name += "_" + std::to_string(expansion_order);
  return name;
}

// ---- construction ----------------------------------------------------------------

Model Model::Create(std::span<const Sentence> train, const ModelConfig &config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  VocabSet vocabs = BuildVocabs(train);
  std::optional<DrefTable> dref;
  if (UsesDref(config.edge_mode)) {
    dref = BuildDrefTable(train, config.edge_dim, rng, config.dref_same_pos_only);
  }
  return Initialize(config, std::move(vocabs), std::move(dref), rng);
}

Model Model::Initialize(const ModelConfig &config, VocabSet vocabs, std::optional<DrefTable> dref,
                        std::mt19937_64 &rng) {
  config.Validate();
  if (UsesDref(config.edge_mode) != dref.has_value()) {
    throw std::invalid_argument("a DREF table is required exactly for the DREF edge modes");
  }
  Model m;
  m.config_ = config;
  m.vocabs_ = std::move(vocabs);
  ModelWeights &w = m.weights_;
  w.dref = std::move(dref);
  w.features = FeatureEmbeddings::Create(m.vocabs_, {config.feature_dim, config.word_type_dim}, rng);
  const std::size_t encoded = 2 * config.lstm_dim;
  if (config.contextual) {
    w.lstm = BiLstmParams::Create("lstm", config.input_dim(), config.lstm_dim, rng);
  } else {
    w.projection = LinearParams::Create("projection", config.input_dim(), encoded, rng);
  }
  const std::size_t d_e = config.effective_edge_dim();
  for (std::size_t l = 0; l < config.graph_layers; ++l) {
    const std::size_t in = l == 0 ? encoded : config.graph_dim;
    const std::string name = "graph" + std::to_string(l);
    if (config.graph_layer == GraphLayer::kGat) {
      w.gat.push_back(GatLayerParams::Create(name, in, config.graph_dim, config.heads, d_e, rng));
    } else {
      w.gcn.push_back(GcnLayerParams::Create(name, in, config.graph_dim, d_e, rng));
    }
  }
  w.pooling = PoolingParams::Create("pooling", config.graph_dim, rng);
  w.classifier = LinearParams::Create("classifier", config.graph_dim, kNumLabels, rng,
                                      config.zero_init_classifier);
  m.CheckWeights();
  return m;
}

Model Model::FromParts(ModelConfig config, VocabSet vocabs, ModelWeights weights) {
  config.Validate();
  Model m;
  m.config_ = std::move(config);
  m.vocabs_ = std::move(vocabs);
  m.weights_ = std::move(weights);
  m.CheckWeights();
  return m;
}

void Model::CheckWeights() const {
  const ModelConfig &c = config_;
  const ModelWeights &w = weights_;
  auto expect = [](const Parameter &p, Shape shape) {
    if (p.value.shape() != shape) throw ShapeError(p.name, p.value.shape(), shape);
  };
  expect(w.features.pos, {vocabs_.pos.size(), c.feature_dim});
  expect(w.features.deprel, {vocabs_.deprel.size(), c.feature_dim});
  expect(w.features.ner, {vocabs_.ner.size(), c.feature_dim});
  expect(w.features.word_type, {2, c.word_type_dim});
  if (UsesDref(c.edge_mode) != w.dref.has_value()) {
    throw std::invalid_argument("DREF table presence does not match the edge mode");
  }
  if (w.dref) expect(w.dref->embeddings, {w.dref->embeddings.value.rows(), c.edge_dim});
  const std::size_t encoded = 2 * c.lstm_dim;
  if (c.contextual != w.lstm.has_value() || c.contextual == w.projection.has_value()) {
    throw std::invalid_argument("encoder parameters do not match the contextual flag");
  }
  if (w.lstm) {
    for (const LstmParams *p : {&w.lstm->forward, &w.lstm->backward}) {
      expect(p->input_weight, {c.input_dim(), 4 * c.lstm_dim});
      expect(p->hidden_weight, {c.lstm_dim, 4 * c.lstm_dim});
      expect(p->bias, {1, 4 * c.lstm_dim});
    }
  }
  if (w.projection) {
    expect(w.projection->weight, {c.input_dim(), encoded});
    expect(w.projection->bias, {1, encoded});
  }
  const bool gat = c.graph_layer == GraphLayer::kGat;
  const std::size_t layers = gat ? w.gat.size() : w.gcn.size();
  if (layers != c.graph_layers || (gat ? !w.gcn.empty() : !w.gat.empty())) {
    throw std::invalid_argument("graph layer parameters do not match the config");
  }
  const std::size_t d_e = c.effective_edge_dim();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? encoded : c.graph_dim;
    if (gat) {
      if (w.gat[l].heads.size() != c.heads) throw std::invalid_argument("head count mismatch");
      const std::size_t m = c.graph_dim / c.heads;
      for (const GatHeadParams &h : w.gat[l].heads) {
        expect(h.weight, {in, m});
        expect(h.attention, {1, 2 * m + d_e});
      }
    } else {
      expect(w.gcn[l].weight, {in + d_e, c.graph_dim});
      if (w.gcn[l].edge_dim != d_e) throw std::invalid_argument("GCN edge dimension mismatch");
    }
  }
  expect(w.pooling.weight, {c.graph_dim, 1});
  expect(w.classifier.weight, {c.graph_dim, kNumLabels});
  expect(w.classifier.bias, {1, kNumLabels});
}

// ---- preparation -------------------------------------------------------------------

PreparedSentence Model::Prepare(const Sentence &sentence,
                                const EmbeddingProvider &provider) const {
  if (!sentence.has_parse()) {
    throw std::invalid_argument("sentence " + sentence.id + " has no dependency parse");
  }
  if (provider.dim() != config_.context_dim) {
    throw std::invalid_argument("embedding provider dimension " + std::to_string(provider.dim()) +
                                " differs from context_dim " +
                                std::to_string(config_.context_dim));
  }
  PreparedSentence p;
  p.sentence = sentence;
  p.context = provider.Embed(sentence);
  p.subgraphs = DeriveSubGraphs(sentence, config_.expansion_order);
  p.active = config_.graph_mode == GraphMode::kMulti ? std::vector<std::size_t>{0, 1, 2}
                                                     : std::vector<std::size_t>{0};
  for (std::size_t g : p.active) {
    const SubGraph &sg = p.subgraphs.graphs[g];
    const std::size_t n = sg.size();
    p.masks[g] = Tensor({n, n});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        p.masks[g].at(i, j) = (i == j || sg.adjacency[i][j]) ? 1.0 : 0.0;
      }
    }
    if (config_.edge_mode != EdgeMode::kNone) {
      p.edges[g] = AssignEdgeFeatures(config_.edge_mode, sg, sentence, dref(), config_.edge_dim,
                                      config_.dref_scale_by_ratio);
    }
  }
  const SubGraph &sdp = p.subgraphs.sdp();
  auto e1 = sdp.LocalIndex(sentence.e1.head_token);
  auto e2 = sdp.LocalIndex(sentence.e2.head_token);
  if (!e1 || !e2) throw std::logic_error("entity head token missing from the SDP graph");
  p.e1_local = *e1;
  p.e2_local = *e2;
  return p;
}

// ---- forward ---------------------------------------------------------------------------

Var Model::Forward(const ParamBinder &bind, const PreparedSentence &p, ForwardTrace *trace) const {
  const ModelWeights &w = weights_;
  std::vector<Var> pooled;
  Var h_e1, h_e2;
  for (std::size_t g : p.active) {
    const SubGraph &sg = p.subgraphs.graphs[g];
    GraphTrace *gt = nullptr;
    if (trace != nullptr) {
      trace->graphs.push_back({sg.kind, sg.vertices, {}, {}});
      gt = &trace->graphs.back();
    }
    Var x = EncodeTokens(bind, p.sentence, sg, p.context, w.features, vocabs_);
    Var h = w.lstm ? BiLstmEncode(bind, x, *w.lstm) : Linear(bind, x, *w.projection);
    Var edges;
    if (config_.edge_mode != EdgeMode::kNone) edges = EdgeFeatureMatrix(bind, p.edges[g], dref());
    for (std::size_t l = 0; l < config_.graph_layers; ++l) {
      if (config_.graph_layer == GraphLayer::kGat) {
        h = GatLayer(bind, h, w.gat[l], p.masks[g], edges, gt ? &gt->attention : nullptr);
      } else {
        h = GcnLayer(bind, h, w.gcn[l], p.masks[g], edges);
      }
    }
    std::vector<Tensor> pool_weights;
    pooled.push_back(PoolGraph(bind, h, w.pooling, gt ? &pool_weights : nullptr));
    if (gt) gt->pooling = pool_weights.front();
    if (g == 0) {
      h_e1 = Slice(h, 0, p.e1_local, 1);
      h_e2 = Slice(h, 0, p.e2_local, 1);
    }
  }
  Var v = ComposeSentence(pooled, h_e1, h_e2);
  Var logits = Linear(bind, v, w.classifier);
  if (trace != nullptr) {
    trace->entity1 = h_e1.value();
    trace->entity2 = h_e2.value();
    for (const Var &pv : pooled) trace->pooled.push_back(pv.value());
    trace->sentence = v.value();
    trace->logits = logits.value();
  }
  return logits;
}

Var Model::Loss(Tape &tape, const PreparedSentence &p) {
  if (!p.sentence.label) {
    throw std::invalid_argument("sentence " + p.sentence.id + " has no gold label");
  }
  return CrossEntropy(Forward(ParamBinder(tape, true), p), p.sentence.label->index());
}

Tensor Model::Logits(const PreparedSentence &p, ForwardTrace *trace) const {
  Tape tape;
  return Forward(ParamBinder(tape, false), p, trace).value();
}

std::size_t ArgMax(const Tensor &values) {
  if (values.size() == 0) throw std::invalid_argument("argmax of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t Model::Predict(const PreparedSentence &p) const { return ArgMax(Logits(p)); }

// ---- parameters ----------------------------------------------------------------------------

std::vector<Parameter *> Model::Parameters() {
  ModelWeights &w = weights_;
  std::vector<Parameter *> out = {&w.features.pos, &w.features.deprel, &w.features.ner,
                                  &w.features.word_type};
  if (w.dref) out.push_back(&w.dref->embeddings);
  if (w.lstm) w.lstm->Collect(out);
  if (w.projection) w.projection->Collect(out);
  for (auto &layer : w.gat) layer.Collect(out);
  for (auto &layer : w.gcn) layer.Collect(out);
  w.pooling.Collect(out);
  w.classifier.Collect(out);
  return out;
}

std::vector<const Parameter *> Model::Parameters() const {
  std::vector<Parameter *> all = const_cast<Model *>(this)->Parameters();
  return {all.begin(), all.end()};
}

std::size_t Model::NumScalars() const {
  std::size_t total = 0;
  for (const Parameter *p : Parameters()) total += p->value.size();
  return total;
}

}  // namespace mgre
