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

// Token input encodings and edge features.
//
// A token is encoded as [context ; pos ; deprel ; ner ; word-type], where the
// context vector comes from an EmbeddingProvider and the other blocks are
// trainable lookup tables.
//
// Edge features come in two flavours:
//  * DREF: one trainable vector per (head POS, dependent POS, deprel) triple
//    observed in the training corpus, with the triple's share of all counted
//    arcs kept alongside. Unseen triples use an UNK row and self-loops a
//    dedicated row.
//  * CTEF: for vertex i attending to vertex j, all ones if j is a token of
//    either entity mention, all zeros otherwise.

#ifndef MGRE_FEATURES_H_
#define MGRE_FEATURES_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mgre/autodiff.h"
#include "mgre/corpus.h"
#include "mgre/graph.h"
#include "mgre/vocab.h"

namespace mgre {

// ---- contextual embeddings -------------------------------------------------

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // One row per token of the sentence.
  virtual Tensor Embed(const Sentence &sentence) const = 0;
};

// Deterministic stand-in: each surface form maps to a pseudo-random vector
// with unit variance, seeded by (surface, seed).
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(std::size_t dim, std::uint64_t seed);
  std::size_t dim() const override { return dim_; }
  Tensor Embed(const Sentence &sentence) const override;
  std::vector<double> EmbedSurface(std::string_view surface) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Vectors computed offline, one record per line:
//   instance_id \t token_index \t v1 v2 ... vD
class PrecomputedEmbeddingProvider : public EmbeddingProvider {
 public:
  // Throws ParseError on malformed records or inconsistent dimensions.
  static PrecomputedEmbeddingProvider Parse(std::string_view text);
  static PrecomputedEmbeddingProvider Load(const std::string &path);

  std::size_t dim() const override { return dim_; }
  std::size_t num_records() const { return vectors_.size(); }
  // Throws std::runtime_error naming the instance and token when a vector
  // is missing.
  Tensor Embed(const Sentence &sentence) const override;

 private:
  std::size_t dim_ = 0;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> vectors_;
};

// ---- token features -----------------------------------------------------------

struct FeatureDims {
  std::size_t feature = 40;    // pos, deprel and ner tables
  std::size_t word_type = 10;
};

inline constexpr std::size_t kNonEntityRow = 0;
inline constexpr std::size_t kEntityRow = 1;

struct FeatureEmbeddings {
  Parameter pos;
  Parameter deprel;
  Parameter ner;
  Parameter word_type;  // 2 rows: non-entity, entity

  static FeatureEmbeddings Create(const VocabSet &vocabs, const FeatureDims &dims,
                                  std::mt19937_64 &rng);
  std::size_t output_dim() const;
};

// Per-vertex input vectors of one sub-graph, rows in sub-graph vertex order.
// `context` holds one row per sentence token. Throws std::logic_error if the
// vocabularies are not frozen.
Var EncodeTokens(const ParamBinder &bind, const Sentence &sentence, const SubGraph &subgraph,
                 const Tensor &context, const FeatureEmbeddings &embeddings,
                 const VocabSet &vocabs);

// ---- DREF -----------------------------------------------------------------------

struct DrefTriple {
  std::string head_pos;
  std::string dep_pos;
  std::string deprel;

  friend auto operator<=>(const DrefTriple &, const DrefTriple &) = default;
  std::string ToString() const;  // "HEAD|DEP|REL"
};

struct DrefEntry {
  std::size_t count = 0;
  double ratio = 0.0;
  std::size_t row = 0;  // row in the embedding table
};

class DrefTable {
 public:
  static constexpr std::size_t kUnkRow = 0;
  static constexpr std::size_t kSelfLoopRow = 1;
  static constexpr std::size_t kFirstTripleRow = 2;

  DrefTable() = default;

  const std::map<DrefTriple, DrefEntry> &entries() const { return entries_; }
  std::size_t total() const { return total_; }
  std::size_t dim() const { return embeddings.value.cols(); }
  bool same_pos_only() const { return same_pos_only_; }
  const DrefEntry *Find(const DrefTriple &triple) const;
  // Embedding row for a triple; kUnkRow if unseen.
  std::size_t RowFor(const DrefTriple &triple) const;

  // kFirstTripleRow + entries rows, `dim` columns.
  Parameter embeddings;

  // Rebuilds a table from stored counts (checkpoint loading); ratios and rows
  // are recomputed exactly as BuildDrefTable does.
  static DrefTable FromCounts(std::map<DrefTriple, std::size_t> counts, bool same_pos_only,
                              Tensor embeddings);

 private:
  friend DrefTable BuildDrefTable(std::span<const Sentence>, std::size_t, std::mt19937_64 &,
                                  bool);
  std::map<DrefTriple, DrefEntry> entries_;
  std::size_t total_ = 0;
  bool same_pos_only_ = false;
};

// Counts one triple per dependency arc over the training sentences. When
// `same_pos_only` is set only arcs whose endpoints share a POS tag are
// counted. Throws std::invalid_argument on an empty corpus or one without
// any countable arc.
DrefTable BuildDrefTable(std::span<const Sentence> train, std::size_t dim, std::mt19937_64 &rng,
                         bool same_pos_only = false);

// ---- edge feature assignment -------------------------------------------------------

enum class EdgeMode { kNone, kDref, kCtef, kDrefCtef };

std::string_view EdgeModeName(EdgeMode mode);
// Accepts none, dref, ctef, dref+ctef (and ctef+dref). Throws
// std::invalid_argument otherwise.
EdgeMode ParseEdgeMode(std::string_view text);

inline bool UsesDref(EdgeMode m) { return m == EdgeMode::kDref || m == EdgeMode::kDrefCtef; }
inline bool UsesCtef(EdgeMode m) { return m == EdgeMode::kCtef || m == EdgeMode::kDrefCtef; }

// Features for every ordered vertex pair (i attends to j) of one sub-graph,
// stored row-major over n x n pairs. Only pairs with defined(i, j) set (tree
// edges and self-loops) are meaningful.
struct EdgeFeatureAssignment {
  EdgeMode mode = EdgeMode::kNone;
  std::size_t num_vertices = 0;
  std::size_t dim = 0;
  std::vector<std::uint8_t> defined;
  std::vector<std::size_t> dref_rows;   // DREF modes
  std::vector<double> dref_weights;     // DREF modes: 1, or the triple ratio
  std::vector<std::uint8_t> ctef_ones;  // CTEF modes

  std::size_t pair(std::size_t i, std::size_t j) const { return i * num_vertices + j; }
  // The d_e vector for (i, j). DREF modes read rows of `dref_table`.
  std::vector<double> Feature(std::size_t i, std::size_t j, const Tensor *dref_table) const;
};

// Throws std::invalid_argument if a sub-graph edge is not a parse arc.
EdgeFeatureAssignment DrefEdgeFeatures(const SubGraph &subgraph, const Sentence &sentence,
                                       const DrefTable &table, bool scale_by_ratio = false);
EdgeFeatureAssignment CtefEdgeFeatures(const SubGraph &subgraph, const EntitySpan &e1,
                                       const EntitySpan &e2, std::size_t dim);
// DREF+CTEF: the two vectors are summed.
EdgeFeatureAssignment CombineEdgeFeatures(const EdgeFeatureAssignment &dref,
                                          const EdgeFeatureAssignment &ctef);
EdgeFeatureAssignment AssignEdgeFeatures(EdgeMode mode, const SubGraph &subgraph,
                                         const Sentence &sentence, const DrefTable *table,
                                         std::size_t dim, bool scale_by_ratio = false);

// Materializes the (n*n) x d_e feature matrix on the tape. DREF rows are
// gathered from the trainable table so gradients reach it.
Var EdgeFeatureMatrix(const ParamBinder &bind, const EdgeFeatureAssignment &assignment,
                      const DrefTable *table);

}  // namespace mgre

#endif  // MGRE_FEATURES_H_
