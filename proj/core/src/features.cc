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

#include "mgre/features.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mgre {

namespace {

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool ParseDouble(std::string_view s, double &out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

// ---- providers -------------------------------------------------------------------

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<double> HashEmbeddingProvider::EmbedSurface(std::string_view surface) const {
  std::mt19937_64 rng(Fnv1a(surface) ^ (seed_ * 0x9e3779b97f4a7c15ULL));
  const double bound = std::sqrt(3.0);  // uniform on [-sqrt 3, sqrt 3] has unit variance
  std::vector<double> v(dim_);
  for (double &x : v) x = (2.0 * Canonical(rng) - 1.0) * bound;
  return v;
}

Tensor HashEmbeddingProvider::Embed(const Sentence &sentence) const {
  Tensor out({sentence.tokens.size(), dim_});
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    std::vector<double> v = EmbedSurface(sentence.tokens[i].surface);
    std::copy(v.begin(), v.end(), out.data() + i * dim_);
  }
  return out;
}

PrecomputedEmbeddingProvider PrecomputedEmbeddingProvider::Parse(std::string_view text) {
  PrecomputedEmbeddingProvider p;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == line.npos ? line.npos : line.find('\t', t1 + 1);
    if (t2 == line.npos) throw ParseError(0, line_no, "expected instance_id, token_index, vector");
    std::string id(line.substr(0, t1));
    std::string_view index_text = line.substr(t1 + 1, t2 - t1 - 1);
    std::size_t token = 0;
    auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), token);
    if (ec != std::errc() || ptr != index_text.data() + index_text.size()) {
      throw ParseError(0, line_no, "bad token index");
    }
    std::vector<double> values;
    std::string_view rest = line.substr(t2 + 1);
    std::size_t i = 0;
    while (i < rest.size()) {
      while (i < rest.size() && rest[i] == ' ') ++i;
      std::size_t start = i;
      while (i < rest.size() && rest[i] != ' ') ++i;
      if (i == start) break;
      double v = 0.0;
      if (!ParseDouble(rest.substr(start, i - start), v)) {
        throw ParseError(0, line_no, "bad vector component '" +
                                         std::string(rest.substr(start, i - start)) + "'");
      }
      values.push_back(v);
    }
    if (values.empty()) throw ParseError(0, line_no, "empty vector");
    if (p.dim_ == 0) p.dim_ = values.size();
    if (values.size() != p.dim_) {
      throw ParseError(0, line_no,
                       "vector has " + std::to_string(values.size()) + " components, expected " +
                           std::to_string(p.dim_));
    }
    p.vectors_[{std::move(id), token}] = std::move(values);
  }
  return p;
}

PrecomputedEmbeddingProvider PrecomputedEmbeddingProvider::Load(const std::string &path) {
  return Parse(ReadFile(path));
}

Tensor PrecomputedEmbeddingProvider::Embed(const Sentence &sentence) const {
  Tensor out({sentence.tokens.size(), dim_});
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    auto it = vectors_.find({sentence.id, i});
    if (it == vectors_.end()) {
      throw std::runtime_error("no precomputed embedding for instance " + sentence.id +
                               ", token " + std::to_string(i));
    }
    std::copy(it->second.begin(), it->second.end(), out.data() + i * dim_);
  }
  return out;
}

// ---- token features -------------------------------------------------------------------

FeatureEmbeddings FeatureEmbeddings::Create(const VocabSet &vocabs, const FeatureDims &dims,
                                            std::mt19937_64 &rng) {
  auto table = [&](const char *name, std::size_t rows, std::size_t cols) {
    Parameter p(name, Tensor({rows, cols}));
    InitUniformFanIn(p.value, cols, rng);
    return p;
  };
  FeatureEmbeddings e;
  e.pos = table("emb.pos", vocabs.pos.size(), dims.feature);
  e.deprel = table("emb.deprel", vocabs.deprel.size(), dims.feature);
  e.ner = table("emb.ner", vocabs.ner.size(), dims.feature);
  e.word_type = table("emb.word_type", 2, dims.word_type);
  return e;
}

std::size_t FeatureEmbeddings::output_dim() const {
  return pos.value.cols() + deprel.value.cols() + ner.value.cols() + word_type.value.cols();
}

Var EncodeTokens(const ParamBinder &bind, const Sentence &sentence, const SubGraph &subgraph,
                 const Tensor &context, const FeatureEmbeddings &embeddings,
                 const VocabSet &vocabs) {
  Tape &tape = bind.tape();
  if (!vocabs.pos.frozen() || !vocabs.deprel.frozen() || !vocabs.ner.frozen()) {
    throw std::logic_error("vocabularies must be frozen before encoding");
  }
  if (context.rows() != sentence.tokens.size()) {
    throw ShapeError("context embeddings have " + std::to_string(context.rows()) +
                     " rows for a sentence of " + std::to_string(sentence.tokens.size()) +
                     " tokens");
  }
  const std::size_t n = subgraph.size();
  const std::size_t d_ctx = context.cols();
  Tensor ctx({n, d_ctx});
  std::vector<std::size_t> pos(n), dep(n), ner(n), wt(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t tok = subgraph.vertices[k];
    const Token &t = sentence.tokens.at(tok);
    std::copy_n(context.data() + tok * d_ctx, d_ctx, ctx.data() + k * d_ctx);
    pos[k] = vocabs.pos.Lookup(t.pos);
    dep[k] = vocabs.deprel.Lookup(t.deprel);
    ner[k] = vocabs.ner.Lookup(t.ner);
    wt[k] = sentence.IsEntityToken(tok) ? kEntityRow : kNonEntityRow;
  }
  return Concat({tape.Constant(std::move(ctx)),
                 GatherRows(bind(embeddings.pos), pos),
                 GatherRows(bind(embeddings.deprel), dep),
                 GatherRows(bind(embeddings.ner), ner),
                 GatherRows(bind(embeddings.word_type), wt)},
                1);
}

// ---- DREF --------------------------------------------------------------------------------

std::string DrefTriple::ToString() const { return head_pos + "|" + dep_pos + "|" + deprel; }

const DrefEntry *DrefTable::Find(const DrefTriple &triple) const {
  auto it = entries_.find(triple);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t DrefTable::RowFor(const DrefTriple &triple) const {
  const DrefEntry *e = Find(triple);
  return e == nullptr ? kUnkRow : e->row;
}

namespace {

void AssignRatiosAndRows(std::map<DrefTriple, DrefEntry> &entries, std::size_t total) {
  std::size_t row = DrefTable::kFirstTripleRow;
  for (auto &[triple, entry] : entries) {
    entry.ratio = static_cast<double>(entry.count) / static_cast<double>(total);
    entry.row = row++;
  }
}

}  // namespace

DrefTable BuildDrefTable(std::span<const Sentence> train, std::size_t dim, std::mt19937_64 &rng,
                         bool same_pos_only) {
  if (train.empty()) throw std::invalid_argument("cannot build DREF table from an empty corpus");
  DrefTable table;
  table.same_pos_only_ = same_pos_only;
  for (const Sentence &s : train) {
    for (const Token &dep : s.tokens) {
      if (!dep.head.has_value()) continue;
      const Token &head = s.tokens.at(*dep.head);
      if (same_pos_only && head.pos != dep.pos) continue;
      ++table.entries_[{head.pos, dep.pos, dep.deprel}].count;
      ++table.total_;
    }
  }
  if (table.total_ == 0) throw std::invalid_argument("no dependency arcs to count");
  AssignRatiosAndRows(table.entries_, table.total_);
  table.embeddings = Parameter("dref.embeddings",
                               Tensor({DrefTable::kFirstTripleRow + table.entries_.size(), dim}));
  InitUniformFanIn(table.embeddings.value, dim, rng);
  return table;
}

DrefTable DrefTable::FromCounts(std::map<DrefTriple, std::size_t> counts, bool same_pos_only,
                                Tensor embeddings) {
  DrefTable table;
  table.same_pos_only_ = same_pos_only;
  for (auto &[triple, count] : counts) {
    if (count == 0) throw std::invalid_argument("DREF triple with zero count");
    table.entries_[triple].count = count;
    table.total_ += count;
  }
  AssignRatiosAndRows(table.entries_, table.total_);
  if (embeddings.rank() != 2 || embeddings.rows() != kFirstTripleRow + table.entries_.size()) {
    throw ShapeError("DREF embedding table of shape " + ShapeString(embeddings.shape()) +
                     " does not match " + std::to_string(table.entries_.size()) + " triples");
  }
  table.embeddings = Parameter("dref.embeddings", std::move(embeddings));
  return table;
}

// ---- edge features ---------------------------------------------------------------------------

std::string_view EdgeModeName(EdgeMode mode) {
  switch (mode) {
    case EdgeMode::kNone: return "none";
    case EdgeMode::kDref: return "dref";
    case EdgeMode::kCtef: return "ctef";
    case EdgeMode::kDrefCtef: return "dref+ctef";
  }
  return "?";
}

EdgeMode ParseEdgeMode(std::string_view text) {
  if (text == "none") return EdgeMode::kNone;
  if (text == "dref") return EdgeMode::kDref;
  if (text == "ctef") return EdgeMode::kCtef;
  if (text == "dref+ctef" || text == "ctef+dref") return EdgeMode::kDrefCtef;
  throw std::invalid_argument("unknown edge mode '" + std::string(text) +
                              "' (expected none, dref, ctef or dref+ctef)");
}

namespace {

std::vector<std::uint8_t> DefinedPairs(const SubGraph &sg) {
  const std::size_t n = sg.size();
  std::vector<std::uint8_t> defined(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    defined[i * n + i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (sg.adjacency[i][j]) defined[i * n + j] = 1;
    }
  }
  return defined;
}

}  // namespace

std::vector<double> EdgeFeatureAssignment::Feature(std::size_t i, std::size_t j,
                                                   const Tensor *dref_table) const {
  std::vector<double> v(dim, 0.0);
  const std::size_t p = pair(i, j);
  if (UsesDref(mode)) {
    if (dref_table == nullptr) throw std::invalid_argument("DREF features need the table");
    for (std::size_t c = 0; c < dim; ++c) v[c] += dref_weights[p] * dref_table->at(dref_rows[p], c);
  }
  if (UsesCtef(mode) && ctef_ones[p]) {
    for (double &x : v) x += 1.0;
  }
  return v;
}

EdgeFeatureAssignment DrefEdgeFeatures(const SubGraph &subgraph, const Sentence &sentence,
                                       const DrefTable &table, bool scale_by_ratio) {
  const std::size_t n = subgraph.size();
  EdgeFeatureAssignment a;
  a.mode = EdgeMode::kDref;
  a.num_vertices = n;
  a.dim = table.dim();
  a.defined = DefinedPairs(subgraph);
  a.dref_rows.assign(n * n, DrefTable::kUnkRow);
  a.dref_weights.assign(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) a.dref_rows[a.pair(i, i)] = DrefTable::kSelfLoopRow;
  for (const auto &[u, v] : subgraph.edges) {
    std::size_t tu = subgraph.vertices[u], tv = subgraph.vertices[v];
    const Token &x = sentence.tokens.at(tu);
    const Token &y = sentence.tokens.at(tv);
    const Token *head = nullptr;
    const Token *dep = nullptr;
    if (y.head == tu) {
      head = &x;
      dep = &y;
    } else if (x.head == tv) {
      head = &y;
      dep = &x;
    } else {
      throw std::invalid_argument("edge (" + std::to_string(tu) + ", " + std::to_string(tv) +
                                  ") is not a dependency arc of sentence " + sentence.id);
    }
    const DrefTriple triple{head->pos, dep->pos, dep->deprel};
    const DrefEntry *entry = table.Find(triple);
    const std::size_t row = entry == nullptr ? DrefTable::kUnkRow : entry->row;
    const double weight = scale_by_ratio && entry != nullptr ? entry->ratio : 1.0;
    for (std::size_t p : {a.pair(u, v), a.pair(v, u)}) {
      a.dref_rows[p] = row;
      a.dref_weights[p] = weight;
    }
  }
  return a;
}

EdgeFeatureAssignment CtefEdgeFeatures(const SubGraph &subgraph, const EntitySpan &e1,
                                       const EntitySpan &e2, std::size_t dim) {
  const std::size_t n = subgraph.size();
  EdgeFeatureAssignment a;
  a.mode = EdgeMode::kCtef;
  a.num_vertices = n;
  a.dim = dim;
  a.defined = DefinedPairs(subgraph);
  a.ctef_ones.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t source = subgraph.vertices[j];
      if (a.defined[a.pair(i, j)] && (e1.Contains(source) || e2.Contains(source))) {
        a.ctef_ones[a.pair(i, j)] = 1;
      }
    }
  }
  return a;
}

EdgeFeatureAssignment CombineEdgeFeatures(const EdgeFeatureAssignment &dref,
                                          const EdgeFeatureAssignment &ctef) {
  if (dref.num_vertices != ctef.num_vertices || dref.dim != ctef.dim) {
    throw std::invalid_argument("cannot combine edge features of different sub-graphs or sizes");
  }
  EdgeFeatureAssignment a = dref;
  a.mode = EdgeMode::kDrefCtef;
  a.ctef_ones = ctef.ctef_ones;
  return a;
}

EdgeFeatureAssignment AssignEdgeFeatures(EdgeMode mode, const SubGraph &subgraph,
                                         const Sentence &sentence, const DrefTable *table,
                                         std::size_t dim, bool scale_by_ratio) {
  if (UsesDref(mode) && table == nullptr) {
    throw std::invalid_argument("DREF edge features need a DREF table");
  }
  switch (mode) {
    case EdgeMode::kNone: {
      EdgeFeatureAssignment a;
      a.num_vertices = subgraph.size();
      a.defined = DefinedPairs(subgraph);
      return a;
    }
    case EdgeMode::kDref:
      return DrefEdgeFeatures(subgraph, sentence, *table, scale_by_ratio);
    case EdgeMode::kCtef:
      return CtefEdgeFeatures(subgraph, sentence.e1, sentence.e2, dim);
    case EdgeMode::kDrefCtef:
      return CombineEdgeFeatures(DrefEdgeFeatures(subgraph, sentence, *table, scale_by_ratio),
                                 CtefEdgeFeatures(subgraph, sentence.e1, sentence.e2, table->dim()));
  }
  throw std::logic_error("unhandled edge mode");
}

Var EdgeFeatureMatrix(const ParamBinder &bind, const EdgeFeatureAssignment &a,
                      const DrefTable *table) {
  Tape &tape = bind.tape();
  const std::size_t pairs = a.num_vertices * a.num_vertices;
  if (a.mode == EdgeMode::kNone) throw std::logic_error("no edge features in mode none");
  Var out;
  if (UsesDref(a.mode)) {
    if (table == nullptr) throw std::invalid_argument("DREF features need the table");
    out = GatherRows(bind(table->embeddings), a.dref_rows);
    bool scaled = std::any_of(a.dref_weights.begin(), a.dref_weights.end(),
                              [](double w) { return w != 1.0; });
    if (scaled) {
      Tensor w({pairs, a.dim});
      for (std::size_t p = 0; p < pairs; ++p) {
        for (std::size_t c = 0; c < a.dim; ++c) w[p * a.dim + c] = a.dref_weights[p];
      }
      out = Mul(out, tape.Constant(std::move(w)));
    }
  }
  if (UsesCtef(a.mode)) {
    Tensor ones({pairs, a.dim});
    for (std::size_t p = 0; p < pairs; ++p) {
      if (a.ctef_ones[p]) std::fill_n(ones.data() + p * a.dim, a.dim, 1.0);
    }
    Var ctef = tape.Constant(std::move(ones));
    out = out.valid() ? Add(out, ctef) : ctef;
  }
  return out;
}

}  // namespace mgre
