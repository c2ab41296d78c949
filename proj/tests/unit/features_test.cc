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

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "synthetic.h"

namespace mgre {
namespace {

// Independent recount keyed by "HEAD|DEP|REL": walk every head token and
// collect the tokens that point at it.
std::map<std::string, std::size_t> Recount(const std::vector<Sentence> &corpus, bool same_pos) {
  std::map<std::string, std::size_t> counts;
  for (const Sentence &s : corpus) {
    for (std::size_t h = 0; h < s.size(); ++h) {
      for (std::size_t d = 0; d < s.size(); ++d) {
        if (s.tokens[d].head != h) continue;
        if (same_pos && s.tokens[h].pos != s.tokens[d].pos) continue;
        ++counts[s.tokens[h].pos + "|" + s.tokens[d].pos + "|" + s.tokens[d].deprel];
      }
    }
  }
  return counts;
}

std::vector<Sentence> Corpus50() {
  testing::SyntheticOptions opts;
  opts.sentences = 50;
  opts.seed = 3;
  opts.patterns = {0, 1, 2, 3, 4, 5};
  return testing::SyntheticCorpus(opts);
}

TEST(DrefTableTest, CountsAndRatiosMatchRecount) {
  std::vector<Sentence> corpus = Corpus50();
  std::mt19937_64 rng(1);
  DrefTable table = BuildDrefTable(corpus, 8, rng);
  std::map<std::string, std::size_t> expected = Recount(corpus, false);
  std::size_t total = 0;
  for (const auto &[k, c] : expected) total += c;
  EXPECT_EQ(table.total(), total);
  ASSERT_EQ(table.entries().size(), expected.size());
  double ratio_sum = 0.0;
  for (const auto &[triple, entry] : table.entries()) {
    ASSERT_TRUE(expected.contains(triple.ToString())) << triple.ToString();
    EXPECT_EQ(entry.count, expected.at(triple.ToString()));
    EXPECT_DOUBLE_EQ(entry.ratio, static_cast<double>(entry.count) / total);
    ratio_sum += entry.ratio;
  }
  EXPECT_NEAR(ratio_sum, 1.0, 1e-9);
}

TEST(DrefTableTest, RowsFollowTripleOrderAfterReservedRows) {
  std::vector<Sentence> corpus = Corpus50();
  std::mt19937_64 rng(1);
  DrefTable table = BuildDrefTable(corpus, 8, rng);
  std::size_t row = DrefTable::kFirstTripleRow;
  for (const auto &[triple, entry] : table.entries()) EXPECT_EQ(entry.row, row++);
  EXPECT_EQ(table.embeddings.value.rows(), row);
  EXPECT_EQ(table.dim(), 8u);
  EXPECT_EQ(table.embeddings.name, "dref.embeddings");
  EXPECT_EQ(table.RowFor({"NOUN", "NOUN", "nonexistent"}), DrefTable::kUnkRow);
}

TEST(DrefTableTest, RidgesSentenceTriples) {
  std::vector<Sentence> one = {testing::RidgesSentence()};
  std::mt19937_64 rng(1);
  DrefTable table = BuildDrefTable(one, 4, rng);
  EXPECT_EQ(table.total(), 5u);
  const DrefEntry *e = table.Find({"VERB", "NOUN", "nsubj"});
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->count, 1u);
  EXPECT_DOUBLE_EQ(e->ratio, 0.2);
  // Oriented head -> dependent only.
  EXPECT_EQ(table.Find({"NOUN", "VERB", "nsubj"}), nullptr);
}

TEST(DrefTableTest, SamePosRestriction) {
  std::vector<Sentence> corpus = Corpus50();
  std::mt19937_64 rng(1);
  // The synthetic corpus has NOUN -> NOUN arcs (nmod) but few others.
  DrefTable table = BuildDrefTable(corpus, 4, rng, true);
  EXPECT_TRUE(table.same_pos_only());
  std::map<std::string, std::size_t> expected = Recount(corpus, true);
  ASSERT_EQ(table.entries().size(), expected.size());
  for (const auto &[triple, entry] : table.entries()) {
    EXPECT_EQ(triple.head_pos, triple.dep_pos);
    EXPECT_EQ(entry.count, expected.at(triple.ToString()));
  }
  std::vector<Sentence> three = {testing::ThreeTokenSentence()};
  EXPECT_THROW(BuildDrefTable(three, 4, rng, true), std::invalid_argument);
  EXPECT_THROW(BuildDrefTable(std::vector<Sentence>{}, 4, rng), std::invalid_argument);
}

TEST(DrefTableTest, FromCountsRebuildsIdentically) {
  std::vector<Sentence> corpus = Corpus50();
  std::mt19937_64 rng(1);
  DrefTable table = BuildDrefTable(corpus, 4, rng);
  std::map<DrefTriple, std::size_t> counts;
  for (const auto &[t, e] : table.entries()) counts[t] = e.count;
  DrefTable again = DrefTable::FromCounts(counts, false, table.embeddings.value);
  EXPECT_EQ(again.total(), table.total());
  for (const auto &[t, e] : table.entries()) {
    EXPECT_EQ(again.Find(t)->row, e.row);
    EXPECT_EQ(again.Find(t)->ratio, e.ratio);
  }
  EXPECT_THROW(DrefTable::FromCounts(counts, false, Tensor({2, 4})), ShapeError);
}

// ---- edge feature assignment ------------------------------------------------------------

struct RidgesFixture {
  Sentence s = testing::RidgesSentence();
  SubGraphSet set = DeriveSubGraphs(s, 0);
  std::mt19937_64 rng{4};
  std::vector<Sentence> corpus = {s};
  DrefTable table = BuildDrefTable(corpus, 6, rng);
};

TEST(EdgeFeaturesTest, DrefUsesTripleRowBothWaysAndSelfLoopRow) {
  RidgesFixture f;
  const SubGraph &sdp = f.set.sdp();  // ridges uprises from surge
  EdgeFeatureAssignment a = DrefEdgeFeatures(sdp, f.s, f.table);
  const std::size_t nsubj = f.table.RowFor({"VERB", "NOUN", "nsubj"});
  EXPECT_EQ(a.dref_rows[a.pair(0, 1)], nsubj);
  EXPECT_EQ(a.dref_rows[a.pair(1, 0)], nsubj);
  const std::size_t pobj = f.table.RowFor({"ADP", "NOUN", "pobj"});
  EXPECT_EQ(a.dref_rows[a.pair(2, 3)], pobj);
  for (std::size_t i = 0; i < sdp.size(); ++i) {
    EXPECT_EQ(a.dref_rows[a.pair(i, i)], DrefTable::kSelfLoopRow);
  }
  EXPECT_TRUE(a.defined[a.pair(1, 2)]);
  EXPECT_FALSE(a.defined[a.pair(0, 3)]);
  std::vector<double> v = a.Feature(0, 1, &f.table.embeddings.value);
  for (std::size_t c = 0; c < v.size(); ++c) {
    EXPECT_EQ(v[c], f.table.embeddings.value.at(nsubj, c));
  }
}

TEST(EdgeFeaturesTest, UnseenTripleUsesUnkRow) {
  RidgesFixture f;
  Sentence other = f.s;
  other.tokens[0].pos = "PROPN";
  EdgeFeatureAssignment a = DrefEdgeFeatures(DeriveSubGraphs(other, 0).sdp(), other, f.table);
  EXPECT_EQ(a.dref_rows[a.pair(0, 1)], DrefTable::kUnkRow);
}

TEST(EdgeFeaturesTest, RatioScaling) {
  RidgesFixture f;
  EdgeFeatureAssignment a = DrefEdgeFeatures(f.set.sdp(), f.s, f.table, true);
  EXPECT_DOUBLE_EQ(a.dref_weights[a.pair(0, 1)], 0.2);
  EXPECT_DOUBLE_EQ(a.dref_weights[a.pair(0, 0)], 1.0);
}

TEST(EdgeFeaturesTest, CtefMarksEntityNeighboursOnly) {
  RidgesFixture f;
  const SubGraph &sdp = f.set.sdp();  // local: 0 ridges(e1) 1 uprises 2 from 3 surge(e2)
  EdgeFeatureAssignment a = CtefEdgeFeatures(sdp, f.s.e1, f.s.e2, 5);
  EXPECT_TRUE(a.ctef_ones[a.pair(2, 3)]);   // from attends to surge
  EXPECT_FALSE(a.ctef_ones[a.pair(3, 2)]);  // surge attends to from
  EXPECT_TRUE(a.ctef_ones[a.pair(1, 0)]);
  EXPECT_FALSE(a.ctef_ones[a.pair(0, 1)]);
  EXPECT_TRUE(a.ctef_ones[a.pair(3, 3)]);
  EXPECT_FALSE(a.ctef_ones[a.pair(1, 1)]);
  EXPECT_FALSE(a.ctef_ones[a.pair(0, 3)]);  // not adjacent
  EXPECT_EQ(a.Feature(2, 3, nullptr), std::vector<double>(5, 1.0));
  EXPECT_EQ(a.Feature(3, 2, nullptr), std::vector<double>(5, 0.0));
}

TEST(EdgeFeaturesTest, CombinedModeSumsBoth) {
  RidgesFixture f;
  EdgeFeatureAssignment a =
      AssignEdgeFeatures(EdgeMode::kDrefCtef, f.set.sdp(), f.s, &f.table, 6);
  std::vector<double> v = a.Feature(2, 3, &f.table.embeddings.value);
  const std::size_t row = f.table.RowFor({"ADP", "NOUN", "pobj"});
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_DOUBLE_EQ(v[c], f.table.embeddings.value.at(row, c) + 1.0);
  }
  EXPECT_THROW(AssignEdgeFeatures(EdgeMode::kDref, f.set.sdp(), f.s, nullptr, 6),
               std::invalid_argument);
}

TEST(EdgeFeaturesTest, MatrixMatchesPerPairFeatures) {
  RidgesFixture f;
  for (EdgeMode mode : {EdgeMode::kDref, EdgeMode::kCtef, EdgeMode::kDrefCtef}) {
    for (const SubGraph &sg : f.set.graphs) {
      EdgeFeatureAssignment a = AssignEdgeFeatures(mode, sg, f.s, &f.table, 6, true);
      Tape tape;
      Tensor m = EdgeFeatureMatrix(ParamBinder(tape, false), a, &f.table).value();
      const std::size_t n = sg.size();
      ASSERT_EQ(m.shape(), (Shape{n * n, 6}));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (!a.defined[a.pair(i, j)]) continue;
          std::vector<double> v = a.Feature(i, j, &f.table.embeddings.value);
          for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(m.at(a.pair(i, j), c), v[c]);
        }
      }
    }
  }
}

TEST(EdgeFeaturesTest, GradientReachesTableRows) {
  RidgesFixture f;
  EdgeFeatureAssignment a = DrefEdgeFeatures(f.set.sdp(), f.s, f.table);
  f.table.embeddings.ZeroGrad();
  Tape tape;
  Var m = EdgeFeatureMatrix(ParamBinder(tape, true), a, &f.table);
  tape.Backward(Sum(m));
  // Each row's gradient is the number of pairs that gathered it.
  std::vector<double> uses(f.table.embeddings.value.rows(), 0.0);
  for (std::size_t r : a.dref_rows) uses[r] += 1.0;
  for (std::size_t r = 0; r < uses.size(); ++r) {
    EXPECT_EQ(f.table.embeddings.grad.at(r, 0), uses[r]);
  }
}

TEST(EdgeModeTest, NamesRoundTrip) {
  for (EdgeMode m : {EdgeMode::kNone, EdgeMode::kDref, EdgeMode::kCtef, EdgeMode::kDrefCtef}) {
    EXPECT_EQ(ParseEdgeMode(EdgeModeName(m)), m);
  }
  EXPECT_EQ(ParseEdgeMode("ctef+dref"), EdgeMode::kDrefCtef);
  EXPECT_THROW(ParseEdgeMode("edges"), std::invalid_argument);
}

// ---- token encodings ------------------------------------------------------------------------

TEST(EncodeTokensTest, DefaultWidthIs898) {
  std::vector<Sentence> corpus = {testing::RidgesSentence()};
  VocabSet vocabs = BuildVocabs(corpus);
  std::mt19937_64 rng(1);
  FeatureEmbeddings emb = FeatureEmbeddings::Create(vocabs, FeatureDims{}, rng);
  HashEmbeddingProvider provider(768, 7);
  Tensor ctx = provider.Embed(corpus[0]);
  SubGraphSet set = DeriveSubGraphs(corpus[0], 0);
  Tape tape;
  Var x = EncodeTokens(ParamBinder(tape, false), corpus[0], set.sdp(), ctx, emb, vocabs);
  EXPECT_EQ(x.value().shape(), (Shape{4, 898}));
  EXPECT_EQ(emb.output_dim(), 130u);
}

TEST(EncodeTokensTest, RowsConcatenateTheRightBlocks) {
  Sentence s = testing::RidgesSentence();
  std::vector<Sentence> corpus = {s};
  VocabSet vocabs = BuildVocabs(corpus);
  std::mt19937_64 rng(1);
  FeatureEmbeddings emb = FeatureEmbeddings::Create(vocabs, {3, 2}, rng);
  Tensor ctx = testing::RandomTensor({s.size(), 4}, rng);
  SubGraph e2 = DeriveSubGraphs(s, 0).e2();  // from the surge
  Tape tape;
  Tensor x = EncodeTokens(ParamBinder(tape, false), s, e2, ctx, emb, vocabs).value();
  ASSERT_EQ(x.shape(), (Shape{3, 4 + 9 + 2}));
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t tok = e2.vertices[k];
    const Token &t = s.tokens[tok];
    std::vector<double> expected;
    for (std::size_t c = 0; c < 4; ++c) expected.push_back(ctx.at(tok, c));
    for (std::size_t c = 0; c < 3; ++c) expected.push_back(emb.pos.value.at(vocabs.pos.Lookup(t.pos), c));
    for (std::size_t c = 0; c < 3; ++c) {
      expected.push_back(emb.deprel.value.at(vocabs.deprel.Lookup(t.deprel), c));
    }
    for (std::size_t c = 0; c < 3; ++c) expected.push_back(emb.ner.value.at(vocabs.ner.Lookup(t.ner), c));
    const std::size_t wt = tok == 4 ? kEntityRow : kNonEntityRow;
    for (std::size_t c = 0; c < 2; ++c) expected.push_back(emb.word_type.value.at(wt, c));
    for (std::size_t c = 0; c < expected.size(); ++c) EXPECT_EQ(x.at(k, c), expected[c]);
  }
}

TEST(EncodeTokensTest, UnseenSymbolsUseUnkRows) {
  Sentence s = testing::RidgesSentence();
  std::vector<Sentence> corpus = {testing::ThreeTokenSentence()};
  VocabSet vocabs = BuildVocabs(corpus);
  std::mt19937_64 rng(1);
  FeatureEmbeddings emb = FeatureEmbeddings::Create(vocabs, {3, 2}, rng);
  Tensor ctx({s.size(), 2});
  SubGraph sdp = DeriveSubGraphs(s, 0).sdp();  // "from" is ADP/prep, unseen
  Tape tape;
  Tensor x = EncodeTokens(ParamBinder(tape, false), s, sdp, ctx, emb, vocabs).value();
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(x.at(2, 2 + c), emb.pos.value.at(Vocab::kUnk, c));
  VocabSet open;
  EXPECT_THROW(EncodeTokens(ParamBinder(tape, false), s, sdp, ctx, emb, open), std::logic_error);
}

// ---- providers ---------------------------------------------------------------------------------

TEST(HashEmbeddingTest, DeterministicPerSurfaceAndSeed) {
  HashEmbeddingProvider a(64, 7), b(64, 7), c(64, 8);
  EXPECT_EQ(a.EmbedSurface("heat"), b.EmbedSurface("heat"));
  EXPECT_NE(a.EmbedSurface("heat"), c.EmbedSurface("heat"));
  EXPECT_NE(a.EmbedSurface("heat"), a.EmbedSurface("ice"));
  Tensor e = a.Embed(testing::RidgesSentence());
  EXPECT_EQ(e.shape(), (Shape{6, 64}));
  std::vector<double> row = a.EmbedSurface("surge");
  for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(e.at(4, c), row[c]);
}

TEST(HashEmbeddingTest, RoughlyUnitVariance) {
  HashEmbeddingProvider p(768, 7);
  double sum = 0, sq = 0;
  std::size_t count = 0;
  for (int w = 0; w < 50; ++w) {
    for (double v : p.EmbedSurface("w" + std::to_string(w))) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(sq / count - mean * mean, 1.0, 0.05);
}

TEST(PrecomputedEmbeddingTest, ParsesAndLooksUp) {
  auto p = PrecomputedEmbeddingProvider::Parse(
      "three\t0\t1 2\nthree\t1\t3 4\r\n\nthree\t2\t5 6\n");
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.num_records(), 3u);
  Tensor e = p.Embed(testing::ThreeTokenSentence());
  EXPECT_EQ(e, Tensor::Matrix({{1, 2}, {3, 4}, {5, 6}}));
  EXPECT_THROW(p.Embed(testing::RidgesSentence()), std::runtime_error);
}

TEST(PrecomputedEmbeddingTest, RejectsMalformedRecords) {
  EXPECT_THROW(PrecomputedEmbeddingProvider::Parse("a\t0\t1 2\na\t1\t1\n"), ParseError);
  EXPECT_THROW(PrecomputedEmbeddingProvider::Parse("a\tx\t1 2\n"), ParseError);
  EXPECT_THROW(PrecomputedEmbeddingProvider::Parse("a\t0\t1 z\n"), ParseError);
  EXPECT_THROW(PrecomputedEmbeddingProvider::Parse("a 0 1 2\n"), ParseError);
  try {
    PrecomputedEmbeddingProvider::Parse("a\t0\t1 2\n\na\t1\t1\n");
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace mgre
