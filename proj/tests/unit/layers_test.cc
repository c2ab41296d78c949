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

#include "mgre/layers.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mgre/gradcheck.h"
#include "oracles.h"

namespace mgre {
namespace {

using ::mgre::testing::MatMulOracle;
using ::mgre::testing::MaxAbsDiff;
using ::mgre::testing::RandomTensor;
using ::mgre::testing::GatHeadOracle;
using ::mgre::testing::LstmOracle;
using ::mgre::testing::Sigm;

Tensor Identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

// Path 0-1-2-3 plus self-loops.
Tensor ChainMask(std::size_t n) {
  Tensor m = Identity(n);
  for (std::size_t i = 0; i + 1 < n; ++i) m.at(i, i + 1) = m.at(i + 1, i) = 1.0;
  return m;
}

// ---- GAT ---------------------------------------------------------------------------

TEST(GatTest, HeadMatchesLoopOracle) {
  std::mt19937_64 rng(1);
  const std::size_t n = 4, in = 5, m = 3, de = 2;
  GatLayerParams p = GatLayerParams::Create("g", in, m, 1, de, rng);
  Tensor h = RandomTensor({n, in}, rng);
  Tensor edges = RandomTensor({n * n, de}, rng);
  Tensor mask = ChainMask(n);
  Tape tape;
  ParamBinder bind(tape, false);
  std::vector<Tensor> alphas;
  Tensor out = GatLayer(bind, tape.Constant(h), p, mask, tape.Constant(edges), &alphas).value();
  Tensor alpha;
  Tensor expected = GatHeadOracle(h, p.heads[0].weight.value, p.heads[0].attention.value, mask,
                                  &edges, &alpha);
  EXPECT_LT(MaxAbsDiff(out, expected), 1e-12);
  ASSERT_EQ(alphas.size(), 1u);
  EXPECT_LT(MaxAbsDiff(alphas[0], alpha), 1e-12);
  EXPECT_EQ(alphas[0].at(0, 2), 0.0);
}

TEST(GatTest, ZeroAttentionVectorGivesUniformNeighbourhood) {
  std::mt19937_64 rng(2);
  GatLayerParams p = GatLayerParams::Create("g", 4, 4, 2, 0, rng);
  for (auto &head : p.heads) head.attention.value.Fill(0.0);
  Tensor mask = ChainMask(5);
  Tape tape;
  std::vector<Tensor> alphas;
  GatLayer(ParamBinder(tape, false), tape.Constant(RandomTensor({5, 4}, rng)), p, mask, Var(),
           &alphas);
  for (const Tensor &a : alphas) {
    for (std::size_t i = 0; i < 5; ++i) {
      const double deg = (i == 0 || i == 4) ? 2.0 : 3.0;
      for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_DOUBLE_EQ(a.at(i, j), mask.at(i, j) / deg);
      }
    }
  }
}

TEST(GatTest, MultiHeadConcatenatesHeadsInOrder) {
  std::mt19937_64 rng(3);
  GatLayerParams p = GatLayerParams::Create("g", 6, 8, 4, 0, rng);
  ASSERT_EQ(p.heads.size(), 4u);
  EXPECT_EQ(p.out_dim(), 8u);
  EXPECT_EQ(p.heads[2].weight.name, "g.head2.weight");
  Tensor h = RandomTensor({3, 6}, rng);
  Tensor mask = ChainMask(3);
  Tape tape;
  Tensor out = GatLayer(ParamBinder(tape, false), tape.Constant(h), p, mask, Var()).value();
  for (std::size_t k = 0; k < 4; ++k) {
    Tensor expected = GatHeadOracle(h, p.heads[k].weight.value, p.heads[k].attention.value, mask,
                                    nullptr);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(out.at(i, 2 * k + c), expected.at(i, c), 1e-12);
    }
  }
  EXPECT_THROW(GatLayerParams::Create("g", 6, 8, 3, 0, rng), std::invalid_argument);
}

TEST(GatTest, SingleHeadLayerEqualsHeadBitwise) {
  std::mt19937_64 rng(4);
  GatLayerParams p = GatLayerParams::Create("g", 5, 6, 1, 3, rng);
  Tensor h = RandomTensor({4, 5}, rng);
  Tensor e = RandomTensor({16, 3}, rng);
  Tensor mask = ChainMask(4);
  Tape tape;
  ParamBinder bind(tape, false);
  Var layer = GatLayer(bind, tape.Constant(h), p, mask, tape.Constant(e));
  HeadAttention att = GatHeadAttention(bind, tape.Constant(h), p.heads[0], mask, tape.Constant(e));
  Var single = Elu(MatMul(att.alpha, att.projected));
  EXPECT_EQ(layer.value(), single.value());
}

TEST(GatTest, ZeroEdgeSlotEqualsEdgeFreeHead) {
  std::mt19937_64 rng(5);
  const std::size_t m = 3, de = 4;
  GatLayerParams with = GatLayerParams::Create("g", 5, m, 1, de, rng);
  for (std::size_t c = 0; c < de; ++c) with.heads[0].attention.value[2 * m + c] = 0.0;
  GatLayerParams without;
  GatHeadParams head;
  head.weight = with.heads[0].weight;
  head.attention = Parameter("a", Tensor({1, 2 * m}));
  for (std::size_t c = 0; c < 2 * m; ++c) head.attention.value[c] = with.heads[0].attention.value[c];
  without.heads.push_back(head);
  Tensor h = RandomTensor({4, 5}, rng);
  Tensor e = RandomTensor({16, de}, rng, -5, 5);
  Tensor mask = ChainMask(4);
  Tape tape;
  ParamBinder bind(tape, false);
  Tensor a = GatLayer(bind, tape.Constant(h), with, mask, tape.Constant(e)).value();
  Tensor b = GatLayer(bind, tape.Constant(h), without, mask, Var()).value();
  EXPECT_EQ(a, b);
}

TEST(GatTest, PermutationEquivariance) {
  std::mt19937_64 rng(6);
  const std::size_t n = 5, de = 2;
  GatLayerParams p = GatLayerParams::Create("g", 3, 4, 2, de, rng);
  Tensor h = RandomTensor({n, 3}, rng);
  Tensor e = RandomTensor({n * n, de}, rng);
  Tensor mask = ChainMask(n);
  mask.at(0, 4) = mask.at(4, 0) = 1.0;
  std::vector<std::size_t> perm = {3, 0, 4, 1, 2};  // new row r holds old vertex perm[r]
  Tensor hp({n, 3}), ep({n * n, de}), mp({n, n});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 3; ++c) hp.at(r, c) = h.at(perm[r], c);
    for (std::size_t s = 0; s < n; ++s) {
      mp.at(r, s) = mask.at(perm[r], perm[s]);
      for (std::size_t c = 0; c < de; ++c) ep.at(r * n + s, c) = e.at(perm[r] * n + perm[s], c);
    }
  }
  Tape tape;
  ParamBinder bind(tape, false);
  Tensor out = GatLayer(bind, tape.Constant(h), p, mask, tape.Constant(e)).value();
  Tensor outp = GatLayer(bind, tape.Constant(hp), p, mp, tape.Constant(ep)).value();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(outp.at(r, c), out.at(perm[r], c), 1e-14);
  }
}

TEST(GatTest, RowsSumToOneOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    GatLayerParams p = GatLayerParams::Create("g", 4, 4, 2, 3, rng);
    Tensor mask = Identity(n);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t j = rng() % i;
      mask.at(i, j) = mask.at(j, i) = 1.0;
    }
    Tape tape;
    std::vector<Tensor> alphas;
    GatLayer(ParamBinder(tape, false), tape.Constant(RandomTensor({n, 4}, rng, -3, 3)), p, mask,
             tape.Constant(RandomTensor({n * n, 3}, rng)), &alphas);
    for (const Tensor &a : alphas) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += a.at(i, j);
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(GatTest, EdgeShapeIsChecked) {
  std::mt19937_64 rng(8);
  GatLayerParams p = GatLayerParams::Create("g", 3, 2, 1, 2, rng);
  Tape tape;
  ParamBinder bind(tape, false);
  Var h = tape.Constant(RandomTensor({3, 3}, rng));
  EXPECT_THROW(GatLayer(bind, h, p, ChainMask(3), Var()), std::invalid_argument);
  EXPECT_THROW(GatLayer(bind, h, p, ChainMask(3), tape.Constant(Tensor({8, 2}))), ShapeError);
}

// ---- GCN ---------------------------------------------------------------------------------

TEST(GcnTest, TriangleAveragesEveryVertex) {
  // Fully connected 3 vertices: every degree is 3, every weight 1/3.
  GcnLayerParams p;
  p.weight = Parameter("w", Tensor::Matrix({{1, -1}, {2, 0.5}}));
  Tensor h = Tensor::Matrix({{1, 0}, {0, 1}, {2, 2}});
  Tensor mask = Tensor::Filled({3, 3}, 1.0);
  Tape tape;
  Tensor out = GcnLayer(ParamBinder(tape, false), tape.Constant(h), p, mask, Var()).value();
  // mean(h) = (1, 1); (1, 1) W = (3, -0.5); ReLU -> (3, 0).
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(out.at(i, 0), 3.0, 1e-15);
    EXPECT_EQ(out.at(i, 1), 0.0);
  }
}

TEST(GcnTest, ChainWithEdgeFeaturesMatchesHandComputation) {
  // 0 - 1 with self-loops: deg 2 each, all weights 1/2.
  GcnLayerParams p;
  p.edge_dim = 1;
  p.weight = Parameter("w", Tensor::Matrix({{1}, {1}, {10}}));
  Tensor h = Tensor::Matrix({{1, 2}, {3, 4}});
  Tensor e = Tensor::Matrix({{0.1}, {0.2}, {0.3}, {0.4}});  // pairs 00 01 10 11
  Tape tape;
  Tensor out =
      GcnLayer(ParamBinder(tape, false), tape.Constant(h), p, ChainMask(2), tape.Constant(e))
          .value();
  // Row 0: 0.5*(h0+h1) = (2, 3), 0.5*(e00+e01) = 0.15 -> 2 + 3 + 1.5.
  EXPECT_NEAR(out.at(0, 0), 6.5, 1e-14);
  // Row 1: (2, 3), 0.5*(e10+e11) = 0.35 -> 5 + 3.5.
  EXPECT_NEAR(out.at(1, 0), 8.5, 1e-14);
}

TEST(GcnTest, SymmetricNormalisationOnAStar) {
  std::mt19937_64 rng(9);
  const std::size_t n = 4;  // centre 0, leaves 1..3
  Tensor mask = Identity(n);
  for (std::size_t i = 1; i < n; ++i) mask.at(0, i) = mask.at(i, 0) = 1.0;
  GcnLayerParams p = GcnLayerParams::Create("g", 3, 2, 0, rng);
  Tensor h = RandomTensor({n, 3}, rng);
  Tape tape;
  Tensor out = GcnLayer(ParamBinder(tape, false), tape.Constant(h), p, mask, Var()).value();
  const double deg[] = {4, 2, 2, 2};
  Tensor agg({n, 3});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.at(i, j) == 0) continue;
      for (std::size_t c = 0; c < 3; ++c) agg.at(i, c) += h.at(j, c) / std::sqrt(deg[i] * deg[j]);
    }
  }
  Tensor expected = MatMulOracle(agg, p.weight.value);
  for (double &v : expected.values()) v = std::max(v, 0.0);
  EXPECT_LT(MaxAbsDiff(out, expected), 1e-14);
}

// ---- LSTM ----------------------------------------------------------------------------------

TEST(LstmTest, MatchesLoopOracleBothDirections) {
  std::mt19937_64 rng(10);
  BiLstmParams p = BiLstmParams::Create("lstm", 4, 3, rng);
  Tensor x = RandomTensor({5, 4}, rng);
  Tape tape;
  Tensor out = BiLstmEncode(ParamBinder(tape, false), tape.Constant(x), p).value();
  ASSERT_EQ(out.shape(), (Shape{5, 6}));
  Tensor fw = LstmOracle(x, p.forward, false);
  Tensor bw = LstmOracle(x, p.backward, true);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(out.at(t, k), fw.at(t, k), 1e-14);
      EXPECT_NEAR(out.at(t, 3 + k), bw.at(t, k), 1e-14);
    }
  }
}

TEST(LstmTest, SingleStepClosedForm) {
  std::mt19937_64 rng(11);
  LstmParams p = LstmParams::Create("l", 2, 1, rng);
  Tensor x = Tensor::Matrix({{0.3, -0.4}});
  Tape tape;
  const double out = LstmEncode(ParamBinder(tape, false), tape.Constant(x), p, false).value()[0];
  auto gate = [&](std::size_t k) {
    return p.bias.value[k] + 0.3 * p.input_weight.value.at(0, k) -
           0.4 * p.input_weight.value.at(1, k);
  };
  const double c = Sigm(gate(0)) * std::tanh(gate(2));
  EXPECT_NEAR(out, Sigm(gate(3)) * std::tanh(c), 1e-15);
}

TEST(LstmTest, ReverseEqualsForwardOnReversedInput) {
  std::mt19937_64 rng(12);
  LstmParams p = LstmParams::Create("l", 3, 4, rng);
  Tensor x = RandomTensor({6, 3}, rng);
  Tensor xr({6, 3});
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t c = 0; c < 3; ++c) xr.at(t, c) = x.at(5 - t, c);
  }
  Tape tape;
  ParamBinder bind(tape, false);
  Tensor rev = LstmEncode(bind, tape.Constant(x), p, true).value();
  Tensor fwd = LstmEncode(bind, tape.Constant(xr), p, false).value();
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(rev.at(t, k), fwd.at(5 - t, k));
  }
}

TEST(LstmTest, ForwardStateDependsOnlyOnPrefix) {
  std::mt19937_64 rng(13);
  BiLstmParams p = BiLstmParams::Create("lstm", 3, 2, rng);
  Tensor x = RandomTensor({4, 3}, rng);
  Tensor y = x;
  for (std::size_t c = 0; c < 3; ++c) y.at(3, c) += 1.0;
  Tape tape;
  ParamBinder bind(tape, false);
  Tensor a = BiLstmEncode(bind, tape.Constant(x), p).value();
  Tensor b = BiLstmEncode(bind, tape.Constant(y), p).value();
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(a.at(t, 0), b.at(t, 0));
    EXPECT_NE(a.at(t, 2), b.at(t, 2));
  }
  EXPECT_THROW(BiLstmEncode(bind, tape.Constant(Tensor({0, 3})), p), std::invalid_argument);
}

// ---- pooling and composition ----------------------------------------------------------------

TEST(PoolingTest, MatchesOracleAndSumsToOne) {
  std::mt19937_64 rng(14);
  PoolingParams p = PoolingParams::Create("pool", 4, rng);
  Tensor h = RandomTensor({5, 4}, rng, -2, 2);
  Tape tape;
  std::vector<Tensor> weights;
  Tensor v = PoolGraph(ParamBinder(tape, false), tape.Constant(h), p, &weights).value();
  std::vector<double> u(5);
  double total = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += h.at(i, c) * p.weight.value[c];
    u[i] = std::exp(std::tanh(s));
    total += u[i];
  }
  ASSERT_EQ(v.shape(), (Shape{1, 4}));
  double wsum = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(weights[0][i], u[i] / total, 1e-15);
    wsum += weights[0][i];
  }
  EXPECT_NEAR(wsum, 1.0, 1e-15);
  for (std::size_t c = 0; c < 4; ++c) {
    double expected = 0;
    for (std::size_t i = 0; i < 5; ++i) expected += u[i] / total * h.at(i, c);
    EXPECT_NEAR(v[c], expected, 1e-14);
  }
}

TEST(PoolingTest, SingleVertexPassesThrough) {
  std::mt19937_64 rng(15);
  PoolingParams p = PoolingParams::Create("pool", 3, rng);
  Tensor h = RandomTensor({1, 3}, rng);
  Tape tape;
  EXPECT_EQ(PoolGraph(ParamBinder(tape, false), tape.Constant(h), p).value(), h);
}

TEST(ComposeTest, SumsEntityAndGraphVectors) {
  Tape tape;
  Var e1 = tape.Constant(Tensor::Matrix({{1, 2}}));
  Var e2 = tape.Constant(Tensor::Matrix({{10, 20}}));
  std::vector<Var> pooled = {tape.Constant(Tensor::Matrix({{100, 200}})),
                             tape.Constant(Tensor::Matrix({{1000, 2000}}))};
  EXPECT_EQ(ComposeSentence(pooled, e1, e2).value(), Tensor::Matrix({{1111, 2222}}));
  std::vector<Var> one = {pooled[0]};
  EXPECT_EQ(ComposeSentence(one, e1, e2).value(), Tensor::Matrix({{111, 222}}));
}

TEST(LinearTest, ZeroInitAndValues) {
  std::mt19937_64 rng(16);
  LinearParams zero = LinearParams::Create("c", 3, 2, rng, true);
  EXPECT_EQ(zero.weight.value.SquaredNorm(), 0.0);
  LinearParams p = LinearParams::Create("c", 3, 2, rng);
  Tensor x = RandomTensor({2, 3}, rng);
  Tape tape;
  Tensor y = Linear(ParamBinder(tape, false), tape.Constant(x), p).value();
  Tensor expected = MatMulOracle(x, p.weight.value);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) expected.at(i, j) += p.bias.value[j];
  }
  EXPECT_LT(MaxAbsDiff(y, expected), 1e-15);
}

// ---- layer gradients ---------------------------------------------------------------------------

TEST(LayerGradientTest, EveryLayerPassesGradientCheck) {
  std::mt19937_64 rng(17);
  const std::size_t n = 4;
  BiLstmParams lstm = BiLstmParams::Create("lstm", 3, 2, rng);
  GatLayerParams gat = GatLayerParams::Create("gat", 4, 4, 2, 2, rng);
  GcnLayerParams gcn = GcnLayerParams::Create("gcn", 4, 4, 2, rng);
  PoolingParams pool = PoolingParams::Create("pool", 4, rng);
  Parameter edges("edges", RandomTensor({n * n, 2}, rng));
  Tensor x = RandomTensor({n, 3}, rng);
  Tensor mask = ChainMask(n);
  auto loss = [&](Tape &tape) {
    ParamBinder bind(tape, true);
    Var h = BiLstmEncode(bind, tape.Constant(x), lstm);
    Var e = bind(edges);
    Var g = GatLayer(bind, h, gat, mask, e);
    Var c = GcnLayer(bind, Tanh(h), gcn, mask, e);
    return Sum(Add(PoolGraph(bind, g, pool), PoolGraph(bind, c, pool)));
  };
  std::vector<Parameter *> params = {&edges, &pool.weight, &gcn.weight};
  lstm.Collect(params);
  gat.Collect(params);
  GradCheckReport report = GradientCheck(loss, params);
  for (const ParamGradError &e : report.per_param) EXPECT_LT(e.max_rel_error, 1e-6) << e.name;
}

}  // namespace
}  // namespace mgre
