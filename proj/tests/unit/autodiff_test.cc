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

#include "mgre/autodiff.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace mgre {
namespace {

using ::mgre::testing::MatMulOracle;
using ::mgre::testing::MaxAbsDiff;
using ::mgre::testing::OpGradientError;
using ::mgre::testing::RandomTensor;

constexpr double kGradTol = 1e-6;

Tensor Rand(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  return RandomTensor(std::move(shape), rng, lo, hi);
}

// ---- forward values -----------------------------------------------------------

TEST(AutodiffValueTest, MatMulMatchesTripleLoop) {
  Tape tape;
  Tensor a = Rand({3, 4}, 1), b = Rand({4, 5}, 2);
  Var c = MatMul(tape.Constant(a), tape.Constant(b));
  EXPECT_LT(MaxAbsDiff(c.value(), MatMulOracle(a, b)), 1e-14);
  EXPECT_THROW(MatMul(tape.Constant(a), tape.Constant(a)), ShapeError);
}

TEST(AutodiffValueTest, RowBiasBroadcast) {
  Tape tape;
  Var m = tape.Constant(Tensor::Matrix({{1, 2}, {3, 4}}));
  Var b = tape.Constant(Tensor::Matrix({{10, 20}}));
  EXPECT_EQ(Add(m, b).value(), Tensor::Matrix({{11, 22}, {13, 24}}));
  EXPECT_EQ(Sub(m, b).value(), Tensor::Matrix({{-9, -18}, {-7, -16}}));
}

TEST(AutodiffValueTest, ScalarBroadcastInMul) {
  Tape tape;
  Var m = tape.Constant(Tensor::Matrix({{1, 2}, {3, 4}}));
  EXPECT_EQ(Mul(m, tape.Constant(Tensor::Scalar(2))).value(), Tensor::Matrix({{2, 4}, {6, 8}}));
  EXPECT_EQ(Scale(m, -1).value(), Tensor::Matrix({{-1, -2}, {-3, -4}}));
}

TEST(AutodiffValueTest, ConcatSliceTranspose) {
  Tape tape;
  Var a = tape.Constant(Tensor::Matrix({{1, 2}, {3, 4}}));
  Var b = tape.Constant(Tensor::Matrix({{5}, {6}}));
  Var c = Concat({a, b}, 1);
  EXPECT_EQ(c.value(), Tensor::Matrix({{1, 2, 5}, {3, 4, 6}}));
  EXPECT_EQ(Concat({a, a}, 0).value(), Tensor::Matrix({{1, 2}, {3, 4}, {1, 2}, {3, 4}}));
  EXPECT_EQ(Slice(c, 1, 1, 2).value(), Tensor::Matrix({{2, 5}, {4, 6}}));
  EXPECT_EQ(Slice(c, 0, 1, 1).value(), Tensor::Matrix({{3, 4, 6}}));
  EXPECT_EQ(Transpose(c).value(), Tensor::Matrix({{1, 3}, {2, 4}, {5, 6}}));
  EXPECT_THROW(Slice(c, 1, 2, 2), ShapeError);
  EXPECT_THROW(Concat({a, tape.Constant(Tensor({3, 1}))}, 1), ShapeError);
}

TEST(AutodiffValueTest, Reductions) {
  Tape tape;
  Var a = tape.Constant(Tensor::Matrix({{1, 2, 3}, {4, 5, 6}}));
  EXPECT_EQ(Sum(a).value()[0], 21.0);
  EXPECT_EQ(Sum(a, 0).value(), Tensor::Matrix({{5, 7, 9}}));
  EXPECT_EQ(Sum(a, 1).value(), Tensor::Matrix({{6}, {15}}));
  EXPECT_EQ(Mean(a).value()[0], 3.5);
}

TEST(AutodiffValueTest, GatherAndOuterAdd) {
  Tape tape;
  Var table = tape.Constant(Tensor::Matrix({{1, 1}, {2, 2}, {3, 3}}));
  std::vector<std::size_t> idx = {2, 0, 2};
  EXPECT_EQ(GatherRows(table, idx).value(), Tensor::Matrix({{3, 3}, {1, 1}, {3, 3}}));
  std::vector<std::size_t> bad = {3};
  EXPECT_THROW(GatherRows(table, bad), ShapeError);
  Var col = tape.Constant(Tensor::Matrix({{1}, {2}}));
  Var row = tape.Constant(Tensor::Matrix({{10, 20, 30}}));
  EXPECT_EQ(OuterAdd(col, row).value(), Tensor::Matrix({{11, 21, 31}, {12, 22, 32}}));
}

TEST(AutodiffValueTest, Nonlinearities) {
  Tape tape;
  Var x = tape.Constant(Tensor::Vector({-2.0, 0.5}));
  EXPECT_DOUBLE_EQ(LeakyRelu(x).value()[0], -0.4);
  EXPECT_DOUBLE_EQ(LeakyRelu(x).value()[1], 0.5);
  EXPECT_DOUBLE_EQ(Relu(x).value()[0], 0.0);
  EXPECT_DOUBLE_EQ(Elu(x).value()[0], std::exp(-2.0) - 1.0);
  EXPECT_DOUBLE_EQ(Elu(x).value()[1], 0.5);
  EXPECT_DOUBLE_EQ(Tanh(x).value()[0], std::tanh(-2.0));
  EXPECT_DOUBLE_EQ(Sigmoid(x).value()[1], 1.0 / (1.0 + std::exp(-0.5)));
}

TEST(AutodiffValueTest, SoftmaxAxes) {
  Tape tape;
  Var x = tape.Constant(Tensor::Matrix({{0, std::log(3.0)}, {std::log(2.0), std::log(3.0)}}));
  Tensor rows = Softmax(x, 1).value();
  EXPECT_NEAR(rows.at(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(rows.at(1, 0), 0.4, 1e-15);
  Tensor cols = Softmax(x, 0).value();
  EXPECT_NEAR(cols.at(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(cols.at(0, 1), 0.5, 1e-15);
}

TEST(AutodiffValueTest, SoftmaxIsStableForHugeLogits) {
  Tape tape;
  Var x = tape.Constant(Tensor::Vector({1000.0, 1000.0, -1000.0}));
  Tensor y = Softmax(x, 0).value();
  EXPECT_TRUE(y.AllFinite());
  EXPECT_NEAR(y[0], 0.5, 1e-15);
  EXPECT_EQ(y[2], 0.0);
  Var ce = CrossEntropy(x, 2);
  EXPECT_TRUE(ce.value().AllFinite());
  EXPECT_NEAR(ce.value()[0], 2000.0 + std::log(2.0), 1e-9);
}

TEST(AutodiffValueTest, MaskedSoftmaxZeroesMaskedEntries) {
  Tape tape;
  Var s = tape.Constant(Tensor::Matrix({{5, 1, 1}, {0, 0, 9}, {2, 2, 2}}));
  Tensor mask = Tensor::Matrix({{0, 1, 1}, {1, 1, 0}, {1, 1, 1}});
  Tensor a = MaskedSoftmaxRows(s, mask).value();
  EXPECT_EQ(a.at(0, 0), 0.0);
  EXPECT_NEAR(a.at(0, 1), 0.5, 1e-15);
  EXPECT_EQ(a.at(1, 2), 0.0);
  EXPECT_NEAR(a.at(2, 1), 1.0 / 3.0, 1e-15);
  Tensor empty_row = Tensor::Matrix({{0, 0, 0}, {1, 1, 1}, {1, 1, 1}});
  EXPECT_THROW(MaskedSoftmaxRows(s, empty_row), std::invalid_argument);
}

TEST(AutodiffValueTest, UniformLogitsGiveLogClassCount) {
  Tape tape;
  Var x = tape.Constant(Tensor({1, 19}));
  EXPECT_NEAR(CrossEntropy(x, 7).value()[0], std::log(19.0), 1e-15);
  EXPECT_THROW(CrossEntropy(x, 19), std::out_of_range);
}

// ---- gradients ------------------------------------------------------------------

TEST(AutodiffGradientTest, BinaryOps) {
  auto ab = [] { return std::vector<Tensor>{Rand({3, 4}, 1), Rand({3, 4}, 2)}; };
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Add(v[0], v[1]); }, ab()), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Sub(v[0], v[1]); }, ab()), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Mul(v[0], v[1]); }, ab()), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return MatMul(v[0], Transpose(v[1])); }, ab()),
            kGradTol);
}

TEST(AutodiffGradientTest, Broadcasts) {
  std::vector<Tensor> bias = {Rand({4, 3}, 3), Rand({1, 3}, 4)};
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Add(v[0], v[1]); }, bias), kGradTol);
  std::vector<Tensor> scalar = {Rand({4, 3}, 5), Rand({1}, 6)};
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Mul(v[0], v[1]); }, scalar), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Mul(v[1], v[0]); }, scalar), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Add(v[1], v[0]); }, scalar), kGradTol);
}

TEST(AutodiffGradientTest, StructuralOps) {
  std::vector<Tensor> x = {Rand({3, 4}, 7), Rand({3, 2}, 8)};
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Concat({v[0], v[1]}, 1); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Slice(v[0], 1, 1, 2); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Slice(v[0], 0, 2, 1); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Transpose(v[0]); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Reshape(v[0], {2, 6}); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Sum(v[0], 0); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Sum(v[0], 1); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Mean(v[0]); }, x), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Scale(v[0], -2.5); }, x), kGradTol);
  EXPECT_LT(OpGradientError(
                [](Tape &, auto &v) {
                  std::vector<std::size_t> idx = {1, 1, 0, 2};
                  return GatherRows(v[0], idx);
                },
                x),
            kGradTol);
  std::vector<Tensor> outer = {Rand({3, 1}, 9), Rand({1, 4}, 10)};
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return OuterAdd(v[0], v[1]); }, outer),
            kGradTol);
}

TEST(AutodiffGradientTest, Nonlinearities) {
  // Keep inputs away from the kinks of the piecewise functions.
  Tensor x = Rand({4, 5}, 11);
  for (double &v : x.values()) v += v >= 0 ? 0.05 : -0.05;
  std::vector<Tensor> in = {x};
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return LeakyRelu(v[0]); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Relu(v[0]); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Elu(v[0]); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Tanh(v[0]); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Sigmoid(v[0]); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Softmax(v[0], 0); }, in), kGradTol);
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return Softmax(v[0], 1); }, in), kGradTol);
}

TEST(AutodiffGradientTest, MaskedSoftmaxAndCrossEntropy) {
  Tensor mask = Tensor::Matrix({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  std::vector<Tensor> s = {Rand({3, 3}, 12, -3, 3)};
  EXPECT_LT(OpGradientError([&](Tape &, auto &v) { return MaskedSoftmaxRows(v[0], mask); }, s),
            kGradTol);
  std::vector<Tensor> logits = {Rand({1, 19}, 13, -4, 4)};
  // A wider step keeps round-off in the log-sum-exp below the tolerance.
  EXPECT_LT(OpGradientError([](Tape &, auto &v) { return CrossEntropy(v[0], 5); }, logits, 99,
                            1e-5),
            kGradTol);
}

TEST(AutodiffGradientTest, MaskedEntriesGetNoGradient) {
  Tape tape;
  Var s = tape.Variable(Rand({2, 2}, 14));
  Tensor mask = Tensor::Matrix({{1, 0}, {1, 1}});
  Var a = MaskedSoftmaxRows(s, mask);
  tape.Backward(Sum(Mul(a, tape.Constant(Rand({2, 2}, 15)))));
  EXPECT_EQ(s.grad().at(0, 1), 0.0);
}

TEST(AutodiffGradientTest, CrossEntropyGradientIsSoftmaxMinusOneHot) {
  Tape tape;
  Tensor x = Rand({1, 6}, 16);
  Var v = tape.Variable(x);
  tape.Backward(CrossEntropy(v, 2));
  double z = 0;
  for (double e : x.values()) z += std::exp(e);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(v.grad()[i], std::exp(x[i]) / z - (i == 2 ? 1.0 : 0.0), 1e-15);
  }
}

TEST(AutodiffGradientTest, DiamondAccumulatesBothBranches) {
  // y = (x*x) + tanh(x) uses x on two paths; dy/dx = 2x + 1 - tanh(x)^2.
  Tape tape;
  Tensor x = Tensor::Vector({0.3, -1.2});
  Var v = tape.Variable(x);
  Var y = Add(Mul(v, v), Tanh(v));
  tape.Backward(Sum(y));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(v.grad()[i], 2 * x[i] + 1 - std::tanh(x[i]) * std::tanh(x[i]), 1e-15);
  }
}

TEST(AutodiffGradientTest, BackwardTwiceGivesSameLeafGradient) {
  Tape tape;
  Var v = tape.Variable(Tensor::Vector({1, 2, 3}));
  Var y = Sum(Mul(v, v));
  tape.Backward(y);
  Tensor first = v.grad();
  tape.Backward(y);
  EXPECT_EQ(v.grad(), first);
}

TEST(AutodiffGradientTest, ConstantsReceiveNoGradient) {
  Tape tape;
  Var c = tape.Constant(Tensor::Vector({1, 2}));
  Var v = tape.Variable(Tensor::Vector({3, 4}));
  Var y = Sum(Mul(c, v));
  EXPECT_FALSE(c.requires_grad());
  EXPECT_TRUE(y.requires_grad());
  tape.Backward(y);
  EXPECT_TRUE(c.grad().empty());
  EXPECT_EQ(v.grad(), Tensor::Vector({1, 2}));
}

// ---- parameters -------------------------------------------------------------------

TEST(AutodiffParamTest, GradientsAccumulateAcrossTapes) {
  Parameter p("w", Tensor::Vector({1, -2}));
  for (int round = 0; round < 2; ++round) {
    Tape tape;
    Var w = tape.Param(p);
    tape.Backward(Sum(Mul(w, w)));
  }
  EXPECT_EQ(p.grad, Tensor::Vector({4, -8}));
  p.ZeroGrad();
  EXPECT_EQ(p.grad, Tensor::Vector({0, 0}));
}

TEST(AutodiffParamTest, SharedParameterSumsUses) {
  Parameter p("w", Tensor::Vector({3}));
  Tape tape;
  Var a = tape.Param(p);
  Var b = tape.Param(p);
  tape.Backward(Sum(Mul(a, b)));
  EXPECT_EQ(p.grad[0], 6.0);
}

TEST(AutodiffParamTest, FrozenParameterIsUntouched) {
  Parameter p("w", Tensor::Vector({3}), false);
  Tape tape;
  Var v = tape.Variable(Tensor::Vector({2}));
  tape.Backward(Sum(Mul(tape.Param(p), v)));
  EXPECT_EQ(p.grad[0], 0.0);
  EXPECT_EQ(v.grad()[0], 3.0);
}

TEST(AutodiffParamTest, ReadOnlyBinderNeverWrites) {
  Parameter p("w", Tensor::Vector({3}));
  Tape tape;
  ParamBinder bind(tape, false);
  Var v = tape.Variable(Tensor::Vector({2}));
  tape.Backward(Sum(Mul(bind(p), v)));
  EXPECT_EQ(p.grad[0], 0.0);
  EXPECT_EQ(v.grad()[0], 3.0);
  ParamBinder track(tape, true);
  Var w = track(p);
  tape.Backward(Sum(Mul(w, v)));
  EXPECT_EQ(p.grad[0], 2.0);
}

TEST(AutodiffParamTest, MixedTapesAreRejected) {
  Tape t1, t2;
  Var a = t1.Constant(Tensor::Vector({1}));
  Var b = t2.Constant(Tensor::Vector({1}));
  EXPECT_THROW(Add(a, b), std::invalid_argument);
  EXPECT_THROW(t1.Backward(b), std::invalid_argument);
}

}  // namespace
}  // namespace mgre
