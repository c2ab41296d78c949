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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgre {

namespace {

Parameter Uniform(const std::string &name, Shape shape, std::size_t fan_in, std::mt19937_64 &rng) {
  Parameter p(name, Tensor(std::move(shape)));
  InitUniformFanIn(p.value, fan_in, rng);
  return p;
}

}  // namespace

// ---- dense --------------------------------------------------------------------

LinearParams LinearParams::Create(const std::string &name, std::size_t in, std::size_t out,
                                  std::mt19937_64 &rng, bool zero_init) {
  LinearParams p;
  if (zero_init) {
    p.weight = Parameter(name + ".weight", Tensor({in, out}));
    p.bias = Parameter(name + ".bias", Tensor({1, out}));
  } else {
    p.weight = Uniform(name + ".weight", {in, out}, in, rng);
    p.bias = Uniform(name + ".bias", {1, out}, in, rng);
  }
  return p;
}

void LinearParams::Collect(std::vector<Parameter *> &out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Var Linear(const ParamBinder &bind, Var x, const LinearParams &p) {
  return Add(MatMul(x, bind(p.weight)), bind(p.bias));
}

// ---- BiLSTM ---------------------------------------------------------------------

LstmParams LstmParams::Create(const std::string &name, std::size_t in, std::size_t hidden,
                              std::mt19937_64 &rng) {
  LstmParams p;
  p.input_weight = Uniform(name + ".input_weight", {in, 4 * hidden}, hidden, rng);
  p.hidden_weight = Uniform(name + ".hidden_weight", {hidden, 4 * hidden}, hidden, rng);
  p.bias = Uniform(name + ".bias", {1, 4 * hidden}, hidden, rng);
  return p;
}

void LstmParams::Collect(std::vector<Parameter *> &out) {
  out.push_back(&input_weight);
  out.push_back(&hidden_weight);
  out.push_back(&bias);
}

BiLstmParams BiLstmParams::Create(const std::string &name, std::size_t in, std::size_t hidden,
                                  std::mt19937_64 &rng) {
  BiLstmParams p;
  p.forward = LstmParams::Create(name + ".fw", in, hidden, rng);
  p.backward = LstmParams::Create(name + ".bw", in, hidden, rng);
  return p;
}

void BiLstmParams::Collect(std::vector<Parameter *> &out) {
  forward.Collect(out);
  backward.Collect(out);
}

Var LstmEncode(const ParamBinder &bind, Var inputs, const LstmParams &p, bool reverse) {
  const std::size_t n = inputs.value().rows();
  const std::size_t h = p.hidden();
  if (n == 0) throw std::invalid_argument("LSTM over an empty sequence");
  Var projected = Add(MatMul(inputs, bind(p.input_weight)), bind(p.bias));  // n x 4h
  Var w_h = bind(p.hidden_weight);

  std::vector<Var> states(n);
  Var h_prev, c_prev;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    Var gates = Slice(projected, 0, t, 1);
    if (step > 0) gates = Add(gates, MatMul(h_prev, w_h));
    Var in_gate = Sigmoid(Slice(gates, 1, 0, h));
    Var forget_gate = Sigmoid(Slice(gates, 1, h, h));
    Var candidate = Tanh(Slice(gates, 1, 2 * h, h));
    Var out_gate = Sigmoid(Slice(gates, 1, 3 * h, h));
    Var c = Mul(in_gate, candidate);
    if (step > 0) c = Add(Mul(forget_gate, c_prev), c);
    Var hidden = Mul(out_gate, Tanh(c));
    states[t] = hidden;
    h_prev = hidden;
    c_prev = c;
  }
  return Concat(std::span<const Var>(states), 0);
}

Var BiLstmEncode(const ParamBinder &bind, Var inputs, const BiLstmParams &p) {
  if (inputs.value().size() == 0 || inputs.value().rows() == 0) {
    throw std::invalid_argument("BiLSTM over an empty sequence");
  }
  Var fw = LstmEncode(bind, inputs, p.forward, false);
  Var bw = LstmEncode(bind, inputs, p.backward, true);
  return Concat({fw, bw}, 1);
}

// ---- graph attention ---------------------------------------------------------------

GatLayerParams GatLayerParams::Create(const std::string &name, std::size_t in, std::size_t out,
                                      std::size_t num_heads, std::size_t edge_dim,
                                      std::mt19937_64 &rng) {
  if (num_heads == 0 || out % num_heads != 0) {
    throw std::invalid_argument("graph output dimension " + std::to_string(out) +
                                " is not divisible by " + std::to_string(num_heads) + " heads");
  }
  const std::size_t m = out / num_heads;
  GatLayerParams p;
  for (std::size_t k = 0; k < num_heads; ++k) {
    std::string head = name + ".head" + std::to_string(k);
    GatHeadParams hp;
    hp.weight = Uniform(head + ".weight", {in, m}, in, rng);
    hp.attention = Uniform(head + ".attention", {1, 2 * m + edge_dim}, 2 * m + edge_dim, rng);
    p.heads.push_back(std::move(hp));
  }
  return p;
}

std::size_t GatLayerParams::out_dim() const {
  std::size_t total = 0;
  for (const auto &h : heads) total += h.out_dim();
  return total;
}

void GatLayerParams::Collect(std::vector<Parameter *> &out) {
  for (auto &h : heads) {
    out.push_back(&h.weight);
    out.push_back(&h.attention);
  }
}

HeadAttention GatHeadAttention(const ParamBinder &bind, Var h, const GatHeadParams &p,
                               const Tensor &mask, Var edges) {
  const std::size_t n = h.value().rows();
  const std::size_t m = p.out_dim();
  const std::size_t d_e = p.edge_dim();
  Var z = MatMul(h, bind(p.weight));
  Var a = bind(p.attention);
  Var source = MatMul(z, Transpose(Slice(a, 1, 0, m)));             // n x 1
  Var target = Transpose(MatMul(z, Transpose(Slice(a, 1, m, m))));  // 1 x n
  Var scores = OuterAdd(source, target);
  if (d_e > 0) {
    if (!edges.valid()) throw std::invalid_argument("attention head expects edge features");
    if (edges.value().rows() != n * n || edges.value().cols() != d_e) {
      throw ShapeError("edge features", edges.value().shape(), Shape{n * n, d_e});
    }
    Var edge_scores = MatMul(edges, Transpose(Slice(a, 1, 2 * m, d_e)));  // n*n x 1
    scores = Add(scores, Reshape(edge_scores, {n, n}));
  }
  return {MaskedSoftmaxRows(LeakyRelu(scores), mask), z};
}

Var GatLayer(const ParamBinder &bind, Var h, const GatLayerParams &p, const Tensor &mask,
             Var edges, std::vector<Tensor> *alphas) {
  std::vector<Var> outputs;
  outputs.reserve(p.heads.size());
  for (const GatHeadParams &head : p.heads) {
    HeadAttention att = GatHeadAttention(bind, h, head, mask, head.edge_dim() > 0 ? edges : Var());
    if (alphas != nullptr) alphas->push_back(att.alpha.value());
    outputs.push_back(Elu(MatMul(att.alpha, att.projected)));
  }
  if (outputs.size() == 1) return outputs[0];
  return Concat(std::span<const Var>(outputs), 1);
}

// ---- graph convolution ----------------------------------------------------------------

GcnLayerParams GcnLayerParams::Create(const std::string &name, std::size_t in, std::size_t out,
                                      std::size_t edge_dim, std::mt19937_64 &rng) {
  GcnLayerParams p;
  p.weight = Uniform(name + ".weight", {in + edge_dim, out}, in + edge_dim, rng);
  p.edge_dim = edge_dim;
  return p;
}

void GcnLayerParams::Collect(std::vector<Parameter *> &out) { out.push_back(&weight); }

Var GcnLayer(const ParamBinder &bind, Var h, const GcnLayerParams &p, const Tensor &mask,
             Var edges) {
  const std::size_t n = h.value().rows();
  if (mask.rows() != n || mask.cols() != n) throw ShapeError("gcn mask", mask.shape(), Shape{n, n});
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) degree[i] += mask.at(i, j) != 0.0 ? 1.0 : 0.0;
  }
  Tensor norm({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.at(i, j) != 0.0) norm.at(i, j) = 1.0 / std::sqrt(degree[i] * degree[j]);
    }
  }
  Tape &tape = bind.tape();
  Var aggregated = MatMul(tape.Constant(norm), h);
  if (p.edge_dim > 0) {
    if (!edges.valid()) throw std::invalid_argument("GCN layer expects edge features");
    // Row i of `spread` holds norm(i, j) at column i*n + j.
    Tensor spread({n, n * n});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) spread.at(i, i * n + j) = norm.at(i, j);
    }
    aggregated = Concat({aggregated, MatMul(tape.Constant(std::move(spread)), edges)}, 1);
  }
  return Relu(MatMul(aggregated, bind(p.weight)));
}

// ---- pooling ------------------------------------------------------------------------------

PoolingParams PoolingParams::Create(const std::string &name, std::size_t dim,
                                    std::mt19937_64 &rng) {
  return {Uniform(name + ".weight", {dim, 1}, dim, rng)};
}

void PoolingParams::Collect(std::vector<Parameter *> &out) { out.push_back(&weight); }

Var PoolGraph(const ParamBinder &bind, Var h, const PoolingParams &p,
              std::vector<Tensor> *weights) {
  Var scores = Tanh(MatMul(h, bind(p.weight)));  // n x 1
  Var alpha = Softmax(scores, 0);
  if (weights != nullptr) weights->push_back(alpha.value());
  return MatMul(Transpose(alpha), h);
}

Var ComposeSentence(std::span<const Var> pooled, Var h_e1, Var h_e2) {
  Var v = Add(h_e1, h_e2);
  for (const Var &g : pooled) v = Add(v, g);
  return v;
}

}  // namespace mgre
