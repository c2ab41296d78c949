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

// Differentiable building blocks of the relation classifier. Every layer
// reads its parameters through a ParamBinder so the same code serves training
// (gradients recorded) and read-only evaluation.

#ifndef MGRE_LAYERS_H_
#define MGRE_LAYERS_H_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mgre/autodiff.h"

namespace mgre {

// ---- dense -------------------------------------------------------------------

struct LinearParams {
  Parameter weight;  // in x out
  Parameter bias;    // 1 x out

  static LinearParams Create(const std::string &name, std::size_t in, std::size_t out,
                             std::mt19937_64 &rng, bool zero_init = false);
  void Collect(std::vector<Parameter *> &out);
};

// x (n x in) -> n x out
Var Linear(const ParamBinder &bind, Var x, const LinearParams &p);

// ---- BiLSTM ---------------------------------------------------------------------

struct LstmParams {
  Parameter input_weight;   // in x 4h, gate blocks ordered i, f, g, o
  Parameter hidden_weight;  // h x 4h
  Parameter bias;           // 1 x 4h

  static LstmParams Create(const std::string &name, std::size_t in, std::size_t hidden,
                           std::mt19937_64 &rng);
  std::size_t hidden() const { return hidden_weight.value.rows(); }
  void Collect(std::vector<Parameter *> &out);
};

struct BiLstmParams {
  LstmParams forward;
  LstmParams backward;

  static BiLstmParams Create(const std::string &name, std::size_t in, std::size_t hidden,
                             std::mt19937_64 &rng);
  void Collect(std::vector<Parameter *> &out);
};

// Hidden states of a unidirectional pass, rows in the order the inputs are
// consumed (reverse = true reads the last row first but still returns rows
// aligned with the input positions).
Var LstmEncode(const ParamBinder &bind, Var inputs, const LstmParams &p, bool reverse);

// inputs (n x in) -> n x 2h, row t = [forward_t ; backward_t]. Throws
// std::invalid_argument on an empty sequence.
Var BiLstmEncode(const ParamBinder &bind, Var inputs, const BiLstmParams &p);

// ---- graph attention ---------------------------------------------------------------

struct GatHeadParams {
  Parameter weight;     // in x m
  Parameter attention;  // 1 x (2m + d_e); d_e = 0 without edge features

  std::size_t out_dim() const { return weight.value.cols(); }
  std::size_t edge_dim() const { return attention.value.cols() - 2 * out_dim(); }
};

struct GatLayerParams {
  std::vector<GatHeadParams> heads;

  static GatLayerParams Create(const std::string &name, std::size_t in, std::size_t out,
                               std::size_t num_heads, std::size_t edge_dim, std::mt19937_64 &rng);
  std::size_t out_dim() const;
  void Collect(std::vector<Parameter *> &out);
};

struct HeadAttention {
  Var alpha;      // n x n, rows sum to one over the neighbourhood
  Var projected;  // n x m, W h
};

// Attention of one head. `mask` is the n x n neighbourhood (self-loops
// included); `edges` is the (n*n) x d_e feature matrix or an invalid Var when
// the head has no edge block.
HeadAttention GatHeadAttention(const ParamBinder &bind, Var h, const GatHeadParams &p,
                               const Tensor &mask, Var edges);

// Multi-head update: concat_k ELU(alpha^k W^k h). If `alphas` is given the
// attention matrix of each head is appended to it.
Var GatLayer(const ParamBinder &bind, Var h, const GatLayerParams &p, const Tensor &mask,
             Var edges, std::vector<Tensor> *alphas = nullptr);

// ---- graph convolution --------------------------------------------------------------

struct GcnLayerParams {
  Parameter weight;  // (in + d_e) x out
  std::size_t edge_dim = 0;

  static GcnLayerParams Create(const std::string &name, std::size_t in, std::size_t out,
                               std::size_t edge_dim, std::mt19937_64 &rng);
  void Collect(std::vector<Parameter *> &out);
};

// h_i' = ReLU(sum_{j in N(i)+i} (deg_i deg_j)^-1/2 W [h_j ; e_ij]), degrees
// counting the self-loop. `mask` is the neighbourhood including self-loops.
Var GcnLayer(const ParamBinder &bind, Var h, const GcnLayerParams &p, const Tensor &mask,
             Var edges);

// ---- pooling -------------------------------------------------------------------------

struct PoolingParams {
  Parameter weight;  // d_g x 1

  static PoolingParams Create(const std::string &name, std::size_t dim, std::mt19937_64 &rng);
  void Collect(std::vector<Parameter *> &out);
};

// u = tanh(h W'), a = softmax over vertices, v = sum_i a_i h_i (1 x d_g). The
// vertex weights are appended to `weights` when given.
Var PoolGraph(const ParamBinder &bind, Var h, const PoolingParams &p,
              std::vector<Tensor> *weights = nullptr);

// v = h_e1 + h_e2 + sum of pooled graph vectors.
Var ComposeSentence(std::span<const Var> pooled, Var h_e1, Var h_e2);

}  // namespace mgre

#endif  // MGRE_LAYERS_H_
