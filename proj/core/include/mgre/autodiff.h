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

// Reverse-mode differentiation over dense tensors.
//
// A Tape records every operation applied to its Vars in creation order, which
// is a topological order of the expression DAG. Backward() walks the tape once
// in reverse and accumulates (sums) gradients, so shared subexpressions are
// handled without special casing. Tapes are single-threaded; independent tapes
// may read the same Parameters concurrently as long as nobody writes them.
//
// Broadcasting is deliberately narrow: scalar (size-1) operands in Add/Mul and
// a 1 x c row bias added to an r x c matrix.

#ifndef MGRE_AUTODIFF_H_
#define MGRE_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgre/tensor.h"

namespace mgre {

// A trainable (or frozen) tensor that outlives any single tape.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool requires_grad = true;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool trainable = true)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()),
        requires_grad(trainable) {}

  void ZeroGrad() { grad = Tensor(value.shape()); }
};

class Tape;

// Handle to a node on a tape. Cheap to copy.
class Var {
 public:
  Var() = default;
  Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor &value() const;
  // Gradient after Tape::Backward; empty tensor if nothing flowed here.
  const Tensor &grad() const;
  const Shape &shape() const { return value().shape(); }
  bool requires_grad() const;

  Tape &tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape *tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape &, std::size_t)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Tensor value);
  // Leaf owned by the tape; its gradient is readable through Var::grad().
  Var Variable(Tensor value);
  // Leaf bound to a parameter. Backward() adds straight into parameter.grad
  // when the parameter requires gradients, so the leaf's grad() is the
  // parameter's running total. The parameter must outlive the tape.
  Var Param(Parameter &parameter);
  // Read-only view of a parameter: no gradient is recorded for it.
  Var ParamView(const Parameter &parameter);

  // Seeds the root with ones and propagates. Gradients from a previous call
  // are discarded first.
  void Backward(Var root);

  std::size_t size() const { return nodes_.size(); }

  // Used by operation implementations.
  Var Record(Tensor value, std::vector<std::size_t> parents, BackwardFn fn);
  const Tensor &value(std::size_t id) const;
  const Tensor &grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Zero-initialized on first use.
  Tensor &GradFor(std::size_t id);

 private:
  struct Node {
    Tensor value;
    const Tensor *external = nullptr;
    Parameter *param = nullptr;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

// Puts parameters on a tape, either as gradient-tracked leaves or as
// read-only views. The read-only form never writes to the parameter.
class ParamBinder {
 public:
  ParamBinder(Tape &tape, bool track_gradients) : tape_(tape), track_(track_gradients) {}
  Var operator()(const Parameter &p) const;
  Tape &tape() const { return tape_; }

 private:
  Tape &tape_;
  bool track_;
};

// ---- core operations -----------------------------------------------------

Var MatMul(Var a, Var b);
// Same shape, scalar operand, or row-vector bias broadcast over rows of a.
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Elementwise product, or scalar times tensor.
Var Mul(Var a, Var b);
Var Scale(Var a, double factor);
Var Concat(std::span<const Var> parts, std::size_t axis);
Var Concat(std::initializer_list<Var> parts, std::size_t axis);
Var Slice(Var a, std::size_t axis, std::size_t start, std::size_t length);
Var Sum(Var a);
// Reduces one axis of a rank-2 tensor, keeping it with extent 1.
Var Sum(Var a, std::size_t axis);
Var Mean(Var a);
Var Transpose(Var a);
Var Reshape(Var a, Shape shape);
// Rows of a rank-2 table selected by index (embedding lookup).
Var GatherRows(Var table, std::span<const std::size_t> indices);
// result(i, j) = column(i) + row(j) for an n x 1 column and 1 x m row.
Var OuterAdd(Var column, Var row);

// ---- nonlinearities -------------------------------------------------------

inline constexpr double kLeakyReluSlope = 0.2;

Var LeakyRelu(Var a, double slope = kLeakyReluSlope);
Var Relu(Var a);
Var Elu(Var a, double alpha = 1.0);
Var Tanh(Var a);
Var Sigmoid(Var a);

// Softmax along an axis of a rank-2 tensor (rank 1 is a single row, axis 1).
// Uses max subtraction.
Var Softmax(Var a, std::size_t axis);
// Row-wise softmax of a square score matrix restricted to mask(i, j) != 0.
// Masked entries are exactly zero and receive no gradient. Every row must
// have at least one unmasked entry.
Var MaskedSoftmaxRows(Var scores, const Tensor &mask);

// -log softmax(logits)[label] for 1-D (or 1 x n) logits.
Var CrossEntropy(Var logits, std::size_t label);

}  // namespace mgre

#endif  // MGRE_AUTODIFF_H_
