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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Core>

namespace mgre {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap AsMatrix(const Tensor &t) {
  return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

MutMap AsMatrix(Tensor &t) {
  return MutMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

void CheckSameTape(Var a, Var b) {
  if (&a.tape() != &b.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
}

void RequireMatrixRank(const char *op, const Tensor &t) {
  if (t.rank() != 1 && t.rank() != 2) {
    throw ShapeError(std::string(op) + ": unsupported rank for shape " +
                     ShapeString(t.shape()));
  }
}

// Shared implementation for elementwise unary maps. `derivative` receives the
// input and the output value.
template <typename Fwd, typename Deriv>
Var Elementwise(Var a, Fwd forward, Deriv derivative) {
  const Tensor &x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = forward(x[i]);
  std::size_t ia = a.id();
  return a.tape().Record(
      std::move(y), {ia}, [ia, derivative](Tape &tape, std::size_t self) {
        if (!tape.requires_grad(ia)) return;
        const Tensor &g = tape.grad(self);
        const Tensor &x = tape.value(ia);
        const Tensor &y = tape.value(self);
        Tensor &gx = tape.GradFor(ia);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gx[i] += g[i] * derivative(x[i], y[i]);
        }
      });
}

}  // namespace

// ---- Var / Tape ------------------------------------------------------------

const Tensor &Var::value() const { return tape_->value(id_); }
const Tensor &Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::Variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::Param(Parameter &parameter) {
  Node n;
  n.external = &parameter.value;
  n.param = &parameter;
  n.requires_grad = parameter.requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::ParamView(const Parameter &parameter) {
  Node n;
  n.external = &parameter.value;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var ParamBinder::operator()(const Parameter &p) const {
  // Parameters are only written through Tape::Backward on tracked leaves.
  return track_ ? tape_.Param(const_cast<Parameter &>(p)) : tape_.ParamView(p);
}

const Tensor &Tape::value(std::size_t id) const {
  const Node &n = nodes_[id];
  return n.external != nullptr ? *n.external : n.value;
}

const Tensor &Tape::grad(std::size_t id) const {
  const Node &n = nodes_[id];
  return n.param != nullptr ? n.param->grad : n.grad;
}

Tensor &Tape::GradFor(std::size_t id) {
  Node &n = nodes_[id];
  if (n.param != nullptr) {
    if (n.param->grad.shape() != n.param->value.shape()) n.param->ZeroGrad();
    return n.param->grad;
  }
  if (n.grad.empty() && value(id).size() > 0) n.grad = Tensor(value(id).shape());
  return n.grad;
}

Var Tape::Record(Tensor value, std::vector<std::size_t> parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (std::size_t p : parents) n.requires_grad = n.requires_grad || nodes_[p].requires_grad;
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Tape::Backward(Var root) {
  if (&root.tape() != this) throw std::invalid_argument("root is not on this tape");
  for (Node &n : nodes_) n.grad = Tensor();
  GradFor(root.id()).Fill(1.0);
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node &n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
  }
}

// ---- core operations -------------------------------------------------------

Var MatMul(Var a, Var b) {
  CheckSameTape(a, b);
  const Tensor &x = a.value();
  const Tensor &y = b.value();
  RequireMatrixRank("matmul", x);
  RequireMatrixRank("matmul", y);
  if (x.cols() != y.rows()) throw ShapeError("matmul", x.shape(), y.shape());
  Tensor out({x.rows(), y.cols()});
  AsMatrix(out).noalias() = AsMatrix(x) * AsMatrix(y);
  std::size_t ia = a.id(), ib = b.id();
  return a.tape().Record(std::move(out), {ia, ib}, [ia, ib](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    if (tape.requires_grad(ia)) {
      AsMatrix(tape.GradFor(ia)).noalias() += AsMatrix(g) * AsMatrix(tape.value(ib)).transpose();
    }
    if (tape.requires_grad(ib)) {
      AsMatrix(tape.GradFor(ib)).noalias() += AsMatrix(tape.value(ia)).transpose() * AsMatrix(g);
    }
  });
}

namespace {

enum class Broadcast { kSame, kScalarA, kScalarB, kRowBiasB };

Broadcast ResolveBroadcast(const char *op, const Tensor &x, const Tensor &y) {
  if (x.shape() == y.shape()) return Broadcast::kSame;
  if (y.size() == 1) return Broadcast::kScalarB;
  if (x.size() == 1) return Broadcast::kScalarA;
  if (x.rank() == 2 && y.size() == x.cols() && (y.rank() == 1 || y.rows() == 1)) {
    return Broadcast::kRowBiasB;
  }
  throw ShapeError(op, x.shape(), y.shape());
}

Var AddScaled(Var a, Var b, double sign) {
  CheckSameTape(a, b);
  const Tensor &x = a.value();
  const Tensor &y = b.value();
  Broadcast mode = ResolveBroadcast(sign > 0 ? "add" : "sub", x, y);
  Tensor out(mode == Broadcast::kScalarA ? y.shape() : x.shape());
  switch (mode) {
    case Broadcast::kSame:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + sign * y[i];
      break;
    case Broadcast::kScalarB:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + sign * y[0];
      break;
    case Broadcast::kScalarA:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[0] + sign * y[i];
      break;
    case Broadcast::kRowBiasB: {
      std::size_t c = x.cols();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + sign * y[i % c];
      break;
    }
  }
  std::size_t ia = a.id(), ib = b.id();
  return a.tape().Record(std::move(out), {ia, ib}, [ia, ib, mode, sign](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    if (tape.requires_grad(ia)) {
      Tensor &ga = tape.GradFor(ia);
      if (mode == Broadcast::kScalarA) {
        ga[0] += g.Sum();
      } else {
        ga += g;
      }
    }
    if (tape.requires_grad(ib)) {
      Tensor &gb = tape.GradFor(ib);
      switch (mode) {
        case Broadcast::kSame:
        case Broadcast::kScalarA:
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += sign * g[i];
          break;
        case Broadcast::kScalarB:
          gb[0] += sign * g.Sum();
          break;
        case Broadcast::kRowBiasB: {
          std::size_t c = gb.size();
          for (std::size_t i = 0; i < g.size(); ++i) gb[i % c] += sign * g[i];
          break;
        }
      }
    }
  });
}

}  // namespace

Var Add(Var a, Var b) { return AddScaled(a, b, 1.0); }
Var Sub(Var a, Var b) { return AddScaled(a, b, -1.0); }

Var Mul(Var a, Var b) {
  CheckSameTape(a, b);
  const Tensor &x = a.value();
  const Tensor &y = b.value();
  Broadcast mode = ResolveBroadcast("mul", x, y);
  if (mode == Broadcast::kRowBiasB) throw ShapeError("mul", x.shape(), y.shape());
  Tensor out(mode == Broadcast::kScalarA ? y.shape() : x.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double xv = mode == Broadcast::kScalarA ? x[0] : x[i];
    double yv = mode == Broadcast::kScalarB ? y[0] : y[i];
    out[i] = xv * yv;
  }
  std::size_t ia = a.id(), ib = b.id();
  return a.tape().Record(std::move(out), {ia, ib}, [ia, ib, mode](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    const Tensor &x = tape.value(ia);
    const Tensor &y = tape.value(ib);
    auto xv = [&](std::size_t i) { return mode == Broadcast::kScalarA ? x[0] : x[i]; };
    auto yv = [&](std::size_t i) { return mode == Broadcast::kScalarB ? y[0] : y[i]; };
    if (tape.requires_grad(ia)) {
      Tensor &ga = tape.GradFor(ia);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[mode == Broadcast::kScalarA ? 0 : i] += g[i] * yv(i);
      }
    }
    if (tape.requires_grad(ib)) {
      Tensor &gb = tape.GradFor(ib);
      for (std::size_t i = 0; i < g.size(); ++i) {
        gb[mode == Broadcast::kScalarB ? 0 : i] += g[i] * xv(i);
      }
    }
  });
}

Var Scale(Var a, double factor) {
  return Elementwise(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var Concat(std::initializer_list<Var> parts, std::size_t axis) {
  return Concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var Concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat of zero tensors");
  const Tensor &first = parts[0].value();
  RequireMatrixRank("concat", first);
  const std::size_t rank = first.rank();
  if (axis >= rank) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for shape " +
                     ShapeString(first.shape()));
  }
  // Rank 1 is treated as a single row; its only axis concatenates columns.
  const bool along_cols = rank == 1 || axis == 1;
  std::size_t rows = first.rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids;
  for (const Var &p : parts) {
    CheckSameTape(parts[0], p);
    const Tensor &t = p.value();
    if (t.rank() != rank) throw ShapeError("concat", first.shape(), t.shape());
    if (along_cols) {
      if (t.rows() != rows) throw ShapeError("concat", first.shape(), t.shape());
      total += t.cols();
    } else {
      if (t.cols() != first.cols()) throw ShapeError("concat", first.shape(), t.shape());
      total += t.rows();
    }
    ids.push_back(p.id());
  }
  Shape shape = rank == 1 ? Shape{total}
                          : (along_cols ? Shape{rows, total} : Shape{total, first.cols()});
  Tensor out(shape);
  std::size_t offset = 0;
  for (const Var &p : parts) {
    const Tensor &t = p.value();
    if (along_cols) {
      for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(t.data() + r * t.cols(), t.cols(), out.data() + r * total + offset);
      }
      offset += t.cols();
    } else {
      std::copy_n(t.data(), t.size(), out.data() + offset * first.cols());
      offset += t.rows();
    }
  }
  return parts[0].tape().Record(std::move(out), ids, [ids, along_cols](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    std::size_t total = g.cols();
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const Tensor &t = tape.value(id);
      if (tape.requires_grad(id)) {
        Tensor &gp = tape.GradFor(id);
        if (along_cols) {
          for (std::size_t r = 0; r < t.rows(); ++r) {
            for (std::size_t c = 0; c < t.cols(); ++c) {
              gp[r * t.cols() + c] += g[r * total + offset + c];
            }
          }
        } else {
          for (std::size_t i = 0; i < t.size(); ++i) gp[i] += g[offset * t.cols() + i];
        }
      }
      offset += along_cols ? t.cols() : t.rows();
    }
  });
}

Var Slice(Var a, std::size_t axis, std::size_t start, std::size_t length) {
  const Tensor &x = a.value();
  RequireMatrixRank("slice", x);
  if (axis >= x.rank()) {
    throw ShapeError("slice: axis " + std::to_string(axis) + " out of range for shape " +
                     ShapeString(x.shape()));
  }
  const bool along_cols = x.rank() == 1 || axis == 1;
  const std::size_t extent = along_cols ? x.cols() : x.rows();
  if (start + length > extent) {
    throw ShapeError("slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") out of range for shape " + ShapeString(x.shape()));
  }
  const std::size_t rows = x.rows(), cols = x.cols();
  Shape shape = x.rank() == 1 ? Shape{length}
                              : (along_cols ? Shape{rows, length} : Shape{length, cols});
  Tensor out(shape);
  if (along_cols) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(x.data() + r * cols + start, length, out.data() + r * length);
    }
  } else {
    std::copy_n(x.data() + start * cols, length * cols, out.data());
  }
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia},
                         [ia, along_cols, start, length, rows, cols](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    Tensor &ga = tape.GradFor(ia);
    if (along_cols) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < length; ++c) ga[r * cols + start + c] += g[r * length + c];
      }
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) ga[start * cols + i] += g[i];
    }
  });
}

Var Sum(Var a) {
  Tensor out = Tensor::Scalar(a.value().Sum());
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia}, [ia](Tape &tape, std::size_t self) {
    double g = tape.grad(self)[0];
    Tensor &ga = tape.GradFor(ia);
    for (double &v : ga.values()) v += g;
  });
}

Var Sum(Var a, std::size_t axis) {
  const Tensor &x = a.value();
  if (x.rank() != 2 || axis > 1) {
    throw ShapeError("sum over axis " + std::to_string(axis) + " of shape " + ShapeString(x.shape()));
  }
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out(axis == 0 ? Shape{1, cols} : Shape{rows, 1});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[axis == 0 ? c : r] += x[r * cols + c];
  }
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia}, [ia, axis, rows, cols](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    Tensor &ga = tape.GradFor(ia);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += g[axis == 0 ? c : r];
    }
  });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var Transpose(Var a) {
  const Tensor &x = a.value();
  RequireMatrixRank("transpose", x);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({cols, rows});
  AsMatrix(out) = AsMatrix(x).transpose();
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia}, [ia](Tape &tape, std::size_t self) {
    AsMatrix(tape.GradFor(ia)) += AsMatrix(tape.grad(self)).transpose();
  });
}

Var Reshape(Var a, Shape shape) {
  Tensor out = a.value().Reshaped(std::move(shape));
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia}, [ia](Tape &tape, std::size_t self) {
    tape.GradFor(ia) += tape.grad(self);
  });
}

Var GatherRows(Var table, std::span<const std::size_t> indices) {
  const Tensor &t = table.value();
  if (t.rank() != 2) throw ShapeError("gather from tensor of shape " + ShapeString(t.shape()));
  const std::size_t cols = t.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  Tensor out({idx.size(), cols});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= t.rows()) {
      throw ShapeError("gather index " + std::to_string(idx[r]) + " out of range for shape " +
                       ShapeString(t.shape()));
    }
    std::copy_n(t.data() + idx[r] * cols, cols, out.data() + r * cols);
  }
  std::size_t it = table.id();
  return table.tape().Record(std::move(out), {it}, [it, idx = std::move(idx), cols](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    Tensor &gt = tape.GradFor(it);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) gt[idx[r] * cols + c] += g[r * cols + c];
    }
  });
}

Var OuterAdd(Var column, Var row) {
  CheckSameTape(column, row);
  const Tensor &c = column.value();
  const Tensor &r = row.value();
  const bool col_ok = c.rank() == 1 || (c.rank() == 2 && c.cols() == 1);
  const bool row_ok = r.rank() == 1 || (r.rank() == 2 && r.rows() == 1);
  if (!col_ok || !row_ok) throw ShapeError("outer_add", c.shape(), r.shape());
  const std::size_t n = c.size(), m = r.size();
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = c[i] + r[j];
  }
  std::size_t ic = column.id(), ir = row.id();
  return column.tape().Record(std::move(out), {ic, ir}, [ic, ir, n, m](Tape &tape, std::size_t self) {
    const Tensor &g = tape.grad(self);
    if (tape.requires_grad(ic)) {
      Tensor &gc = tape.GradFor(ic);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) gc[i] += g[i * m + j];
      }
    }
    if (tape.requires_grad(ir)) {
      Tensor &gr = tape.GradFor(ir);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) gr[j] += g[i * m + j];
      }
    }
  });
}

// ---- nonlinearities ----------------------------------------------------------

Var LeakyRelu(Var a, double slope) {
  return Elementwise(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var Relu(Var a) {
  return Elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Elu(Var a, double alpha) {
  return Elementwise(
      a, [alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); },
      [alpha](double x, double y) { return x > 0.0 ? 1.0 : y + alpha; });
}

Var Tanh(Var a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(Var a) {
  return Elementwise(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

namespace {

// Softmax over `count` entries spaced by `stride` starting at `base`.
void SoftmaxStrided(const double *in, double *out, std::size_t base, std::size_t count,
                    std::size_t stride) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) mx = std::max(mx, in[base + k * stride]);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double e = std::exp(in[base + k * stride] - mx);
    out[base + k * stride] = e;
    total += e;
  }
  for (std::size_t k = 0; k < count; ++k) out[base + k * stride] /= total;
}

void SoftmaxBackwardStrided(const double *y, const double *g, double *gx, std::size_t base,
                            std::size_t count, std::size_t stride) {
  double dot = 0.0;
  for (std::size_t k = 0; k < count; ++k) dot += g[base + k * stride] * y[base + k * stride];
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t i = base + k * stride;
    gx[i] += y[i] * (g[i] - dot);
  }
}

}  // namespace

Var Softmax(Var a, std::size_t axis) {
  const Tensor &x = a.value();
  RequireMatrixRank("softmax", x);
  if (axis >= x.rank()) {
    throw ShapeError("softmax: axis " + std::to_string(axis) + " out of range for shape " +
                     ShapeString(x.shape()));
  }
  const bool along_cols = x.rank() == 1 || axis == 1;
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out(x.shape());
  if (along_cols) {
    for (std::size_t r = 0; r < rows; ++r) SoftmaxStrided(x.data(), out.data(), r * cols, cols, 1);
  } else {
    for (std::size_t c = 0; c < cols; ++c) SoftmaxStrided(x.data(), out.data(), c, rows, cols);
  }
  std::size_t ia = a.id();
  return a.tape().Record(std::move(out), {ia}, [ia, along_cols, rows, cols](Tape &tape, std::size_t self) {
    const Tensor &y = tape.value(self);
    const Tensor &g = tape.grad(self);
    Tensor &gx = tape.GradFor(ia);
    if (along_cols) {
      for (std::size_t r = 0; r < rows; ++r) {
        SoftmaxBackwardStrided(y.data(), g.data(), gx.data(), r * cols, cols, 1);
      }
    } else {
      for (std::size_t c = 0; c < cols; ++c) {
        SoftmaxBackwardStrided(y.data(), g.data(), gx.data(), c, rows, cols);
      }
    }
  });
}

Var MaskedSoftmaxRows(Var scores, const Tensor &mask) {
  const Tensor &x = scores.value();
  if (x.rank() != 2 || mask.shape() != x.shape()) {
    throw ShapeError("masked_softmax", x.shape(), mask.shape());
  }
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t open = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (mask[r * cols + c] == 0.0) continue;
      mx = std::max(mx, x[r * cols + c]);
      ++open;
    }
    // Non-finite scores propagate to the output.
    if (open == 0) {
      throw std::invalid_argument("masked_softmax: row " + std::to_string(r) +
                                  " has no unmasked entry");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (mask[r * cols + c] == 0.0) continue;
      double e = std::exp(x[r * cols + c] - mx);
      out[r * cols + c] = e;
      total += e;
    }
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] /= total;
  }
  std::size_t ia = scores.id();
  return scores.tape().Record(std::move(out), {ia}, [ia, rows, cols](Tape &tape, std::size_t self) {
    const Tensor &y = tape.value(self);
    const Tensor &g = tape.grad(self);
    Tensor &gx = tape.GradFor(ia);
    // Masked entries have y == 0 and so receive exactly zero gradient.
    for (std::size_t r = 0; r < rows; ++r) {
      SoftmaxBackwardStrided(y.data(), g.data(), gx.data(), r * cols, cols, 1);
    }
  });
}

Var CrossEntropy(Var logits, std::size_t label) {
  const Tensor &x = logits.value();
  if (!(x.rank() == 1 || (x.rank() == 2 && x.rows() == 1))) {
    throw ShapeError("cross_entropy expects 1-D logits, got " + ShapeString(x.shape()));
  }
  const std::size_t n = x.size();
  if (label >= n) {
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                            " out of range for " + std::to_string(n) + " classes");
  }
  auto probs = std::make_shared<std::vector<double>>(n);
  SoftmaxStrided(x.data(), probs->data(), 0, n, 1);
  double mx = *std::max_element(x.values().begin(), x.values().end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::exp(x[i] - mx);
  double loss = mx + std::log(total) - x[label];
  std::size_t ia = logits.id();
  return logits.tape().Record(Tensor::Scalar(loss), {ia}, [ia, label, probs](Tape &tape, std::size_t self) {
    double g = tape.grad(self)[0];
    Tensor &gx = tape.GradFor(ia);
    for (std::size_t i = 0; i < probs->size(); ++i) {
      gx[i] += g * ((*probs)[i] - (i == label ? 1.0 : 0.0));
    }
  });
}

}  // namespace mgre
