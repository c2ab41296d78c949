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

#include "mgre/tensor.h"

#include <cmath>
#include <numeric>
#include <sstream>

namespace mgre {

std::string ShapeString(const Shape &shape) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ",";
    out << shape[i];
  }
  out << ")";
  return out.str();
}

ShapeError::ShapeError(const std::string &op, const Shape &a, const Shape &b)
    : std::invalid_argument(op + ": incompatible shapes " + ShapeString(a) +
                            " and " + ShapeString(b)) {}

std::size_t ShapeSize(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), values_(ShapeSize(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != ShapeSize(shape_)) {
    throw ShapeError("tensor of shape " + ShapeString(shape_) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::Filled(Shape shape, double value) {
  Tensor t(std::move(shape));
  t.Fill(value);
  return t;
}

Tensor Tensor::Vector(std::vector<double> values) {
  Shape shape{values.size()};
  return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::Matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto &row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 2) return shape_[0];
  if (shape_.size() == 1) return 1;
  throw ShapeError("matrix view of tensor with shape " + ShapeString(shape_));
}

std::size_t Tensor::cols() const {
  if (shape_.size() == 2) return shape_[1];
  if (shape_.size() == 1) return shape_[0];
  throw ShapeError("matrix view of tensor with shape " + ShapeString(shape_));
}

void Tensor::Fill(double value) {
  std::fill(values_.begin(), values_.end(), value);
}

Tensor Tensor::Reshaped(Shape shape) const {
  if (ShapeSize(shape) != values_.size()) {
    throw ShapeError("reshape", shape_, shape);
  }
  return Tensor(std::move(shape), values_);
}

Tensor &Tensor::operator+=(const Tensor &other) {
  if (other.size() != size()) throw ShapeError("accumulate", shape_, other.shape_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Tensor &Tensor::operator*=(double scale) {
  for (double &v : values_) v *= scale;
  return *this;
}

double Tensor::Sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

double Tensor::SquaredNorm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

bool Tensor::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void InitUniformFanIn(Tensor &t, std::size_t fan_in, std::mt19937_64 &rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in == 0 ? 1 : fan_in));
  for (double &v : t.values()) v = (2.0 * Canonical(rng) - 1.0) * bound;
}

}  // namespace mgre
