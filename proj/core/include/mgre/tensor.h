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

#ifndef MGRE_TENSOR_H_
#define MGRE_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgre {

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape &shape);

// Raised when operands of a tensor operation have incompatible shapes. The
// message names both shapes.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(const std::string &op, const Shape &a, const Shape &b);
  explicit ShapeError(const std::string &what) : std::invalid_argument(what) {}
};

// Dense row-major array of doubles. Rank 1 and rank 2 are the only ranks the
// differentiation engine operates on; matrix operations view a rank-1 tensor
// of length n as a 1 x n row.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor Filled(Shape shape, double value);
  static Tensor Scalar(double value) { return Tensor({1}, {value}); }
  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Matrix view: rank 1 is a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double &at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double *data() { return values_.data(); }
  const double *data() const { return values_.data(); }

  void Fill(double value);
  Tensor Reshaped(Shape shape) const;

  // In-place accumulation; shapes must hold the same number of values.
  Tensor &operator+=(const Tensor &other);
  Tensor &operator*=(double scale);

  double Sum() const;
  double SquaredNorm() const;
  bool AllFinite() const;

  friend bool operator==(const Tensor &a, const Tensor &b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
};

std::size_t ShapeSize(const Shape &shape);

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) initialization.
void InitUniformFanIn(Tensor &t, std::size_t fan_in, std::mt19937_64 &rng);

// Maps a 64-bit engine draw onto [0, 1) using the top 53 bits, so the
// sequence is identical across standard library implementations.
inline double Canonical(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mgre

#endif  // MGRE_TENSOR_H_
