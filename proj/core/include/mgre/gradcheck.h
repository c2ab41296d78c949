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

#ifndef MGRE_GRADCHECK_H_
#define MGRE_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgre/autodiff.h"

namespace mgre {

struct GradCheckOptions {
  double step = 1e-5;
  // Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // 0 checks every coordinate; otherwise a seeded sample per parameter.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 17;
};

struct ParamGradError {
  std::string name;
  std::size_t coords_checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  // One entry per checked parameter; frozen parameters are absent.
  std::vector<ParamGradError> per_param;
};

// Builds a scalar loss on the tape it is given. Must be deterministic and
// must bind the parameters through Tape::Param.
using LossBuilder = std::function<Var(Tape &)>;

// Compares the backward pass against central differences. Throws
// std::runtime_error if the loss or a gradient is non-finite. Parameter values
// are restored and gradients are left as computed by the backward pass.
GradCheckReport GradientCheck(const LossBuilder &loss, std::span<Parameter *const> params,
                              const GradCheckOptions &options = {});

}  // namespace mgre

#endif  // MGRE_GRADCHECK_H_
