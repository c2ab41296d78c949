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

#include "mgre/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mgre {

namespace {

double Evaluate(const LossBuilder &loss) {
  Tape tape;
  Var out = loss(tape);
  if (out.value().size() != 1) {
    throw std::invalid_argument("gradient check needs a scalar loss, got shape " +
                                ShapeString(out.value().shape()));
  }
  double v = out.value()[0];
  if (!std::isfinite(v)) throw std::runtime_error("gradient check: non-finite loss");
  return v;
}

}  // namespace

GradCheckReport GradientCheck(const LossBuilder &loss, std::span<Parameter *const> params,
                              const GradCheckOptions &options) {
  for (Parameter *p : params) p->ZeroGrad();
  {
    Tape tape;
    Var out = loss(tape);
    if (!std::isfinite(out.value()[0])) throw std::runtime_error("gradient check: non-finite loss");
    tape.Backward(out);
  }

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (Parameter *p : params) {
    if (!p->requires_grad) continue;
    if (!p->grad.AllFinite()) {
      throw std::runtime_error("gradient check: non-finite gradient in " + p->name);
    }
    std::vector<std::size_t> coords(p->value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_param > 0 && coords.size() > options.max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_param);
      std::sort(coords.begin(), coords.end());
    }

    ParamGradError entry{p->name, coords.size(), 0.0, 0.0};
    for (std::size_t i : coords) {
      const double saved = p->value[i];
      p->value[i] = saved + options.step;
      const double plus = Evaluate(loss);
      p->value[i] = saved - options.step;
      const double minus = Evaluate(loss);
      p->value[i] = saved;

      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = p->grad[i];
      const double abs_err = std::abs(numeric - analytic);
      const double denom = std::max({std::abs(numeric), std::abs(analytic), options.floor});
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
      entry.max_rel_error = std::max(entry.max_rel_error, abs_err / denom);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.per_param.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mgre
