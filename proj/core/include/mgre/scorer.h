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

// SemEval-2010 Task 8 style scoring.
//
// For each of the 9 relation bases a prediction is correct only if base and
// direction both match the gold label. Precision divides by every prediction
// of that base (either direction), recall by every gold instance of it. The
// official score is the unweighted mean F1 over the 9 bases, Other excluded,
// reported as a percentage.

#ifndef MGRE_SCORER_H_
#define MGRE_SCORER_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mgre/corpus.h"

namespace mgre {

struct ClassScore {
  std::string name;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  // Fractions in [0, 1]; zero when undefined.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::size_t instances = 0;
  std::size_t exact_correct = 0;
  double accuracy = 0.0;  // fraction of exact label matches, Other included
  double macro_f1 = 0.0;  // percent, 9 bases, Other excluded
  std::array<ClassScore, kNumRelationBases> bases;
  // Plain per-label scores over the 19 directed labels.
  std::array<ClassScore, kNumLabels> labels;
  // confusion[gold][predicted] over label indices.
  std::vector<std::vector<std::size_t>> confusion;
};

// Label indices as produced by RelationLabel::index(). Throws
// std::invalid_argument on length mismatch and std::out_of_range on a bad
// index. An empty set yields an all-zero report.
EvalReport Score(std::span<const std::size_t> gold, std::span<const std::size_t> predicted);

// Compact JSON rendering (UTF-8, no trailing newline).
std::string EvalReportJson(const EvalReport &report, int indent = 2);

}  // namespace mgre

#endif  // MGRE_SCORER_H_
