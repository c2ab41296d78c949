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

#include "mgre/scorer.h"

#include <stdexcept>

#include "json_io.h"

namespace mgre {

namespace {

void Finish(ClassScore &s) {
  s.precision = s.predicted == 0 ? 0.0 : static_cast<double>(s.correct) / s.predicted;
  s.recall = s.gold == 0 ? 0.0 : static_cast<double>(s.correct) / s.gold;
  const double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
}

std::size_t BaseOf(std::size_t label) { return label == kOtherLabel ? kOtherBase : label / 2; }

}  // namespace

EvalReport Score(std::span<const std::size_t> gold, std::span<const std::size_t> predicted) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("scoring " + std::to_string(predicted.size()) +
                                " predictions against " + std::to_string(gold.size()) +
                                " gold labels");
  }
  EvalReport r;
  r.instances = gold.size();
  r.confusion.assign(kNumLabels, std::vector<std::size_t>(kNumLabels, 0));
  for (std::size_t b = 0; b < kNumRelationBases; ++b) r.bases[b].name = kRelationBases[b];
  for (std::size_t l = 0; l < kNumLabels; ++l) r.labels[l].name = RelationLabel::FromIndex(l).ToString();

  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t g = gold[i], p = predicted[i];
    if (g >= kNumLabels || p >= kNumLabels) {
      throw std::out_of_range("label index out of range at instance " + std::to_string(i));
    }
    ++r.confusion[g][p];
    ++r.labels[g].gold;
    ++r.labels[p].predicted;
    if (g == p) {
      ++r.exact_correct;
      ++r.labels[g].correct;
    }
    const std::size_t gb = BaseOf(g), pb = BaseOf(p);
    if (gb != kOtherBase) ++r.bases[gb].gold;
    if (pb != kOtherBase) ++r.bases[pb].predicted;
    if (g == p && gb != kOtherBase) ++r.bases[gb].correct;
  }
  double total = 0.0;
  for (ClassScore &s : r.bases) {
    Finish(s);
    total += s.f1;
  }
  for (ClassScore &s : r.labels) Finish(s);
  r.macro_f1 = 100.0 * total / kNumRelationBases;
  r.accuracy = r.instances == 0 ? 0.0 : static_cast<double>(r.exact_correct) / r.instances;
  return r;
}

std::string EvalReportJson(const EvalReport &report, int indent) {
  return ToJson(report).dump(indent);
}

}  // namespace mgre
