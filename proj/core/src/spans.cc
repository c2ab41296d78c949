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

#include "mgre/spans.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mgre {

std::string_view SpanBucketName(SpanBucket bucket) {
  switch (bucket) {
    case SpanBucket::kShort: return "short";
    case SpanBucket::kMedium: return "medium";
    case SpanBucket::kLong: return "long";
  }
  return "?";
}

SpanThresholds FixedSpanThresholds(double mean, double stddev) {
  if (!(stddev >= 0.0)) throw std::invalid_argument("span stddev must be non-negative");
  return {mean, stddev, false};
}

SpanThresholds DeriveSpanThresholds(std::span<const Sentence> sentences) {
  if (sentences.empty()) throw std::invalid_argument("span statistics of an empty set");
  double sum = 0.0;
  for (const Sentence &s : sentences) sum += static_cast<double>(EntityGap(s));
  const double mean = sum / sentences.size();
  double sq = 0.0;
  for (const Sentence &s : sentences) {
    const double d = static_cast<double>(EntityGap(s)) - mean;
    sq += d * d;
  }
  return {mean, std::sqrt(sq / sentences.size()), true};
}

SpanBucket ClassifySpan(std::size_t gap, const SpanThresholds &t) {
  const double k = static_cast<double>(gap);
  if (k <= t.short_max()) return SpanBucket::kShort;
  if (k >= t.long_min()) return SpanBucket::kLong;
  return SpanBucket::kMedium;
}

std::array<BucketReport, 3> SpanBucketEval(std::span<const Sentence> sentences,
                                           std::span<const std::size_t> predicted,
                                           const SpanThresholds &thresholds) {
  if (sentences.empty()) throw std::invalid_argument("span bucket evaluation of an empty set");
  if (sentences.size() != predicted.size()) {
    throw std::invalid_argument("prediction count differs from sentence count");
  }
  std::array<std::vector<std::size_t>, 3> gold, pred;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const Sentence &s = sentences[i];
    if (!s.label) throw std::invalid_argument("sentence " + s.id + " has no gold label");
    const auto b = static_cast<std::size_t>(ClassifySpan(EntityGap(s), thresholds));
    gold[b].push_back(s.label->index());
    pred[b].push_back(predicted[i]);
  }
  std::array<BucketReport, 3> out;
  for (std::size_t b = 0; b < 3; ++b) {
    out[b].bucket = kSpanBuckets[b];
    out[b].size = gold[b].size();
    out[b].empty = gold[b].empty();
    out[b].report = Score(gold[b], pred[b]);
  }
  return out;
}

}  // namespace mgre
