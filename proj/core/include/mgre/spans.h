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

// Span-length slices of an evaluation set. k is the number of tokens strictly
// between the two entity mentions; with mean mu and standard deviation sigma
// of k, SHORT is k <= mu - sigma, LONG is k >= mu + sigma and MEDIUM the rest.

#ifndef MGRE_SPANS_H_
#define MGRE_SPANS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "mgre/corpus.h"
#include "mgre/scorer.h"

namespace mgre {

enum class SpanBucket { kShort, kMedium, kLong };

inline constexpr std::array<SpanBucket, 3> kSpanBuckets = {SpanBucket::kShort,
                                                           SpanBucket::kMedium, SpanBucket::kLong};

std::string_view SpanBucketName(SpanBucket bucket);  // "short", "medium", "long"

struct SpanThresholds {
  double mean = 0.0;
  double stddev = 0.0;
  bool data_derived = false;

  double short_max() const { return mean - stddev; }
  double long_min() const { return mean + stddev; }
};

// Fixed thresholds, e.g. the literal values from the literature.
SpanThresholds FixedSpanThresholds(double mean, double stddev);
// Mean and population standard deviation of k over the sentences. Throws
// std::invalid_argument on an empty set.
SpanThresholds DeriveSpanThresholds(std::span<const Sentence> sentences);

SpanBucket ClassifySpan(std::size_t gap, const SpanThresholds &thresholds);

struct BucketReport {
  SpanBucket bucket = SpanBucket::kMedium;
  std::size_t size = 0;
  bool empty = true;
  EvalReport report;
};

// One report per bucket, in kSpanBuckets order. Empty buckets are marked,
// not rejected. Throws std::invalid_argument if the set is empty, a sentence
// is unlabeled, or the prediction count differs.
std::array<BucketReport, 3> SpanBucketEval(std::span<const Sentence> sentences,
                                           std::span<const std::size_t> predicted,
                                           const SpanThresholds &thresholds);

}  // namespace mgre

#endif  // MGRE_SPANS_H_
