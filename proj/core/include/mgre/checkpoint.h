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

// Model checkpoints and inspection dumps.
//
// A checkpoint is an 8-byte magic "MGRECKPT", a little-endian uint32 format
// version, a uint64 byte length, that many bytes of JSON metadata (config,
// vocabularies, DREF counts, parameter names and shapes) and finally every
// parameter's values as raw IEEE-754 doubles in metadata order. Loading
// reproduces logits bit-for-bit.

#ifndef MGRE_CHECKPOINT_H_
#define MGRE_CHECKPOINT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mgre/features.h"
#include "mgre/graph.h"
#include "mgre/model.h"
#include "mgre/vocab.h"

namespace mgre {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const Model &model);
// Throws std::runtime_error on a malformed or incompatible checkpoint.
Model DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const Model &model, const std::string &path);
Model LoadCheckpoint(const std::string &path);

// {"total": N, "same_pos_only": b, "triples": {"HEAD|DEP|REL": {"count", "ratio", "row"}}}
std::string DrefTableJson(const DrefTable &table);
// {"pos": [...], "deprel": [...], "ner": [...], "label": [...]}
std::string VocabsJson(const VocabSet &vocabs);
// Sub-graph size histograms keyed by graph kind, plus basic corpus counts.
std::string CorpusStatsJson(std::span<const Sentence> sentences, std::size_t expansion_order);

}  // namespace mgre

#endif  // MGRE_CHECKPOINT_H_
