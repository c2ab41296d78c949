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

#ifndef MGRE_VOCAB_H_
#define MGRE_VOCAB_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mgre/corpus.h"

namespace mgre {

// Symbol <-> index map. Open vocabularies reserve index 0 for unknown
// symbols; once frozen, Add() stops allocating and unseen symbols map to 0.
// Closed vocabularies have no UNK row and reject unknown symbols.
class Vocab {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::string_view kUnkSymbol = "<unk>";

  Vocab();
  static Vocab Closed(std::span<const std::string> symbols);

  // Returns the index of `symbol`, allocating it if the vocab is not frozen.
  std::size_t Add(std::string_view symbol);
  // kUnk for unseen symbols (std::out_of_range for closed vocabularies).
  std::size_t Lookup(std::string_view symbol) const;
  bool Contains(std::string_view symbol) const;
  const std::string &Symbol(std::size_t index) const { return symbols_.at(index); }

  void Freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  bool has_unk() const { return has_unk_; }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string> &symbols() const { return symbols_; }

  // Rebuilds an open vocab from its symbol list (index 0 must be UNK).
  static Vocab FromSymbols(std::span<const std::string> symbols, bool frozen);

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
  bool frozen_ = false;
  bool has_unk_ = true;
};

struct VocabSet {
  Vocab pos;
  Vocab deprel;
  Vocab ner;
  Vocab label;  // closed, kNumLabels entries in RelationLabel::index() order
};

// The fixed relation label space.
Vocab LabelVocab();

// Indexes every POS, dependency relation and entity type seen in the
// training sentences, in first-seen order, and freezes the result. Throws
// std::invalid_argument on an empty corpus.
VocabSet BuildVocabs(std::span<const Sentence> train);

}  // namespace mgre

#endif  // MGRE_VOCAB_H_
