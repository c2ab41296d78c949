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

#include "mgre/vocab.h"

#include <stdexcept>

namespace mgre {

Vocab::Vocab() {
  symbols_.emplace_back(kUnkSymbol);
  index_.emplace(std::string(kUnkSymbol), kUnk);
}

Vocab Vocab::Closed(std::span<const std::string> symbols) {
  Vocab v;
  v.symbols_.clear();
  v.index_.clear();
  v.has_unk_ = false;
  for (const std::string &s : symbols) {
    if (!v.index_.emplace(s, v.symbols_.size()).second) {
      throw std::invalid_argument("duplicate vocabulary symbol '" + s + "'");
    }
    v.symbols_.push_back(s);
  }
  v.frozen_ = true;
  return v;
}

Vocab Vocab::FromSymbols(std::span<const std::string> symbols, bool frozen) {
  if (symbols.empty() || symbols[0] != kUnkSymbol) {
    throw std::invalid_argument("vocabulary must start with " + std::string(kUnkSymbol));
  }
  Vocab v;
  for (std::size_t i = 1; i < symbols.size(); ++i) {
    if (v.Contains(symbols[i])) {
      throw std::invalid_argument("duplicate vocabulary symbol '" + symbols[i] + "'");
    }
    v.Add(symbols[i]);
  }
  v.frozen_ = frozen;
  return v;
}

std::size_t Vocab::Add(std::string_view symbol) {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  if (frozen_) {
    if (!has_unk_) throw std::out_of_range("unknown symbol '" + std::string(symbol) + "'");
    return kUnk;
  }
  std::size_t id = symbols_.size();
  symbols_.emplace_back(symbol);
  index_.emplace(std::string(symbol), id);
  return id;
}

std::size_t Vocab::Lookup(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  if (!has_unk_) throw std::out_of_range("unknown symbol '" + std::string(symbol) + "'");
  return kUnk;
}

bool Vocab::Contains(std::string_view symbol) const {
  return index_.contains(std::string(symbol));
}

Vocab LabelVocab() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kNumLabels; ++i) names.push_back(RelationLabel::FromIndex(i).ToString());
  return Vocab::Closed(names);
}

VocabSet BuildVocabs(std::span<const Sentence> train) {
  if (train.empty()) throw std::invalid_argument("cannot build vocabularies from an empty corpus");
  VocabSet set;
  for (const Sentence &s : train) {
    for (const Token &t : s.tokens) {
      set.pos.Add(t.pos);
      set.deprel.Add(t.deprel);
      set.ner.Add(t.ner);
    }
  }
  set.pos.Freeze();
  set.deprel.Freeze();
  set.ner.Freeze();
  set.label = LabelVocab();
  return set;
}

}  // namespace mgre
