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

// Annotated relation-extraction corpora.
//
// Two input formats are supported:
//
//  * SemEval-2010 Task 8 raw files: four lines per instance
//
//        8001\t"The <e1>pollen</e1> causes the <e2>allergy</e2>."
//        Cause-Effect(e1,e2)
//        Comment:
//        <blank>
//
//    These carry no parse; tokens come back with empty tags and no heads.
//
//  * Annotated CoNLL-U: standard 10-column blocks plus the comments
//
//        # sent_id = 8001          (optional; defaults to the block ordinal)
//        # e1 = START END          (0-based inclusive token indices)
//        # e2 = START END
//        # label = Cause-Effect(e1,e2)   (optional for prediction input)
//
//    Columns used: ID, FORM, UPOS, HEAD, DEPREL and MISC (NER=TYPE or _).
//    Multiword-token ranges and empty nodes are skipped.

#ifndef MGRE_CORPUS_H_
#define MGRE_CORPUS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mgre {

// Parse failure with a position. `instance` is 1-based (0 if unknown) and
// `line` is the 1-based input line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t instance, std::size_t line, const std::string &message);
  std::size_t instance() const { return instance_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t instance_;
  std::size_t line_;
};

// Input file that cannot be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

inline constexpr std::array<std::string_view, 9> kRelationBases = {
    "Cause-Effect",     "Component-Whole",   "Content-Container",
    "Entity-Destination", "Entity-Origin",   "Instrument-Agency",
    "Member-Collection", "Message-Topic",    "Product-Producer"};
inline constexpr std::size_t kNumRelationBases = kRelationBases.size();
inline constexpr std::size_t kOtherBase = kNumRelationBases;
// 9 bases x 2 directions + Other.
inline constexpr std::size_t kNumLabels = 2 * kNumRelationBases + 1;
inline constexpr std::size_t kOtherLabel = kNumLabels - 1;

enum class Direction { kNone, kE1ToE2, kE2ToE1 };

struct RelationLabel {
  std::size_t base = kOtherBase;
  Direction direction = Direction::kNone;

  static RelationLabel Other() { return {}; }
  // Accepts "Name(e1,e2)", "Name(e2,e1)" or "Other". Throws
  // std::invalid_argument on anything else.
  static RelationLabel Parse(std::string_view text);
  static RelationLabel FromIndex(std::size_t index);

  bool is_other() const { return base == kOtherBase; }
  // Dense index in [0, kNumLabels); Other is kOtherLabel.
  std::size_t index() const;
  std::string ToString() const;

  friend bool operator==(const RelationLabel &, const RelationLabel &) = default;
};

struct Token {
  std::size_t index = 0;
  std::string surface;
  std::string pos;
  std::string ner = "O";
  std::string deprel;
  std::optional<std::size_t> head;  // nullopt for the root

  friend bool operator==(const Token &, const Token &) = default;
};

struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::size_t head_token = 0;

  bool Contains(std::size_t i) const { return i >= start && i <= end; }
  friend bool operator==(const EntitySpan &, const EntitySpan &) = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  EntitySpan e1;
  EntitySpan e2;
  std::optional<RelationLabel> label;

  std::size_t size() const { return tokens.size(); }
  bool has_parse() const;
  bool IsEntityToken(std::size_t i) const { return e1.Contains(i) || e2.Contains(i); }
};

// Token in [start, end] whose head lies outside the span. If there is none,
// or more than one, the last token of the span.
std::size_t ResolveEntityHead(std::span<const Token> tokens, std::size_t start,
                              std::size_t end);

// Checks the parse and span invariants: at least two tokens, exactly one
// root, heads in range and not self-referential, acyclic, non-overlapping
// spans with heads inside them. Throws std::invalid_argument.
void ValidateSentence(const Sentence &sentence);

std::vector<Sentence> ParseSemEvalRaw(std::string_view text);
std::string WriteSemEvalRaw(std::span<const Sentence> sentences);

std::vector<Sentence> ParseConllu(std::string_view text);
std::string WriteConllu(std::span<const Sentence> sentences);

// Splits on whitespace and treats punctuation as separate tokens, keeping
// hyphens and apostrophes that join alphanumeric characters.
std::vector<std::string> TokenizeRawText(std::string_view text);

// Number of tokens strictly between the two entity spans.
std::size_t EntityGap(const Sentence &sentence);

}  // namespace mgre

#endif  // MGRE_CORPUS_H_
