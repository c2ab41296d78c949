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

#include "mgre/corpus.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mgre {

namespace {

std::string Positioned(std::size_t instance, std::size_t line, const std::string &message) {
  std::ostringstream out;
  if (instance > 0) out << "instance " << instance << ", ";
  out << "line " << line << ": " << message;
  return out.str();
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t stop = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, stop - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

bool ParseSize(std::string_view s, std::size_t &out) {
  s = Trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool IsWordChar(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

enum class Marker { kNone, kOpenE1, kCloseE1, kOpenE2, kCloseE2 };

Marker MarkerAt(std::string_view s, std::size_t pos, std::size_t &length) {
  static constexpr std::pair<std::string_view, Marker> kMarkers[] = {
      {"<e1>", Marker::kOpenE1},
      {"</e1>", Marker::kCloseE1},
      {"<e2>", Marker::kOpenE2},
      {"</e2>", Marker::kCloseE2}};
  for (const auto &[text, marker] : kMarkers) {
    if (s.substr(pos, text.size()) == text) {
      length = text.size();
      return marker;
    }
  }
  return Marker::kNone;
}

// Tokenizes `text`, reporting entity markers to `on_marker` with the number
// of tokens emitted so far. With a null handler markers are ordinary text.
template <typename OnMarker>
std::vector<std::string> Tokenize(std::string_view text, OnMarker *on_marker) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (on_marker != nullptr) {
      std::size_t length = 0;
      Marker m = MarkerAt(text, pos, length);
      if (m != Marker::kNone) {
        flush();
        (*on_marker)(m, tokens.size());
        pos += length;
        continue;
      }
    }
    char c = text[pos];
    auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      flush();
    } else if (u < 0x80 && std::ispunct(u)) {
      bool joiner = (c == '-' || c == '\'') && !current.empty() && pos + 1 < text.size() &&
                    IsWordChar(text[pos + 1]);
      if (joiner) {
        current.push_back(c);
      } else {
        flush();
        tokens.emplace_back(1, c);
      }
    } else {
      current.push_back(c);
    }
    ++pos;
  }
  flush();
  return tokens;
}

struct NoMarkers {
  void operator()(Marker, std::size_t) const {}
};

}  // namespace

ParseError::ParseError(std::size_t instance, std::size_t line, const std::string &message)
    : std::runtime_error(Positioned(instance, line, message)), instance_(instance), line_(line) {}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return buffer.str();
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing " + path);
}

// ---- labels ------------------------------------------------------------------

RelationLabel RelationLabel::Parse(std::string_view text) {
  text = Trim(text);
  if (text == "Other") return Other();
  std::size_t paren = text.find('(');
  if (paren == std::string_view::npos) {
    throw std::invalid_argument("unknown relation label '" + std::string(text) + "'");
  }
  std::string_view name = text.substr(0, paren);
  std::string_view args = text.substr(paren);
  auto it = std::find(kRelationBases.begin(), kRelationBases.end(), name);
  if (it == kRelationBases.end()) {
    throw std::invalid_argument("unknown relation label '" + std::string(text) + "'");
  }
  RelationLabel label;
  label.base = static_cast<std::size_t>(it - kRelationBases.begin());
  if (args == "(e1,e2)") {
    label.direction = Direction::kE1ToE2;
  } else if (args == "(e2,e1)") {
    label.direction = Direction::kE2ToE1;
  } else {
    throw std::invalid_argument("bad direction in relation label '" + std::string(text) + "'");
  }
  return label;
}

RelationLabel RelationLabel::FromIndex(std::size_t index) {
  if (index >= kNumLabels) {
    throw std::out_of_range("label index " + std::to_string(index) + " out of range");
  }
  if (index == kOtherLabel) return Other();
  return {index / 2, index % 2 == 0 ? Direction::kE1ToE2 : Direction::kE2ToE1};
}

std::size_t RelationLabel::index() const {
  if (is_other()) return kOtherLabel;
  return 2 * base + (direction == Direction::kE2ToE1 ? 1 : 0);
}

std::string RelationLabel::ToString() const {
  if (is_other()) return "Other";
  return std::string(kRelationBases[base]) +
         (direction == Direction::kE2ToE1 ? "(e2,e1)" : "(e1,e2)");
}

// ---- sentences -----------------------------------------------------------------

bool Sentence::has_parse() const {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token &t) { return t.head.has_value(); });
}

std::size_t ResolveEntityHead(std::span<const Token> tokens, std::size_t start,
                              std::size_t end) {
  std::size_t found = end;
  std::size_t count = 0;
  for (std::size_t i = start; i <= end && i < tokens.size(); ++i) {
    const auto &head = tokens[i].head;
    if (!head.has_value() || *head < start || *head > end) {
      found = i;
      ++count;
    }
  }
  return count == 1 ? found : end;
}

void ValidateSentence(const Sentence &s) {
  const std::size_t n = s.tokens.size();
  if (n < 2) throw std::invalid_argument("sentence has fewer than two tokens");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Token &t = s.tokens[i];
    if (t.index != i) throw std::invalid_argument("token index mismatch at " + std::to_string(i));
    if (!t.head.has_value()) {
      ++roots;
      continue;
    }
    if (*t.head >= n) {
      throw std::invalid_argument("head of token " + std::to_string(i) + " out of range");
    }
    if (*t.head == i) {
      throw std::invalid_argument("token " + std::to_string(i) + " is its own head");
    }
  }
  if (roots == 0) throw std::invalid_argument("no root");
  if (roots > 1) throw std::invalid_argument("multiple roots");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (s.tokens[cur].head.has_value()) {
      cur = *s.tokens[cur].head;
      if (++steps > n) throw std::invalid_argument("cycle through token " + std::to_string(i));
    }
  }
  for (const EntitySpan *e : {&s.e1, &s.e2}) {
    if (e->start > e->end || e->end >= n) throw std::invalid_argument("entity span out of range");
    if (!e->Contains(e->head_token)) throw std::invalid_argument("entity head outside its span");
  }
  if (s.e1.start <= s.e2.end && s.e2.start <= s.e1.end) {
    throw std::invalid_argument("entity spans overlap");
  }
}

std::size_t EntityGap(const Sentence &s) {
  if (s.e1.end < s.e2.start) return s.e2.start - s.e1.end - 1;
  if (s.e2.end < s.e1.start) return s.e1.start - s.e2.end - 1;
  return 0;
}

std::vector<std::string> TokenizeRawText(std::string_view text) {
  return Tokenize<NoMarkers>(text, nullptr);
}

// ---- SemEval raw -----------------------------------------------------------------

std::vector<Sentence> ParseSemEvalRaw(std::string_view text) {
  const std::vector<std::string_view> lines = SplitLines(text);
  std::vector<Sentence> out;
  std::size_t i = 0;
  std::size_t instance = 0;
  while (i < lines.size()) {
    if (Trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    ++instance;
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];

    std::size_t first_quote = line.find('"');
    std::size_t last_quote = line.rfind('"');
    if (first_quote == std::string_view::npos || last_quote == first_quote) {
      throw ParseError(instance, line_no, "expected a numbered, quoted sentence");
    }
    std::string id(Trim(line.substr(0, first_quote)));
    std::size_t number = 0;
    if (!ParseSize(id, number)) throw ParseError(instance, line_no, "missing instance number");
    std::string_view body = line.substr(first_quote + 1, last_quote - first_quote - 1);

    struct Spans {
      std::optional<std::size_t> open1, close1, open2, close2;
      std::string error;
      void operator()(Marker m, std::size_t count) {
        auto set = [&](std::optional<std::size_t> &slot, const char *name) {
          if (slot.has_value()) error = std::string("duplicate ") + name + " marker";
          slot = count;
        };
        switch (m) {
          case Marker::kOpenE1: set(open1, "<e1>"); break;
          case Marker::kCloseE1: set(close1, "</e1>"); break;
          case Marker::kOpenE2: set(open2, "<e2>"); break;
          case Marker::kCloseE2: set(close2, "</e2>"); break;
          case Marker::kNone: break;
        }
      }
    } spans;
    std::vector<std::string> words = Tokenize(body, &spans);
    if (!spans.error.empty()) throw ParseError(instance, line_no, spans.error);
    if (!spans.open1 || !spans.close1) throw ParseError(instance, line_no, "missing <e1> or </e1>");
    if (!spans.open2 || !spans.close2) throw ParseError(instance, line_no, "missing <e2> or </e2>");
    if (*spans.close1 <= *spans.open1 || *spans.close2 <= *spans.open2) {
      throw ParseError(instance, line_no, "empty or reversed entity marker span");
    }

    Sentence s;
    s.id = std::to_string(number);
    for (std::size_t k = 0; k < words.size(); ++k) {
      Token t;
      t.index = k;
      t.surface = std::move(words[k]);
      s.tokens.push_back(std::move(t));
    }
    s.e1 = {*spans.open1, *spans.close1 - 1, *spans.close1 - 1};
    s.e2 = {*spans.open2, *spans.close2 - 1, *spans.close2 - 1};
    if (s.e1.start <= s.e2.end && s.e2.start <= s.e1.end) {
      throw ParseError(instance, line_no, "entity markers overlap");
    }

    if (i + 1 >= lines.size()) throw ParseError(instance, line_no + 1, "missing relation label");
    try {
      s.label = RelationLabel::Parse(lines[i + 1]);
    } catch (const std::invalid_argument &e) {
      throw ParseError(instance, line_no + 1, e.what());
    }
    if (i + 2 >= lines.size() || !Trim(lines[i + 2]).starts_with("Comment")) {
      throw ParseError(instance, line_no + 2, "missing Comment line");
    }
    if (i + 3 < lines.size() && !Trim(lines[i + 3]).empty()) {
      throw ParseError(instance, line_no + 3, "missing blank separator line");
    }
    out.push_back(std::move(s));
    i += 4;
  }
  return out;
}

std::string WriteSemEvalRaw(std::span<const Sentence> sentences) {
  std::ostringstream out;
  for (const Sentence &s : sentences) {
    out << s.id << "\t\"";
    for (std::size_t k = 0; k < s.tokens.size(); ++k) {
      if (k > 0) out << ' ';
      if (k == s.e1.start) out << "<e1>";
      if (k == s.e2.start) out << "<e2>";
      out << s.tokens[k].surface;
      if (k == s.e1.end) out << "</e1>";
      if (k == s.e2.end) out << "</e2>";
    }
    out << "\"\n" << s.label.value_or(RelationLabel::Other()).ToString() << "\nComment:\n\n";
  }
  return out.str();
}

// ---- CoNLL-U -----------------------------------------------------------------------

namespace {

struct ConlluBlock {
  std::size_t instance = 0;
  std::size_t first_line = 0;
  std::vector<std::pair<std::size_t, std::string_view>> comments;
  std::vector<std::pair<std::size_t, std::string_view>> rows;
};

bool ParseSpanComment(std::string_view value, std::size_t &start, std::size_t &end) {
  auto parts = SplitWhitespace(value);
  return parts.size() == 2 && ParseSize(parts[0], start) && ParseSize(parts[1], end);
}

Sentence ConvertBlock(const ConlluBlock &block) {
  Sentence s;
  s.id = std::to_string(block.instance);
  std::optional<std::pair<std::size_t, std::size_t>> e1, e2;
  for (const auto &[line_no, text] : block.comments) {
    std::string_view body = Trim(text.substr(1));
    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) continue;
    std::string_view key = Trim(body.substr(0, eq));
    std::string_view value = Trim(body.substr(eq + 1));
    std::size_t a = 0, b = 0;
    if (key == "e1" || key == "e2") {
      if (!ParseSpanComment(value, a, b)) {
        throw ParseError(block.instance, line_no, "malformed entity comment");
      }
      (key == "e1" ? e1 : e2) = std::make_pair(a, b);
    } else if (key == "label") {
      try {
        s.label = RelationLabel::Parse(value);
      } catch (const std::invalid_argument &e) {
        throw ParseError(block.instance, line_no, e.what());
      }
    } else if (key == "sent_id" || key == "id") {
      s.id = std::string(value);
    }
  }

  std::vector<std::size_t> head_lines;
  for (const auto &[line_no, row] : block.rows) {
    auto cols = Split(row, '\t');
    if (cols.size() != 10) {
      throw ParseError(block.instance, line_no,
                       "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    std::size_t id = 0;
    if (!ParseSize(cols[0], id)) throw ParseError(block.instance, line_no, "bad token ID");
    if (id != s.tokens.size() + 1) {
      throw ParseError(block.instance, line_no,
                       "non-contiguous token IDs: expected " +
                           std::to_string(s.tokens.size() + 1) + ", got " + std::to_string(id));
    }
    std::size_t head = 0;
    if (!ParseSize(cols[6], head)) throw ParseError(block.instance, line_no, "bad HEAD value");
    Token t;
    t.index = id - 1;
    t.surface = std::string(cols[1]);
    t.pos = cols[3] == "_" ? std::string(cols[4]) : std::string(cols[3]);
    t.deprel = std::string(cols[7]);
    if (head > 0) t.head = head - 1;
    t.ner = "O";
    if (cols[9] != "_") {
      for (std::string_view item : Split(cols[9], '|')) {
        if (item.starts_with("NER=")) t.ner = std::string(item.substr(4));
      }
    }
    s.tokens.push_back(std::move(t));
    head_lines.push_back(line_no);
  }

  const std::size_t n = s.tokens.size();
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto &head = s.tokens[i].head;
    if (!head.has_value()) {
      if (++roots > 1) throw ParseError(block.instance, head_lines[i], "multiple roots");
    } else if (*head >= n) {
      throw ParseError(block.instance, head_lines[i], "HEAD out of range");
    }
  }
  if (!e1 || !e2) throw ParseError(block.instance, block.first_line, "missing # e1 / # e2 comment");
  if (e1->first > e1->second || e1->second >= n || e2->first > e2->second || e2->second >= n) {
    throw ParseError(block.instance, block.first_line, "entity span out of range");
  }
  s.e1 = {e1->first, e1->second, ResolveEntityHead(s.tokens, e1->first, e1->second)};
  s.e2 = {e2->first, e2->second, ResolveEntityHead(s.tokens, e2->first, e2->second)};
  try {
    ValidateSentence(s);
  } catch (const std::invalid_argument &e) {
    throw ParseError(block.instance, block.first_line, e.what());
  }
  return s;
}

}  // namespace

std::vector<Sentence> ParseConllu(std::string_view text) {
  const std::vector<std::string_view> lines = SplitLines(text);
  std::vector<Sentence> out;
  ConlluBlock block;
  auto finish = [&] {
    if (!block.rows.empty() || !block.comments.empty()) {
      if (block.rows.empty()) {
        throw ParseError(block.instance, block.first_line, "block has no token rows");
      }
      out.push_back(ConvertBlock(block));
    }
    block = ConlluBlock();
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (Trim(line).empty()) {
      finish();
      continue;
    }
    if (block.rows.empty() && block.comments.empty()) {
      block.instance = out.size() + 1;
      block.first_line = i + 1;
    }
    if (line.front() == '#') {
      block.comments.emplace_back(i + 1, line);
    } else {
      block.rows.emplace_back(i + 1, line);
    }
  }
  finish();
  return out;
}

std::string WriteConllu(std::span<const Sentence> sentences) {
  std::ostringstream out;
  for (const Sentence &s : sentences) {
    out << "# sent_id = " << s.id << "\n";
    out << "# e1 = " << s.e1.start << " " << s.e1.end << "\n";
    out << "# e2 = " << s.e2.start << " " << s.e2.end << "\n";
    if (s.label.has_value()) out << "# label = " << s.label->ToString() << "\n";
    for (const Token &t : s.tokens) {
      out << t.index + 1 << '\t' << t.surface << "\t_\t" << (t.pos.empty() ? "_" : t.pos)
          << "\t_\t_\t" << (t.head.has_value() ? *t.head + 1 : 0) << '\t'
          << (t.deprel.empty() ? "_" : t.deprel) << "\t_\t";
      if (t.ner.empty() || t.ner == "O") {
        out << "_";
      } else {
        out << "NER=" << t.ner;
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace mgre
