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

#include "mgre/checkpoint.h"

#include <bit>
#include <cstring>
#include <map>
#include <stdexcept>

#include "json_io.h"

namespace mgre {

namespace {

constexpr std::string_view kMagic = "MGRECKPT";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void AppendRaw(std::string &out, const T &value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T ReadRaw(std::string_view bytes, std::size_t &pos) {
  if (pos + sizeof(T) > bytes.size()) throw std::runtime_error("truncated checkpoint");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

Json VocabSymbols(const Vocab &v) { return Json(v.symbols()); }

Vocab VocabFromJson(const Json &j) {
  return Vocab::FromSymbols(j.get<std::vector<std::string>>(), true);
}

}  // namespace

std::string SerializeCheckpoint(const Model &model) {
  Json meta;
  meta["format"] = "mgre-checkpoint";
  meta["config"] = ToJson(model.config());
  const VocabSet &v = model.vocabs();
  meta["vocabs"] = Json{{"pos", VocabSymbols(v.pos)},
                        {"deprel", VocabSymbols(v.deprel)},
                        {"ner", VocabSymbols(v.ner)}};
  if (const DrefTable *t = model.dref()) {
    Json triples = Json::array();
    for (const auto &[triple, entry] : t->entries()) {
      triples.push_back(Json{triple.head_pos, triple.dep_pos, triple.deprel, entry.count});
    }
    meta["dref"] = Json{{"same_pos_only", t->same_pos_only()}, {"triples", std::move(triples)}};
  } else {
    meta["dref"] = nullptr;
  }
  Json params = Json::array();
  std::size_t scalars = 0;
  for (const Parameter *p : model.Parameters()) {
    params.push_back(Json{{"name", p->name}, {"shape", p->value.shape()}});
    scalars += p->value.size();
  }
  meta["parameters"] = std::move(params);
  const std::string text = meta.dump();

  std::string out;
  out.reserve(kMagic.size() + 12 + text.size() + scalars * sizeof(double));
  out.append(kMagic);
  AppendRaw(out, kCheckpointVersion);
  AppendRaw(out, static_cast<std::uint64_t>(text.size()));
  out.append(text);
  for (const Parameter *p : model.Parameters()) {
    out.append(reinterpret_cast<const char *>(p->value.data()), p->value.size() * sizeof(double));
  }
  return out;
}

Model DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw std::runtime_error("not an mgre checkpoint");
  std::size_t pos = kMagic.size();
  const auto version = ReadRaw<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  const auto length = ReadRaw<std::uint64_t>(bytes, pos);
  if (pos + length > bytes.size()) throw std::runtime_error("truncated checkpoint");
  Json meta;
  try {
    meta = Json::parse(bytes.substr(pos, length));
  } catch (const nlohmann::json::exception &e) {
    throw std::runtime_error(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  pos += length;

  try {
    const ModelConfig config = ModelConfigFromJson(meta.at("config"));
    VocabSet vocabs;
    vocabs.pos = VocabFromJson(meta.at("vocabs").at("pos"));
    vocabs.deprel = VocabFromJson(meta.at("vocabs").at("deprel"));
    vocabs.ner = VocabFromJson(meta.at("vocabs").at("ner"));
    vocabs.label = LabelVocab();
    std::optional<DrefTable> dref;
    if (!meta.at("dref").is_null()) {
      std::map<DrefTriple, std::size_t> counts;
      for (const Json &t : meta.at("dref").at("triples")) {
        counts[{t.at(0).get<std::string>(), t.at(1).get<std::string>(),
                t.at(2).get<std::string>()}] = t.at(3).get<std::size_t>();
      }
      dref = DrefTable::FromCounts(
          std::move(counts), meta.at("dref").at("same_pos_only").get<bool>(),
          Tensor({DrefTable::kFirstTripleRow + meta.at("dref").at("triples").size(),
                  config.edge_dim}));
    }
    std::mt19937_64 rng(config.seed);
    Model model = Model::Initialize(config, std::move(vocabs), std::move(dref), rng);
    std::vector<Parameter *> params = model.Parameters();
    const Json &listed = meta.at("parameters");
    if (listed.size() != params.size()) throw std::runtime_error("parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter &p = *params[i];
      if (listed[i].at("name").get<std::string>() != p.name ||
          listed[i].at("shape").get<Shape>() != p.value.shape()) {
        throw std::runtime_error("checkpoint parameter " + listed[i].at("name").get<std::string>() +
                                 " does not match the model layout (expected " + p.name + " " +
                                 ShapeString(p.value.shape()) + ")");
      }
      const std::size_t n = p.value.size() * sizeof(double);
      if (pos + n > bytes.size()) throw std::runtime_error("truncated checkpoint");
      std::memcpy(p.value.data(), bytes.data() + pos, n);
      pos += n;
      p.ZeroGrad();
    }
    if (pos != bytes.size()) throw std::runtime_error("trailing bytes after checkpoint data");
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw std::runtime_error(std::string("corrupt checkpoint metadata: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw std::runtime_error(std::string("inconsistent checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Model &model, const std::string &path) {
  WriteFile(path, SerializeCheckpoint(model));
}

Model LoadCheckpoint(const std::string &path) { return DeserializeCheckpoint(ReadFile(path)); }

std::string DrefTableJson(const DrefTable &table) {
  Json triples = Json::object();
  for (const auto &[triple, entry] : table.entries()) {
    triples[triple.ToString()] =
        Json{{"count", entry.count}, {"ratio", entry.ratio}, {"row", entry.row}};
  }
  return Json{{"total", table.total()},
              {"same_pos_only", table.same_pos_only()},
              {"unk_row", DrefTable::kUnkRow},
              {"self_loop_row", DrefTable::kSelfLoopRow},
              {"triples", std::move(triples)}}
      .dump(2);
}

std::string VocabsJson(const VocabSet &v) {
  return Json{{"pos", VocabSymbols(v.pos)},
              {"deprel", VocabSymbols(v.deprel)},
              {"ner", VocabSymbols(v.ner)},
              {"label", VocabSymbols(v.label)}}
      .dump(2);
}

std::string CorpusStatsJson(std::span<const Sentence> sentences, std::size_t expansion_order) {
  const SubGraphSizeHistogram hist = ComputeSizeHistogram(sentences, expansion_order);
  std::size_t tokens = 0;
  std::map<std::string, std::size_t> labels;
  for (const Sentence &s : sentences) {
    tokens += s.size();
    if (s.label) ++labels[s.label->ToString()];
  }
  Json graphs = Json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    Json sizes = Json::object();
    for (const auto &[size, count] : hist.vertex_counts[k]) sizes[std::to_string(size)] = count;
    graphs[std::string(SubGraphKindName(static_cast<SubGraphKind>(k)))] = std::move(sizes);
  }
  return Json{{"sentences", hist.sentences},
              {"tokens", tokens},
              {"expansion_order", expansion_order},
              {"labels", labels},
              {"subgraph_sizes", std::move(graphs)}}
      .dump(2);
}

}  // namespace mgre
