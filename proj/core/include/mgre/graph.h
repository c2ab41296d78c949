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

// Dependency graphs and the per-sentence sub-graph set: the shortest
// dependency path (SDP) between the entity heads, optionally grown by a
// number of hops, plus the first-order neighbourhood of each entity.

#ifndef MGRE_GRAPH_H_
#define MGRE_GRAPH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mgre/corpus.h"

namespace mgre {

// Undirected view of a dependency parse that remembers arc direction.
class DependencyGraph {
 public:
  // From a parsed sentence; throws std::invalid_argument if it has no parse.
  static DependencyGraph FromSentence(const Sentence &sentence);
  // From head pointers (nullopt marks the root). Does not check for a tree.
  static DependencyGraph FromHeads(std::span<const std::optional<std::size_t>> heads);
  // From (head, dependent) arcs over n vertices; used for arbitrary graphs.
  static DependencyGraph FromArcs(std::size_t n,
                                  std::span<const std::pair<std::size_t, std::size_t>> arcs);

  std::size_t size() const { return neighbors_.size(); }
  const std::vector<std::size_t> &Neighbors(std::size_t v) const { return neighbors_.at(v); }
  std::size_t Degree(std::size_t v) const { return neighbors_.at(v).size(); }
  bool Adjacent(std::size_t u, std::size_t v) const;
  // True if u is the head of v.
  bool IsHeadOf(std::size_t u, std::size_t v) const;
  const std::vector<std::pair<std::size_t, std::size_t>> &arcs() const { return arcs_; }

 private:
  std::vector<std::vector<std::size_t>> neighbors_;  // sorted
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;
};

// Vertices of the unique u -> v path, in that order. Throws
// std::invalid_argument if v is unreachable from u and std::out_of_range for
// invalid vertices.
std::vector<std::size_t> ShortestDependencyPath(const DependencyGraph &graph, std::size_t u,
                                                std::size_t v);

enum class SubGraphKind { kSdp, kE1Neighborhood, kE2Neighborhood };

std::string_view SubGraphKindName(SubGraphKind kind);

using BinaryMatrix = std::vector<std::vector<std::uint8_t>>;

struct SubGraph {
  SubGraphKind kind = SubGraphKind::kSdp;
  // Token indices in ascending sentence order.
  std::vector<std::size_t> vertices;
  // Undirected edges over local positions, each stored once with first < second.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // Symmetric 0/1 adjacency with zero diagonal, rows in vertex order.
  BinaryMatrix adjacency;
  // directed_mask[a][b] == 1 iff vertex a is the parse head of vertex b.
  BinaryMatrix directed_mask;

  std::size_t size() const { return vertices.size(); }
  std::optional<std::size_t> LocalIndex(std::size_t token) const;
};

// Induced sub-graph of `graph` on `vertices` (sorted and deduplicated here).
SubGraph InduceSubGraph(const DependencyGraph &graph, SubGraphKind kind,
                        std::vector<std::size_t> vertices);

// 0/1 adjacency rebuilt from the edge list.
BinaryMatrix AdjacencyMatrix(const SubGraph &subgraph);

struct SubGraphSet {
  // SDP, e1 neighbourhood, e2 neighbourhood, in that order.
  std::array<SubGraph, 3> graphs;

  const SubGraph &sdp() const { return graphs[0]; }
  const SubGraph &e1() const { return graphs[1]; }
  const SubGraph &e2() const { return graphs[2]; }
};

// The SDP sub-graph contains the path plus every vertex within
// `expansion_order` undirected hops of it. Entity sub-graphs are the entity
// vertex and its direct neighbours and never grow.
SubGraphSet DeriveSubGraphs(const DependencyGraph &graph, std::size_t e1, std::size_t e2,
                            std::size_t expansion_order);

// Sub-graph set for a parsed sentence using its entity head tokens.
SubGraphSet DeriveSubGraphs(const Sentence &sentence, std::size_t expansion_order);

struct SubGraphSizeHistogram {
  std::size_t sentences = 0;
  std::array<std::map<std::size_t, std::size_t>, 3> vertex_counts;  // size -> sentences
};

SubGraphSizeHistogram ComputeSizeHistogram(std::span<const Sentence> sentences,
                                           std::size_t expansion_order);

}  // namespace mgre

#endif  // MGRE_GRAPH_H_
