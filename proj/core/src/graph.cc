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

#include "mgre/graph.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace mgre {

DependencyGraph DependencyGraph::FromArcs(
    std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> arcs) {
  DependencyGraph g;
  g.neighbors_.resize(n);
  for (const auto &[head, dep] : arcs) {
    if (head >= n || dep >= n) throw std::out_of_range("arc endpoint out of range");
    if (head == dep) throw std::invalid_argument("self-loop arc on vertex " + std::to_string(head));
    g.neighbors_[head].push_back(dep);
    g.neighbors_[dep].push_back(head);
    g.arcs_.emplace_back(head, dep);
  }
  for (auto &adj : g.neighbors_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

DependencyGraph DependencyGraph::FromHeads(std::span<const std::optional<std::size_t>> heads) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i].has_value()) arcs.emplace_back(*heads[i], i);
  }
  return FromArcs(heads.size(), arcs);
}

DependencyGraph DependencyGraph::FromSentence(const Sentence &sentence) {
  if (!sentence.has_parse()) {
    throw std::invalid_argument("sentence " + sentence.id + " has no dependency parse");
  }
  std::vector<std::optional<std::size_t>> heads;
  heads.reserve(sentence.tokens.size());
  for (const Token &t : sentence.tokens) heads.push_back(t.head);
  return FromHeads(heads);
}

bool DependencyGraph::Adjacent(std::size_t u, std::size_t v) const {
  const auto &adj = neighbors_.at(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

bool DependencyGraph::IsHeadOf(std::size_t u, std::size_t v) const {
  return std::find(arcs_.begin(), arcs_.end(), std::make_pair(u, v)) != arcs_.end();
}

std::vector<std::size_t> ShortestDependencyPath(const DependencyGraph &graph, std::size_t u,
                                                std::size_t v) {
  const std::size_t n = graph.size();
  if (u >= n || v >= n) throw std::out_of_range("path endpoint out of range");
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n, kUnseen);
  std::deque<std::size_t> queue{u};
  parent[u] = u;
  while (!queue.empty() && parent[v] == kUnseen) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : graph.Neighbors(x)) {
      if (parent[y] == kUnseen) {
        parent[y] = x;
        queue.push_back(y);
      }
    }
  }
  if (parent[v] == kUnseen) {
    throw std::invalid_argument("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                                " are disconnected");
  }
  std::vector<std::size_t> path{v};
  while (path.back() != u) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::string_view SubGraphKindName(SubGraphKind kind) {
  switch (kind) {
    case SubGraphKind::kSdp: return "sdp";
    case SubGraphKind::kE1Neighborhood: return "e1";
    case SubGraphKind::kE2Neighborhood: return "e2";
  }
  return "?";
}

std::optional<std::size_t> SubGraph::LocalIndex(std::size_t token) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), token);
  if (it == vertices.end() || *it != token) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

BinaryMatrix AdjacencyMatrix(const SubGraph &subgraph) {
  const std::size_t n = subgraph.size();
  BinaryMatrix m(n, std::vector<std::uint8_t>(n, 0));
  for (const auto &[a, b] : subgraph.edges) {
    m[a][b] = 1;
    m[b][a] = 1;
  }
  return m;
}

SubGraph InduceSubGraph(const DependencyGraph &graph, SubGraphKind kind,
                        std::vector<std::size_t> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  SubGraph sg;
  sg.kind = kind;
  sg.vertices = std::move(vertices);
  const std::size_t n = sg.size();
  sg.directed_mask.assign(n, std::vector<std::uint8_t>(n, 0));
  for (const auto &[head, dep] : graph.arcs()) {
    auto a = sg.LocalIndex(head);
    auto b = sg.LocalIndex(dep);
    if (!a || !b) continue;
    sg.edges.emplace_back(std::min(*a, *b), std::max(*a, *b));
    sg.directed_mask[*a][*b] = 1;
  }
  std::sort(sg.edges.begin(), sg.edges.end());
  sg.edges.erase(std::unique(sg.edges.begin(), sg.edges.end()), sg.edges.end());
  sg.adjacency = AdjacencyMatrix(sg);
  return sg;
}

SubGraphSet DeriveSubGraphs(const DependencyGraph &graph, std::size_t e1, std::size_t e2,
                            std::size_t expansion_order) {
  const std::size_t n = graph.size();
  if (e1 >= n || e2 >= n) {
    throw std::out_of_range("entity vertex out of range for a graph of " + std::to_string(n) +
                            " vertices");
  }
  if (e1 == e2) throw std::invalid_argument("entity vertices must differ");

  std::vector<std::size_t> path = ShortestDependencyPath(graph, e1, e2);

  // Multi-source BFS from the path, bounded by the expansion order.
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kFar);
  std::deque<std::size_t> queue;
  for (std::size_t v : path) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    if (dist[x] >= expansion_order) continue;
    for (std::size_t y : graph.Neighbors(x)) {
      if (dist[y] == kFar) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  std::vector<std::size_t> sdp;
  for (std::size_t v = 0; v < n; ++v) {
    if (dist[v] != kFar) sdp.push_back(v);
  }

  auto neighborhood = [&](std::size_t entity) {
    std::vector<std::size_t> vs = graph.Neighbors(entity);
    vs.push_back(entity);
    return vs;
  };

  SubGraphSet set;
  set.graphs[0] = InduceSubGraph(graph, SubGraphKind::kSdp, std::move(sdp));
  set.graphs[1] = InduceSubGraph(graph, SubGraphKind::kE1Neighborhood, neighborhood(e1));
  set.graphs[2] = InduceSubGraph(graph, SubGraphKind::kE2Neighborhood, neighborhood(e2));
  return set;
}

SubGraphSet DeriveSubGraphs(const Sentence &sentence, std::size_t expansion_order) {
  return DeriveSubGraphs(DependencyGraph::FromSentence(sentence), sentence.e1.head_token,
                         sentence.e2.head_token, expansion_order);
}

SubGraphSizeHistogram ComputeSizeHistogram(std::span<const Sentence> sentences,
                                           std::size_t expansion_order) {
  SubGraphSizeHistogram h;
  for (const Sentence &s : sentences) {
    SubGraphSet set = DeriveSubGraphs(s, expansion_order);
    for (std::size_t k = 0; k < 3; ++k) ++h.vertex_counts[k][set.graphs[k].size()];
    ++h.sentences;
  }
  return h;
}

}  // namespace mgre
