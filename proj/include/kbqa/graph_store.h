// Copyright 2026 The KBQA-CQL Authors.
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

#ifndef KBQA_GRAPH_STORE_H_
#define KBQA_GRAPH_STORE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kbqa {

// Attribute value as stored in the knowledge base. The numeric reading is
// cached at construction so every comparison sees the same interpretation.
struct AttrValue {
  std::string raw;
  std::optional<double> numeric;

  // Throws Error when `raw` is empty.
  static AttrValue FromText(std::string raw);

  bool operator==(const AttrValue&) const = default;
};

struct Node {
  std::string name;
  std::set<std::string> tags;
  std::map<std::string, AttrValue> attributes;
};

struct Edge {
  std::string src;
  std::string relation;
  std::string dst;
};

struct ContextSets {
  std::set<std::string> entities;
  std::set<std::string> relations;
};

// Immutable labeled property graph. Safe to share between threads once
// constructed.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Validates the records and builds the tag index and adjacency lists.
  // Throws Error on duplicate node names, empty attribute names or edges
  // that reference unknown nodes.
  KnowledgeGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  // Loads the line-delimited node and edge files. Errors carry the file path
  // and line number of the offending record.
  static KnowledgeGraph Load(const std::filesystem::path& nodes_path,
                             const std::filesystem::path& edges_path);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edges_.size(); }

  std::optional<size_t> NodeIndex(std::string_view name) const;
  const Node* FindNode(std::string_view name) const;

  // Endpoint indexes of edge `e`.
  size_t EdgeSource(size_t e) const { return endpoints_[e].first; }
  size_t EdgeTarget(size_t e) const { return endpoints_[e].second; }

  // Edge indexes leaving / entering node `n`, ascending.
  const std::vector<size_t>& OutEdges(size_t n) const { return out_[n]; }
  const std::vector<size_t>& InEdges(size_t n) const { return in_[n]; }

  const std::map<std::string, std::set<std::string>>& tag_index() const {
    return tag_index_;
  }
  bool HasTag(std::string_view tag) const;

  // Nodes whose tag set contains `tag`; empty for unknown tags.
  std::set<std::string> EntitiesWithTag(std::string_view tag) const;

  // Everything reachable within two undirected edge traversals of the seeds
  // (seeds included), plus the relation name of every traversed edge.
  // Throws Error naming the first unknown seed.
  ContextSets TwoHopContext(const std::set<std::string>& seeds) const;

  // Union of attribute names over `entities`. Throws Error on unknown names.
  std::set<std::string> CandidateAttributes(
      const std::set<std::string>& entities) const;

  std::set<std::string> AllRelations() const;
  std::set<std::string> AllAttributes() const;

 private:
  void BuildIndexes();

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, size_t> by_name_;
  std::vector<std::pair<size_t, size_t>> endpoints_;
  std::vector<std::vector<size_t>> out_;
  std::vector<std::vector<size_t>> in_;
  std::map<std::string, std::set<std::string>> tag_index_;
};

}  // namespace kbqa

#endif  // KBQA_GRAPH_STORE_H_
