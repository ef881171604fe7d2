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

#include "kbqa/graph_store.h"

#include <utility>

#include "kbqa/io_util.h"

namespace kbqa {

AttrValue AttrValue::FromText(std::string raw) {
  if (raw.empty()) throw Error("attribute value must not be empty");
  AttrValue value;
  value.numeric = ParseDecimal(raw);
  value.raw = std::move(raw);
  return value;
}

KnowledgeGraph::KnowledgeGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  BuildIndexes();
}

void KnowledgeGraph::BuildIndexes() {
  by_name_.clear();
  by_name_.reserve(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (node.name.empty()) throw Error("node name must not be empty");
    if (!by_name_.emplace(node.name, i).second) {
      throw Error("duplicate node name \"" + node.name + "\"");
    }
    for (const auto& [attr, value] : node.attributes) {
      if (attr.empty()) {
        throw Error("node \"" + node.name + "\" has an empty attribute name");
      }
      if (value.raw.empty()) {
        throw Error("node \"" + node.name + "\" attribute \"" + attr +
                    "\" has an empty value");
      }
    }
  }

  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  endpoints_.clear();
  endpoints_.reserve(edges_.size());
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.relation.empty()) throw Error("edge relation must not be empty");
    auto src = by_name_.find(edge.src);
    if (src == by_name_.end()) {
      throw Error("edge references unknown node \"" + edge.src + "\"");
    }
    auto dst = by_name_.find(edge.dst);
    if (dst == by_name_.end()) {
      throw Error("edge references unknown node \"" + edge.dst + "\"");
    }
    endpoints_.emplace_back(src->second, dst->second);
    out_[src->second].push_back(e);
    in_[dst->second].push_back(e);
  }

  tag_index_.clear();
  for (const Node& node : nodes_) {
    for (const std::string& tag : node.tags) tag_index_[tag].insert(node.name);
  }
}

KnowledgeGraph KnowledgeGraph::Load(const std::filesystem::path& nodes_path,
                                    const std::filesystem::path& edges_path) {
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> seen;
  ForEachJsonLine(nodes_path, [&](const Json& record, int line) {
    if (!record.is_object()) throw Error("node record must be an object");
    Node node;
    node.name = record.at("name").get<std::string>();
    if (node.name.empty()) throw Error("node name must not be empty");
    if (auto it = seen.find(node.name); it != seen.end()) {
      throw Error("duplicate node name \"" + node.name + "\" (first on line " +
                  std::to_string(it->second) + ")");
    }
    seen.emplace(node.name, line);
    if (record.contains("tags")) {
      for (const auto& tag : record.at("tags")) {
        node.tags.insert(tag.get<std::string>());
      }
    }
    if (record.contains("attrs")) {
      for (const auto& [key, value] : record.at("attrs").items()) {
        if (key.empty()) throw Error("attribute name must not be empty");
        std::string raw = value.is_string() ? value.get<std::string>()
                                            : value.dump();
        node.attributes.emplace(key, AttrValue::FromText(std::move(raw)));
      }
    }
    nodes.push_back(std::move(node));
  });

  std::vector<Edge> edges;
  ForEachJsonLine(edges_path, [&](const Json& record, int) {
    if (!record.is_object()) throw Error("edge record must be an object");
    Edge edge{record.at("src").get<std::string>(),
              record.at("rel").get<std::string>(),
              record.at("dst").get<std::string>()};
    for (const std::string* end : {&edge.src, &edge.dst}) {
      if (!seen.contains(*end)) {
        throw Error("edge references unknown node \"" + *end + "\"");
      }
    }
    if (edge.relation.empty()) throw Error("edge relation must not be empty");
    edges.push_back(std::move(edge));
  });

  return KnowledgeGraph(std::move(nodes), std::move(edges));
}

std::optional<size_t> KnowledgeGraph::NodeIndex(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const Node* KnowledgeGraph::FindNode(std::string_view name) const {
  auto index = NodeIndex(name);
  return index ? &nodes_[*index] : nullptr;
}

bool KnowledgeGraph::HasTag(std::string_view tag) const {
  return tag_index_.find(std::string(tag)) != tag_index_.end();
}

std::set<std::string> KnowledgeGraph::EntitiesWithTag(
    std::string_view tag) const {
  auto it = tag_index_.find(std::string(tag));
  if (it == tag_index_.end()) return {};
  return it->second;
}

ContextSets KnowledgeGraph::TwoHopContext(
    const std::set<std::string>& seeds) const {
  ContextSets context;
  std::vector<bool> near(nodes_.size(), false);  // distance <= 1
  std::vector<size_t> frontier;
  for (const std::string& seed : seeds) {
    auto index = NodeIndex(seed);
    if (!index) throw Error("unknown seed entity \"" + seed + "\"");
    if (!near[*index]) {
      near[*index] = true;
      frontier.push_back(*index);
    }
  }
  // First hop: mark neighbours of the seeds.
  const size_t seed_count = frontier.size();
  for (size_t i = 0; i < seed_count; ++i) {
    size_t n = frontier[i];
    for (const auto* list : {&out_[n], &in_[n]}) {
      for (size_t e : *list) {
        size_t other = endpoints_[e].first == n ? endpoints_[e].second
                                                : endpoints_[e].first;
        if (!near[other]) {
          near[other] = true;
          frontier.push_back(other);
        }
      }
    }
  }
  // Every edge touching a node within one hop lies on a path of length <= 2.
  for (size_t n : frontier) {
    context.entities.insert(nodes_[n].name);
    for (const auto* list : {&out_[n], &in_[n]}) {
      for (size_t e : *list) {
        context.relations.insert(edges_[e].relation);
        context.entities.insert(nodes_[endpoints_[e].first].name);
        context.entities.insert(nodes_[endpoints_[e].second].name);
      }
    }
  }
  return context;
}

std::set<std::string> KnowledgeGraph::CandidateAttributes(
    const std::set<std::string>& entities) const {
  std::set<std::string> attributes;
  for (const std::string& name : entities) {
    const Node* node = FindNode(name);
    if (node == nullptr) throw Error("unknown entity \"" + name + "\"");
    for (const auto& [attr, value] : node->attributes) attributes.insert(attr);
  }
  return attributes;
}

std::set<std::string> KnowledgeGraph::AllRelations() const {
  std::set<std::string> relations;
  for (const Edge& edge : edges_) relations.insert(edge.relation);
  return relations;
}

std::set<std::string> KnowledgeGraph::AllAttributes() const {
  std::set<std::string> attributes;
  for (const Node& node : nodes_) {
    for (const auto& [attr, value] : node.attributes) attributes.insert(attr);
  }
  return attributes;
}

}  // namespace kbqa
