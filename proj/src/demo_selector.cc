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

#include "kbqa/demo_selector.h"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "kbqa/cql_analysis.h"
#include "kbqa/cql_parser.h"

namespace kbqa {

void SimilarityWeights::Validate() const {
  for (double w : {entity, tag, relation, attribute, value, intent,
                   relation_count, condition_count}) {
    if (w < 0) throw Error("similarity weights must be non-negative");
  }
  if (Total() <= 0) throw Error("at least one similarity weight must be positive");
}

double SimilarityWeights::Total() const {
  return entity + tag + relation + attribute + value + intent + relation_count +
         condition_count;
}

SimilarityWeights SimilarityWeights::FromJson(const Json& json) {
  SimilarityWeights w;
  auto read = [&](const char* key, double& out) {
    if (json.contains(key)) out = json.at(key).get<double>();
  };
  read("entity", w.entity);
  read("tag", w.tag);
  read("relation", w.relation);
  read("attribute", w.attribute);
  read("value", w.value);
  read("intent", w.intent);
  read("relation_count", w.relation_count);
  read("condition_count", w.condition_count);
  w.Validate();
  return w;
}

double Iou(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t common = 0;
  for (const std::string& term : a) {
    if (b.contains(term)) ++common;
  }
  size_t total = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(total);
}

double KiSim(const KeyInfo& a, const KeyInfo& b, const SimilarityWeights& w) {
  double score = 0;
  score += w.entity * Iou(AsSet(a.entities), AsSet(b.entities));
  score += w.tag * Iou(AsSet(a.tags), AsSet(b.tags));
  score += w.relation * Iou(AsSet(a.relations), AsSet(b.relations));
  score += w.attribute * Iou(AsSet(a.attributes), AsSet(b.attributes));
  score += w.value * Iou(AsSet(a.values), AsSet(b.values));
  if (a.aux.intent == b.aux.intent) score += w.intent;
  if (a.aux.relation_count == b.aux.relation_count) score += w.relation_count;
  if (a.aux.condition_count == b.aux.condition_count) score += w.condition_count;
  return score;
}

std::vector<int64_t> SelectDemonstrations(const KeyInfo& target,
                                          std::optional<int64_t> target_id,
                                          std::span<const AnnotatedExample> pool,
                                          size_t k, const SimilarityWeights& w) {
  std::vector<std::pair<double, int64_t>> scored;
  scored.reserve(pool.size());
  for (const AnnotatedExample& example : pool) {
    if (target_id && example.id == *target_id) continue;
    scored.emplace_back(KiSim(target, example.key_info, w), example.id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int64_t> ids;
  for (size_t i = 0; i < scored.size() && i < k; ++i) ids.push_back(scored[i].second);
  return ids;
}

std::vector<AnnotatedExample> LoadExamplePool(const std::filesystem::path& path,
                                              const KeyInfoExtractor* extractor) {
  std::vector<AnnotatedExample> pool;
  std::unordered_set<int64_t> ids;
  ForEachJsonLine(path, [&](const Json& record, int) {
    AnnotatedExample example;
    example.id = record.at("id").get<int64_t>();
    if (!ids.insert(example.id).second) {
      throw Error("duplicate example id " + std::to_string(example.id));
    }
    example.question = record.at("question").get<std::string>();
    example.gold_cql = record.at("gold_cql").get<std::string>();
    cql::Query gold = cql::Parse(example.gold_cql);

    AuxPrediction aux = record.contains("aux") ? AuxFromJson(record.at("aux"))
                                               : cql::DeriveAux(gold);
    bool compute = record.value("compute_key_info", false) || !record.contains("key_info");
    if (compute) {
      if (extractor == nullptr) {
        throw Error("example " + std::to_string(example.id) +
                    " needs key info extraction but no lexicon/graph was given");
      }
      example.key_info = extractor->Extract(example.question, aux);
    } else {
      example.key_info = KeyInfoFromJson(record.at("key_info"));
    }
    example.key_info.aux = aux;
    pool.push_back(std::move(example));
  });
  return pool;
}

}  // namespace kbqa
