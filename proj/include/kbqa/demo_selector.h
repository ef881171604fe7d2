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

#ifndef KBQA_DEMO_SELECTOR_H_
#define KBQA_DEMO_SELECTOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kbqa/graph_store.h"
#include "kbqa/key_info.h"
#include "kbqa/lexicon_matcher.h"

namespace kbqa {

// Per-category weights of the key-information similarity. Defaults are the
// published settings.
struct SimilarityWeights {
  double entity = 5;
  double tag = 3;
  double relation = 3;
  double attribute = 1;
  double value = 0.5;
  double intent = 0.5;
  double relation_count = 0.3;
  double condition_count = 0.3;

  // Throws Error on a negative weight or when all weights are zero.
  void Validate() const;
  double Total() const;

  static SimilarityWeights FromJson(const Json& json);
};

// |a ∩ b| / |a ∪ b|, and 1 when both are empty.
double Iou(const std::set<std::string>& a, const std::set<std::string>& b);

// Weighted IoU over entities, tags, relations, attributes and values plus
// weighted equality of the three aux predictions.
double KiSim(const KeyInfo& a, const KeyInfo& b, const SimilarityWeights& w);

struct AnnotatedExample {
  int64_t id = 0;
  std::string question;
  KeyInfo key_info;
  std::string gold_cql;
};

// Ids of the `k` pool examples most similar to `target`, best first; equal
// scores are ordered by ascending id. `target_id`, when given, is never
// selected.
std::vector<int64_t> SelectDemonstrations(const KeyInfo& target,
                                          std::optional<int64_t> target_id,
                                          std::span<const AnnotatedExample> pool,
                                          size_t k, const SimilarityWeights& w);

// Reads line-delimited {id, question, gold_cql} records. Key information
// comes from a "key_info" object, or is extracted with `extractor` when the
// record sets "compute_key_info" (or has no key_info). Aux labels come from
// an "aux" object or are derived from the gold query. Every gold query must
// parse; ids must be unique.
std::vector<AnnotatedExample> LoadExamplePool(const std::filesystem::path& path,
                                              const KeyInfoExtractor* extractor);

}  // namespace kbqa

#endif  // KBQA_DEMO_SELECTOR_H_
