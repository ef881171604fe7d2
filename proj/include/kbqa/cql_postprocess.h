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

#ifndef KBQA_CQL_POSTPROCESS_H_
#define KBQA_CQL_POSTPROCESS_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/cql_ast.h"
#include "kbqa/graph_store.h"
#include "kbqa/key_info.h"
#include "kbqa/lexicon_matcher.h"

namespace kbqa {
namespace cql {

// Observations made while repairing a query. `applied` lists the edits that
// were made; flags are informational and a flagged query is still valid.
struct RepairNotes {
  std::vector<std::string> applied;
  std::vector<std::string> flags;
  bool relation_deficit = false;
};

inline constexpr double kFuzzyThreshold = 0.5;

// Levenshtein distance over Unicode scalar values.
size_t EditDistance(std::string_view a, std::string_view b);

// 1 - distance / max(length); 1 for two empty strings.
double NormalizedSimilarity(std::string_view a, std::string_view b);

// Vocabulary term most similar to `word` (ties: lexicographically first),
// or empty when nothing reaches `threshold`.
std::string ClosestTerm(std::string_view word, const std::set<std::string>& terms,
                        double threshold = kFuzzyThreshold);

// Turns `(n:X)` into `(n)` plus a leading `n.name = "X"` conjunct when X
// names an entity (graph node or lexicon entity) but is not a tag. Anonymous
// nodes receive a fresh variable.
Query ReclassifyTags(Query query, const KnowledgeGraph& graph,
                     const Lexicon& lexicon, RepairNotes* notes = nullptr);

// Replaces tags, relationship types, property names (except `name`) and
// strings compared against `name` that are missing from their vocabulary
// with the closest vocabulary term. Below-threshold words are kept and
// flagged.
Query MapFuzzyNouns(Query query, const Lexicon& lexicon,
                    RepairNotes* notes = nullptr);

// Aligns the query with the predicted condition and relation counts:
// trailing top-level conjuncts are dropped while there are too many
// comparisons, unused (attribute, value) pairs from `key_info` are appended
// as equalities while there are too few, and trailing hops of the longest
// pattern are cut while there are too many relationships. A relationship
// deficit is only flagged.
Query RepairConditions(Query query, const AuxPrediction& aux,
                       const KeyInfo& key_info, RepairNotes* notes = nullptr);

// ReclassifyTags, then MapFuzzyNouns, then RepairConditions.
Query Postprocess(Query query, const KnowledgeGraph& graph,
                  const Lexicon& lexicon, const AuxPrediction& aux,
                  const KeyInfo& key_info, RepairNotes* notes = nullptr);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_POSTPROCESS_H_
