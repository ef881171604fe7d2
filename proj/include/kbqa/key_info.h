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

#ifndef KBQA_KEY_INFO_H_
#define KBQA_KEY_INFO_H_

#include <set>
#include <string>
#include <vector>

#include "kbqa/io_util.h"

namespace kbqa {

// Structural predictions for the query an NLQ should map to.
//   intent: 0 entity-attribute retrieval, 1 entity counting,
//           2 conditional sorting, 3 attribute-value comparison.
//   relation_count: relationship segments in MATCH (0-2).
//   condition_count: comparisons in WHERE (0-2).
struct AuxPrediction {
  int intent = 0;
  int relation_count = 0;
  int condition_count = 0;

  bool IsValid() const;
  // Throws Error describing the first out-of-range field.
  void Validate() const;

  bool operator==(const AuxPrediction&) const = default;
};

// Terms in first-mention order, without duplicates.
using TermList = std::vector<std::string>;

void AddUnique(TermList& list, const std::string& term);
std::set<std::string> AsSet(const TermList& list);

// Proper nouns found in one question, plus its aux predictions.
struct KeyInfo {
  TermList entities;
  TermList tags;
  TermList relations;
  TermList attributes;
  TermList values;
  AuxPrediction aux;

  bool operator==(const KeyInfo&) const = default;
};

Json ToJson(const AuxPrediction& aux);
AuxPrediction AuxFromJson(const Json& json);
Json ToJson(const KeyInfo& key_info);
KeyInfo KeyInfoFromJson(const Json& json);

}  // namespace kbqa

#endif  // KBQA_KEY_INFO_H_
