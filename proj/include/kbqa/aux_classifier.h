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

#ifndef KBQA_AUX_CLASSIFIER_H_
#define KBQA_AUX_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kbqa/key_info.h"

namespace kbqa {

// Match counts from the proper-noun matcher, used as fallback evidence.
struct KeyInfoCounts {
  int relations = 0;
  int attributes = 0;
  int values = 0;

  static KeyInfoCounts Of(const KeyInfo& key_info);
};

enum class AuxField { kIntent, kRelationCount, kConditionCount };

// `pattern` is either a literal fragment list separated by "…" (all
// fragments must occur in order) or, with an "re:" prefix, an ECMAScript
// regular expression matched per code point.
struct AuxRule {
  std::string pattern;
  AuxField field = AuxField::kIntent;
  int value = 0;
};

using RuleTable = std::vector<AuxRule>;

// Line-delimited {pattern, field, value}; field is one of "intent", "rn",
// "cn" (also "cls", "relation_count", "condition_count").
RuleTable LoadRuleTable(const std::filesystem::path& path);

bool RuleMatches(std::string_view pattern, std::string_view text);

// First matching rule per field wins. Unset fields fall back to intent 0,
// relation count min(2, matched relations) and condition count 1 when an
// attribute and a value were matched, else 0.
AuxPrediction HeuristicPredict(std::string_view nlq, const RuleTable& rules,
                               const KeyInfoCounts& hint);

class AuxProvider {
 public:
  virtual ~AuxProvider() = default;

  // Always returns a prediction within the legal ranges.
  virtual AuxPrediction Predict(int64_t id, std::string_view nlq,
                                const KeyInfoCounts& hint) const = 0;
};

class HeuristicAuxProvider : public AuxProvider {
 public:
  explicit HeuristicAuxProvider(RuleTable rules) : rules_(std::move(rules)) {}

  AuxPrediction Predict(int64_t id, std::string_view nlq,
                        const KeyInfoCounts& hint) const override;

 private:
  RuleTable rules_;
};

// Serves stored predictions by question id.
class FileAuxProvider : public AuxProvider {
 public:
  explicit FileAuxProvider(std::unordered_map<int64_t, AuxPrediction> table)
      : table_(std::move(table)) {}

  // Throws Error naming the id when it has no record.
  AuxPrediction Predict(int64_t id, std::string_view nlq,
                        const KeyInfoCounts& hint) const override;

  size_t size() const { return table_.size(); }

 private:
  std::unordered_map<int64_t, AuxPrediction> table_;
};

// Reads line-delimited {id, cls, rn, cn}. Out-of-range values and duplicate
// ids are errors carrying the line number.
FileAuxProvider LoadPredictions(const std::filesystem::path& path);

}  // namespace kbqa

#endif  // KBQA_AUX_CLASSIFIER_H_
