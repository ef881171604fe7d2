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

#include "kbqa/aux_classifier.h"

#include <algorithm>
#include <optional>
#include <regex>

#include "kbqa/io_util.h"
#include "kbqa/utf8.h"

namespace kbqa {

namespace {

constexpr std::string_view kGap = "…";

std::vector<std::string_view> SplitFragments(std::string_view pattern) {
  std::vector<std::string_view> fragments;
  while (true) {
    size_t gap = pattern.find(kGap);
    size_t gap_len = kGap.size();
    size_t dots = pattern.find("...");
    if (dots != std::string_view::npos && (gap == std::string_view::npos || dots < gap)) {
      gap = dots;
      gap_len = 3;
    }
    if (gap == std::string_view::npos) {
      fragments.push_back(pattern);
      return fragments;
    }
    fragments.push_back(pattern.substr(0, gap));
    pattern.remove_prefix(gap + gap_len);
  }
}

AuxField ParseField(const std::string& name) {
  if (name == "intent" || name == "cls") return AuxField::kIntent;
  if (name == "rn" || name == "relation_count") return AuxField::kRelationCount;
  if (name == "cn" || name == "condition_count") return AuxField::kConditionCount;
  throw Error("unknown aux field \"" + name + "\"");
}

// Regex rules run over code points so that character classes may hold
// non-ASCII characters. wchar_t is 32 bits on the supported platforms.
static_assert(sizeof(wchar_t) == 4);
std::wstring Wide(std::string_view text) {
  std::u32string decoded = utf8::Decode(text);
  return std::wstring(decoded.begin(), decoded.end());
}

int MaxValue(AuxField field) { return field == AuxField::kIntent ? 3 : 2; }

}  // namespace

KeyInfoCounts KeyInfoCounts::Of(const KeyInfo& key_info) {
  return {static_cast<int>(key_info.relations.size()),
          static_cast<int>(key_info.attributes.size()),
          static_cast<int>(key_info.values.size())};
}

RuleTable LoadRuleTable(const std::filesystem::path& path) {
  RuleTable rules;
  ForEachJsonLine(path, [&](const Json& record, int) {
    AuxRule rule;
    rule.pattern = record.at("pattern").get<std::string>();
    if (rule.pattern.empty()) throw Error("empty rule pattern");
    rule.field = ParseField(record.at("field").get<std::string>());
    rule.value = record.at("value").get<int>();
    if (rule.value < 0 || rule.value > MaxValue(rule.field)) {
      throw Error("rule value " + std::to_string(rule.value) + " out of range");
    }
    if (rule.pattern.starts_with("re:")) {
      try {
        std::wregex probe(Wide(std::string_view(rule.pattern).substr(3)));
      } catch (const std::regex_error& e) {
        throw Error(std::string("bad rule regex: ") + e.what());
      }
    }
    rules.push_back(std::move(rule));
  });
  return rules;
}

bool RuleMatches(std::string_view pattern, std::string_view text) {
  if (pattern.starts_with("re:")) {
    std::wregex re(Wide(pattern.substr(3)));
    std::wstring subject = Wide(text);
    return std::regex_search(subject, re);
  }
  size_t from = 0;
  for (std::string_view fragment : SplitFragments(pattern)) {
    if (fragment.empty()) continue;
    size_t at = text.find(fragment, from);
    if (at == std::string_view::npos) return false;
    from = at + fragment.size();
  }
  return true;
}

AuxPrediction HeuristicPredict(std::string_view nlq, const RuleTable& rules,
                               const KeyInfoCounts& hint) {
  std::optional<int> intent;
  std::optional<int> relation_count;
  std::optional<int> condition_count;
  for (const AuxRule& rule : rules) {
    std::optional<int>* slot = rule.field == AuxField::kIntent ? &intent
                               : rule.field == AuxField::kRelationCount
                                   ? &relation_count
                                   : &condition_count;
    if (slot->has_value()) continue;
    if (RuleMatches(rule.pattern, nlq)) *slot = rule.value;
  }
  AuxPrediction aux;
  aux.intent = intent.value_or(0);
  aux.relation_count = relation_count.value_or(std::min(2, hint.relations));
  aux.condition_count = condition_count.value_or(
      hint.attributes > 0 && hint.values > 0 ? 1 : 0);
  return aux;
}

AuxPrediction HeuristicAuxProvider::Predict(int64_t, std::string_view nlq,
                                            const KeyInfoCounts& hint) const {
  return HeuristicPredict(nlq, rules_, hint);
}

AuxPrediction FileAuxProvider::Predict(int64_t id, std::string_view,
                                       const KeyInfoCounts&) const {
  auto it = table_.find(id);
  if (it == table_.end()) {
    throw Error("no aux prediction for question id " + std::to_string(id));
  }
  return it->second;
}

FileAuxProvider LoadPredictions(const std::filesystem::path& path) {
  std::unordered_map<int64_t, AuxPrediction> table;
  ForEachJsonLine(path, [&](const Json& record, int) {
    int64_t id = record.at("id").get<int64_t>();
    AuxPrediction aux = AuxFromJson(record);
    if (!table.emplace(id, aux).second) {
      throw Error("duplicate prediction for id " + std::to_string(id));
    }
  });
  return FileAuxProvider(std::move(table));
}

}  // namespace kbqa
