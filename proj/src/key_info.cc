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

#include "kbqa/key_info.h"

#include <algorithm>

namespace kbqa {

bool AuxPrediction::IsValid() const {
  return intent >= 0 && intent <= 3 && relation_count >= 0 &&
         relation_count <= 2 && condition_count >= 0 && condition_count <= 2;
}

void AuxPrediction::Validate() const {
  if (intent < 0 || intent > 3) {
    throw Error("intent " + std::to_string(intent) + " outside 0-3");
  }
  if (relation_count < 0 || relation_count > 2) {
    throw Error("relation count " + std::to_string(relation_count) +
                " outside 0-2");
  }
  if (condition_count < 0 || condition_count > 2) {
    throw Error("condition count " + std::to_string(condition_count) +
                " outside 0-2");
  }
}

void AddUnique(TermList& list, const std::string& term) {
  if (std::find(list.begin(), list.end(), term) == list.end()) {
    list.push_back(term);
  }
}

std::set<std::string> AsSet(const TermList& list) {
  return std::set<std::string>(list.begin(), list.end());
}

Json ToJson(const AuxPrediction& aux) {
  return Json{{"cls", aux.intent},
              {"rn", aux.relation_count},
              {"cn", aux.condition_count}};
}

AuxPrediction AuxFromJson(const Json& json) {
  AuxPrediction aux;
  aux.intent = json.at("cls").get<int>();
  aux.relation_count = json.at("rn").get<int>();
  aux.condition_count = json.at("cn").get<int>();
  aux.Validate();
  return aux;
}

Json ToJson(const KeyInfo& key_info) {
  return Json{{"entities", key_info.entities},
              {"tags", key_info.tags},
              {"relations", key_info.relations},
              {"attributes", key_info.attributes},
              {"values", key_info.values},
              {"aux", ToJson(key_info.aux)}};
}

KeyInfo KeyInfoFromJson(const Json& json) {
  KeyInfo key_info;
  auto read = [&](const char* field, TermList& out) {
    if (!json.contains(field)) return;
    for (const auto& term : json.at(field)) AddUnique(out, term.get<std::string>());
  };
  read("entities", key_info.entities);
  read("tags", key_info.tags);
  read("relations", key_info.relations);
  read("attributes", key_info.attributes);
  read("values", key_info.values);
  if (json.contains("aux")) key_info.aux = AuxFromJson(json.at("aux"));
  return key_info;
}

}  // namespace kbqa
