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

#include "kbqa/prompt_builder.h"

#include <map>

namespace kbqa {

CotTemplate CotTemplate::Chinese(std::string text) {
  return CotTemplate{std::move(text), "，", "无"};
}

CotTemplate CotTemplate::English(std::string text) {
  return CotTemplate{std::move(text), ", ", "none"};
}

CotTemplate CotTemplate::Load(const std::filesystem::path& path,
                              std::string_view language) {
  if (language == "zh") return Chinese(ReadFile(path));
  if (language == "en") return English(ReadFile(path));
  throw Error("unknown template language '" + std::string(language) +
              "' (expected zh or en)");
}

namespace {

std::string JoinTerms(const TermList& terms, const CotTemplate& tmpl) {
  if (terms.empty()) return tmpl.none_marker;
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += tmpl.delimiter;
    out += terms[i];
  }
  return out;
}

}  // namespace

std::string RenderCotBlock(std::string_view question, const KeyInfo& key_info,
                           const AuxPrediction& aux,
                           const std::optional<std::string>& cql,
                           const CotTemplate& tmpl) {
  for (std::string_view name : CotTemplate::kPlaceholders) {
    std::string marker = "{" + std::string(name) + "}";
    if (tmpl.text.find(marker) == std::string::npos) {
      throw Error("CoT template is missing placeholder " + marker);
    }
  }
  const std::map<std::string, std::string, std::less<>> values = {
      {"question", std::string(question)},
      {"entity", JoinTerms(key_info.entities, tmpl)},
      {"tag", JoinTerms(key_info.tags, tmpl)},
      {"attribute", JoinTerms(key_info.attributes, tmpl)},
      {"value", JoinTerms(key_info.values, tmpl)},
      {"relation", JoinTerms(key_info.relations, tmpl)},
      {"cn", std::to_string(aux.condition_count)},
      {"rn", std::to_string(aux.relation_count)},
  };

  // Single left-to-right pass so substituted text is never rescanned.
  std::string out;
  const std::string& text = tmpl.text;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find('{', pos);
    if (open == std::string::npos) {
      out.append(text, pos);
      break;
    }
    size_t close = text.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(text, pos);
      break;
    }
    out.append(text, pos, open - pos);
    std::string_view name(text.data() + open + 1, close - open - 1);
    if (name == "cql") {
      if (!cql) return out;
      out += *cql;
    } else if (auto it = values.find(name); it != values.end()) {
      out += it->second;
    } else {
      out.push_back('{');
      pos = open + 1;
      continue;
    }
    pos = close + 1;
  }
  return out;
}

std::string Prompt::Digest() const {
  std::string data = system_text;
  data.push_back('\0');
  data += user_text;
  return Sha256Hex(data);
}

Prompt BuildPrompt(std::string_view prior,
                   const std::vector<std::string>& demo_blocks,
                   std::string_view target_block) {
  Prompt prompt;
  prompt.system_text = std::string(prior);
  for (auto it = demo_blocks.rbegin(); it != demo_blocks.rend(); ++it) {
    prompt.user_text += *it;
    prompt.user_text += "\n\n";
  }
  prompt.user_text += target_block;
  return prompt;
}

}  // namespace kbqa
