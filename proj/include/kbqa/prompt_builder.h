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

#ifndef KBQA_PROMPT_BUILDER_H_
#define KBQA_PROMPT_BUILDER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/key_info.h"

namespace kbqa {

// Chain-of-thought block template with literal {placeholder} markers.
struct CotTemplate {
  std::string text;
  std::string delimiter = "，";
  std::string none_marker = "无";

  static constexpr std::array<std::string_view, 9> kPlaceholders = {
      "question", "entity", "tag", "attribute", "value",
      "relation", "cn",     "rn",  "cql"};

  // Delimiter "，" and marker "无".
  static CotTemplate Chinese(std::string text);
  // Delimiter ", " and marker "none".
  static CotTemplate English(std::string text);
  // `language` is "zh" or "en".
  static CotTemplate Load(const std::filesystem::path& path,
                          std::string_view language);
};

// Fills the template. Without `cql` the block ends right where the {cql}
// marker starts. Throws Error naming the first missing placeholder.
std::string RenderCotBlock(std::string_view question, const KeyInfo& key_info,
                           const AuxPrediction& aux,
                           const std::optional<std::string>& cql,
                           const CotTemplate& tmpl);

struct Prompt {
  std::string system_text;
  std::string user_text;
  std::optional<int64_t> question_id;
  std::vector<int64_t> demo_ids;

  // Hex SHA-256 over both texts.
  std::string Digest() const;
};

// `demo_blocks` is ordered most similar first; the prompt lists them in
// reverse so the best demonstration sits next to the target.
Prompt BuildPrompt(std::string_view prior,
                   const std::vector<std::string>& demo_blocks,
                   std::string_view target_block);

}  // namespace kbqa

#endif  // KBQA_PROMPT_BUILDER_H_
