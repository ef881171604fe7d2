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

#ifndef KBQA_LEXICON_MATCHER_H_
#define KBQA_LEXICON_MATCHER_H_

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kbqa/graph_store.h"
#include "kbqa/key_info.h"

namespace kbqa {

// Proper-noun vocabularies. A term may belong to several categories.
struct Lexicon {
  std::set<std::string> entities;
  std::set<std::string> tags;
  std::set<std::string> relations;
  std::set<std::string> attributes;
  std::set<std::string> values;

  // Reads one JSON object with the five category arrays.
  static Lexicon Load(const std::filesystem::path& path);
};

// A matched term. Offsets count Unicode scalar values; `end` is exclusive.
struct Span {
  std::string term;
  size_t start = 0;
  size_t end = 0;

  bool operator==(const Span&) const = default;
};

// Dictionary matcher over a fixed term set. Case-sensitive, operating on
// scalar values rather than bytes.
class MaxMatcher {
 public:
  explicit MaxMatcher(const std::set<std::string>& terms);

  // Left-to-right greedy longest match.
  std::vector<Span> Forward(std::string_view text) const;
  // Right-to-left greedy longest match; result ordered by start.
  std::vector<Span> Backward(std::string_view text) const;
  // Picks the scan with fewer spans plus unmatched characters. Ties go to
  // the backward scan.
  std::vector<Span> Bidirectional(std::string_view text) const;

 private:
  std::vector<Span> Forward(const std::u32string& text) const;
  std::vector<Span> Backward(const std::u32string& text) const;

  std::unordered_set<std::u32string> terms_;
  size_t max_length_ = 0;
};

std::vector<Span> ForwardMaxMatch(std::string_view text,
                                  const std::set<std::string>& terms);
std::vector<Span> BackwardMaxMatch(std::string_view text,
                                   const std::set<std::string>& terms);
std::vector<Span> BidirectionalMaxMatch(std::string_view text,
                                        const std::set<std::string>& terms);

// Spans plus characters left uncovered.
size_t SegmentationCost(size_t text_length, const std::vector<Span>& spans);

// Maximal ASCII digit runs with an optional fractional part, e.g. "1.37".
std::vector<Span> NumericRuns(std::string_view text);

// Extracts entities and tags first, expands entities through their tags,
// then keeps only those matched relations and attributes that occur in the
// two-hop context of the expanded entity set. When no entity is found the
// whole graph is the context. Numbers count as values even when absent from
// the value vocabulary, except digits inside a matched entity or tag.
class KeyInfoExtractor {
 public:
  KeyInfoExtractor(const Lexicon& lexicon, const KnowledgeGraph& graph);

  KeyInfo Extract(std::string_view nlq, const AuxPrediction& aux) const;

 private:
  const KnowledgeGraph& graph_;
  MaxMatcher entities_;
  MaxMatcher tags_;
  MaxMatcher relations_;
  MaxMatcher attributes_;
  MaxMatcher values_;
};

KeyInfo ExtractKeyInfo(std::string_view nlq, const Lexicon& lexicon,
                       const KnowledgeGraph& graph, const AuxPrediction& aux);

}  // namespace kbqa

#endif  // KBQA_LEXICON_MATCHER_H_
