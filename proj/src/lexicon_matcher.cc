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

#include "kbqa/lexicon_matcher.h"

#include <algorithm>

#include "kbqa/io_util.h"
#include "kbqa/utf8.h"

namespace kbqa {

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  Json root;
  try {
    root = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": malformed lexicon: " + e.what());
  }
  if (!root.is_object()) throw Error(path.string() + ": lexicon must be an object");
  Lexicon lexicon;
  auto read = [&](const char* field, std::set<std::string>& out) {
    if (!root.contains(field)) return;
    for (const auto& term : root.at(field)) {
      std::string text = term.get<std::string>();
      if (text.empty()) {
        throw Error(path.string() + ": empty term in \"" + field + "\"");
      }
      out.insert(std::move(text));
    }
  };
  read("entities", lexicon.entities);
  read("tags", lexicon.tags);
  read("relations", lexicon.relations);
  read("attributes", lexicon.attributes);
  read("values", lexicon.values);
  return lexicon;
}

MaxMatcher::MaxMatcher(const std::set<std::string>& terms) {
  for (const std::string& term : terms) {
    std::u32string decoded = utf8::Decode(term);
    if (decoded.empty()) continue;
    max_length_ = std::max(max_length_, decoded.size());
    terms_.insert(std::move(decoded));
  }
}

std::vector<Span> MaxMatcher::Forward(std::string_view text) const {
  return Forward(utf8::Decode(text));
}

std::vector<Span> MaxMatcher::Backward(std::string_view text) const {
  return Backward(utf8::Decode(text));
}

std::vector<Span> MaxMatcher::Forward(const std::u32string& text) const {
  std::vector<Span> spans;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t longest = std::min(max_length_, text.size() - pos);
    size_t taken = 0;
    for (size_t len = longest; len > 0; --len) {
      if (terms_.contains(text.substr(pos, len))) {
        taken = len;
        break;
      }
    }
    if (taken == 0) {
      ++pos;
      continue;
    }
    spans.push_back({utf8::Encode(text.substr(pos, taken)), pos, pos + taken});
    pos += taken;
  }
  return spans;
}

std::vector<Span> MaxMatcher::Backward(const std::u32string& text) const {
  std::vector<Span> spans;
  size_t end = text.size();
  while (end > 0) {
    size_t longest = std::min(max_length_, end);
    size_t taken = 0;
    for (size_t len = longest; len > 0; --len) {
      if (terms_.contains(text.substr(end - len, len))) {
        taken = len;
        break;
      }
    }
    if (taken == 0) {
      --end;
      continue;
    }
    spans.push_back(
        {utf8::Encode(text.substr(end - taken, taken)), end - taken, end});
    end -= taken;
  }
  std::reverse(spans.begin(), spans.end());
  return spans;
}

std::vector<Span> MaxMatcher::Bidirectional(std::string_view text) const {
  std::u32string decoded = utf8::Decode(text);
  std::vector<Span> forward = Forward(decoded);
  std::vector<Span> backward = Backward(decoded);
  if (SegmentationCost(decoded.size(), forward) <
      SegmentationCost(decoded.size(), backward)) {
    return forward;
  }
  return backward;
}

std::vector<Span> ForwardMaxMatch(std::string_view text,
                                  const std::set<std::string>& terms) {
  return MaxMatcher(terms).Forward(text);
}

std::vector<Span> BackwardMaxMatch(std::string_view text,
                                   const std::set<std::string>& terms) {
  return MaxMatcher(terms).Backward(text);
}

std::vector<Span> BidirectionalMaxMatch(std::string_view text,
                                        const std::set<std::string>& terms) {
  return MaxMatcher(terms).Bidirectional(text);
}

size_t SegmentationCost(size_t text_length, const std::vector<Span>& spans) {
  size_t covered = 0;
  for (const Span& span : spans) covered += span.end - span.start;
  return spans.size() + (text_length - covered);
}

std::vector<Span> NumericRuns(std::string_view text) {
  std::u32string decoded = utf8::Decode(text);
  auto is_digit = [](char32_t c) { return c >= U'0' && c <= U'9'; };
  std::vector<Span> runs;
  size_t i = 0;
  while (i < decoded.size()) {
    if (!is_digit(decoded[i])) {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < decoded.size() && is_digit(decoded[i])) ++i;
    if (i + 1 < decoded.size() && decoded[i] == U'.' && is_digit(decoded[i + 1])) {
      ++i;
      while (i < decoded.size() && is_digit(decoded[i])) ++i;
    }
    runs.push_back({utf8::Encode(decoded.substr(start, i - start)), start, i});
  }
  return runs;
}

KeyInfoExtractor::KeyInfoExtractor(const Lexicon& lexicon,
                                   const KnowledgeGraph& graph)
    : graph_(graph),
      entities_(lexicon.entities),
      tags_(lexicon.tags),
      relations_(lexicon.relations),
      attributes_(lexicon.attributes),
      values_(lexicon.values) {}

KeyInfo KeyInfoExtractor::Extract(std::string_view nlq,
                                  const AuxPrediction& aux) const {
  KeyInfo info;
  info.aux = aux;
  if (nlq.empty()) return info;

  std::vector<Span> entity_spans = entities_.Bidirectional(nlq);
  std::vector<Span> tag_spans = tags_.Bidirectional(nlq);
  for (const Span& span : entity_spans) AddUnique(info.entities, span.term);
  for (const Span& span : tag_spans) AddUnique(info.tags, span.term);

  std::set<std::string> tagged;
  for (const std::string& tag : info.tags) {
    for (const std::string& name : graph_.EntitiesWithTag(tag)) {
      tagged.insert(name);
    }
  }
  for (const std::string& name : tagged) AddUnique(info.entities, name);

  std::set<std::string> seeds;
  for (const std::string& name : info.entities) {
    if (graph_.NodeIndex(name)) seeds.insert(name);
  }
  std::set<std::string> candidate_relations;
  std::set<std::string> candidate_attributes;
  if (seeds.empty()) {
    candidate_relations = graph_.AllRelations();
    candidate_attributes = graph_.AllAttributes();
  } else {
    ContextSets context = graph_.TwoHopContext(seeds);
    candidate_relations = std::move(context.relations);
    candidate_attributes = graph_.CandidateAttributes(context.entities);
  }
  for (const Span& span : relations_.Bidirectional(nlq)) {
    if (candidate_relations.contains(span.term)) {
      AddUnique(info.relations, span.term);
    }
  }
  for (const Span& span : attributes_.Bidirectional(nlq)) {
    if (candidate_attributes.contains(span.term)) {
      AddUnique(info.attributes, span.term);
    }
  }

  // Values in order of appearance: vocabulary hits and free-standing numbers.
  std::vector<Span> value_spans = values_.Bidirectional(nlq);
  auto inside_name = [&](const Span& run) {
    for (const auto* spans : {&entity_spans, &tag_spans}) {
      for (const Span& span : *spans) {
        if (run.start < span.end && span.start < run.end) return true;
      }
    }
    return false;
  };
  for (Span& run : NumericRuns(nlq)) {
    if (!inside_name(run)) value_spans.push_back(std::move(run));
  }
  std::stable_sort(value_spans.begin(), value_spans.end(),
                   [](const Span& a, const Span& b) { return a.start < b.start; });
  for (const Span& span : value_spans) AddUnique(info.values, span.term);
  return info;
}

KeyInfo ExtractKeyInfo(std::string_view nlq, const Lexicon& lexicon,
                       const KnowledgeGraph& graph, const AuxPrediction& aux) {
  return KeyInfoExtractor(lexicon, graph).Extract(nlq, aux);
}

}  // namespace kbqa
