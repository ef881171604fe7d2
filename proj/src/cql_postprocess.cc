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

#include "kbqa/cql_postprocess.h"

#include <algorithm>
#include <utility>

#include "kbqa/cql_analysis.h"
#include "kbqa/cql_printer.h"
#include "kbqa/io_util.h"
#include "kbqa/utf8.h"

namespace kbqa {
namespace cql {

namespace {

void Flag(RepairNotes* notes, std::string message) {
  if (notes != nullptr) notes->flags.push_back(std::move(message));
}

void Applied(RepairNotes* notes, std::string message) {
  if (notes != nullptr) notes->applied.push_back(std::move(message));
}

// Every name a query binds or projects.
std::set<std::string> UsedNames(const Query& query) {
  std::set<std::string> names;
  for (const std::string& v : NodeVariables(query)) names.insert(v);
  names.merge(RelationshipVariables(query));
  if (query.with) {
    for (const ProjectionItem& item : query.with->items) {
      if (!item.alias.empty()) names.insert(item.alias);
    }
  }
  for (const ProjectionItem& item : query.ret.items) {
    if (!item.alias.empty()) names.insert(item.alias);
  }
  return names;
}

std::string FreshVariable(const Query& query) {
  std::set<std::string> used = UsedNames(query);
  for (const char* candidate : {"n", "m", "l", "k", "j"}) {
    if (!used.contains(candidate)) return candidate;
  }
  for (int i = 1;; ++i) {
    std::string candidate = "v" + std::to_string(i);
    if (!used.contains(candidate)) return candidate;
  }
}

std::vector<BoolExpr> Conjuncts(std::optional<BoolExpr> where) {
  std::vector<BoolExpr> out;
  if (!where) return out;
  if (where->kind == BoolExpr::Kind::kAnd) return std::move(where->children);
  out.push_back(std::move(*where));
  return out;
}

std::optional<BoolExpr> FromConjuncts(std::vector<BoolExpr> conjuncts) {
  if (conjuncts.empty()) return std::nullopt;
  if (conjuncts.size() == 1) return std::move(conjuncts.front());
  return BoolExpr::And(std::move(conjuncts));
}

int CountLeaves(const std::vector<BoolExpr>& conjuncts) {
  Query probe;
  probe.where = FromConjuncts(conjuncts);
  return CountConditions(probe);
}

template <typename Fn>
void ForEachComparison(BoolExpr& expr, Fn&& fn) {
  if (expr.kind == BoolExpr::Kind::kCompare) {
    fn(expr.comparison);
    return;
  }
  for (BoolExpr& child : expr.children) ForEachComparison(child, fn);
}

template <typename Fn>
void ForEachComparison(const BoolExpr& expr, Fn&& fn) {
  if (expr.kind == BoolExpr::Kind::kCompare) {
    fn(expr.comparison);
    return;
  }
  for (const BoolExpr& child : expr.children) ForEachComparison(child, fn);
}

// Visits every PropertyRef in WHERE, WITH, RETURN and ORDER BY.
template <typename Fn>
void ForEachProperty(Query& query, Fn&& fn) {
  auto operand = [&](Operand& op) {
    if (auto* prop = std::get_if<PropertyRef>(&op)) fn(*prop);
  };
  auto expr = [&](Expr& e) {
    if (auto* prop = std::get_if<PropertyRef>(&e)) {
      fn(*prop);
    } else if (auto* agg = std::get_if<Aggregate>(&e)) {
      if (auto* p = std::get_if<PropertyRef>(&agg->argument)) fn(*p);
    } else if (auto* cmp = std::get_if<Comparison>(&e)) {
      operand(cmp->lhs);
      operand(cmp->rhs);
    }
  };
  if (query.where) {
    ForEachComparison(*query.where, [&](Comparison& c) {
      operand(c.lhs);
      operand(c.rhs);
    });
  }
  if (query.with) {
    for (ProjectionItem& item : query.with->items) expr(item.expr);
  }
  for (ProjectionItem& item : query.ret.items) expr(item.expr);
  if (query.ret.order_by) expr(query.ret.order_by->expr);
}

// Every comparison in WHERE and in RETURN items.
template <typename Fn>
void ForEachQueryComparison(Query& query, Fn&& fn) {
  if (query.where) ForEachComparison(*query.where, fn);
  for (ProjectionItem& item : query.ret.items) {
    if (auto* cmp = std::get_if<Comparison>(&item.expr)) fn(*cmp);
  }
}

bool IsNameProperty(const Operand& operand) {
  const auto* prop = std::get_if<PropertyRef>(&operand);
  return prop != nullptr && prop->property == "name";
}

bool LiteralMatchesValue(const Literal& literal, const std::string& value) {
  if (literal.is_number()) {
    auto parsed = ParseDecimal(value);
    return parsed && *parsed == literal.number();
  }
  return literal.text() == value;
}

bool IsReferenced(const Query& query, const std::string& variable) {
  if (query.where && VariablesIn(*query.where).contains(variable)) return true;
  if (query.with) {
    for (const ProjectionItem& item : query.with->items) {
      if (VariablesIn(item.expr).contains(variable)) return true;
    }
  }
  for (const ProjectionItem& item : query.ret.items) {
    if (VariablesIn(item.expr).contains(variable)) return true;
  }
  return query.ret.order_by &&
         VariablesIn(query.ret.order_by->expr).contains(variable);
}

}  // namespace

size_t EditDistance(std::string_view a, std::string_view b) {
  std::u32string s = utf8::Decode(a);
  std::u32string t = utf8::Decode(b);
  std::vector<size_t> prev(t.size() + 1);
  std::vector<size_t> cur(t.size() + 1);
  for (size_t j = 0; j <= t.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= t.size(); ++j) {
      size_t substitute = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

double NormalizedSimilarity(std::string_view a, std::string_view b) {
  size_t longest = std::max(utf8::Length(a), utf8::Length(b));
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistance(a, b)) / static_cast<double>(longest);
}

std::string ClosestTerm(std::string_view word, const std::set<std::string>& terms,
                        double threshold) {
  std::string best;
  double best_score = -1.0;
  for (const std::string& term : terms) {
    double score = NormalizedSimilarity(word, term);
    if (score > best_score) {
      best_score = score;
      best = term;
    }
  }
  if (best_score < threshold) return {};
  return best;
}

Query ReclassifyTags(Query query, const KnowledgeGraph& graph,
                     const Lexicon& lexicon, RepairNotes* notes) {
  std::vector<BoolExpr> added;
  for (PathPattern& pattern : query.patterns) {
    for (NodePattern& node : pattern.nodes) {
      if (!node.tag) continue;
      const std::string& text = *node.tag;
      bool real_tag = graph.HasTag(text) || lexicon.tags.contains(text);
      bool entity = graph.NodeIndex(text).has_value() || lexicon.entities.contains(text);
      if (real_tag || !entity) continue;
      if (node.variable.empty()) node.variable = FreshVariable(query);
      added.push_back(BoolExpr::Compare(
          Comparison{PropertyRef{node.variable, "name"}, CompareOp::kEq, Literal{text}}));
      Applied(notes, "tag " + QuoteIdentifier(text) + " moved to " + Print(added.back()));
      node.tag.reset();
    }
  }
  if (added.empty()) return query;
  for (BoolExpr& conjunct : Conjuncts(std::move(query.where))) {
    added.push_back(std::move(conjunct));
  }
  query.where = FromConjuncts(std::move(added));
  return query;
}

Query MapFuzzyNouns(Query query, const Lexicon& lexicon, RepairNotes* notes) {
  auto repair = [&](std::string& word, const std::set<std::string>& vocab,
                    const char* what) {
    if (vocab.contains(word)) return;
    std::string replacement = ClosestTerm(word, vocab);
    if (replacement.empty()) {
      Flag(notes, std::string("no vocabulary match for ") + what + " " +
                      QuoteString(word));
      return;
    }
    Applied(notes, std::string("mapped ") + what + " " + QuoteString(word) + " to " +
                       QuoteString(replacement));
    word = std::move(replacement);
  };

  for (PathPattern& pattern : query.patterns) {
    for (NodePattern& node : pattern.nodes) {
      if (node.tag) repair(*node.tag, lexicon.tags, "tag");
    }
    for (RelPattern& rel : pattern.rels) repair(rel.type, lexicon.relations, "relation");
  }
  ForEachProperty(query, [&](PropertyRef& prop) {
    if (prop.property != "name") repair(prop.property, lexicon.attributes, "attribute");
  });
  ForEachQueryComparison(query, [&](Comparison& cmp) {
    auto fix = [&](const Operand& property_side, Operand& literal_side) {
      if (!IsNameProperty(property_side)) return;
      auto* literal = std::get_if<Literal>(&literal_side);
      if (literal == nullptr || literal->is_number()) return;
      repair(std::get<std::string>(literal->value), lexicon.entities, "entity");
    };
    fix(cmp.lhs, cmp.rhs);
    fix(cmp.rhs, cmp.lhs);
  });
  return query;
}

Query RepairConditions(Query query, const AuxPrediction& aux,
                       const KeyInfo& key_info, RepairNotes* notes) {
  std::vector<BoolExpr> conjuncts = Conjuncts(std::move(query.where));
  int conditions = CountLeaves(conjuncts);
  while (conditions > aux.condition_count && !conjuncts.empty()) {
    Applied(notes, "dropped condition " + Print(conjuncts.back()));
    conjuncts.pop_back();
    conditions = CountLeaves(conjuncts);
  }

  if (conditions < aux.condition_count) {
    std::set<std::string> used_attributes;
    std::vector<Literal> used_literals;
    for (const BoolExpr& conjunct : conjuncts) {
      ForEachComparison(conjunct, [&](const Comparison& c) {
        for (const Operand* side : {&c.lhs, &c.rhs}) {
          if (const auto* prop = std::get_if<PropertyRef>(side)) {
            used_attributes.insert(prop->property);
          } else {
            used_literals.push_back(std::get<Literal>(*side));
          }
        }
      });
    }
    std::vector<std::string> attributes;
    for (const std::string& attr : key_info.attributes) {
      if (!used_attributes.contains(attr)) attributes.push_back(attr);
    }
    std::vector<std::string> values;
    for (const std::string& value : key_info.values) {
      bool used = std::any_of(used_literals.begin(), used_literals.end(),
                              [&](const Literal& l) { return LiteralMatchesValue(l, value); });
      if (!used) values.push_back(value);
    }
    size_t pairs = std::min(attributes.size(), values.size());
    if (pairs > 0 && !query.patterns.empty()) {
      NodePattern& anchor = query.patterns.front().nodes.front();
      if (anchor.variable.empty()) anchor.variable = FreshVariable(query);
      for (size_t i = 0; i < pairs && conditions < aux.condition_count; ++i) {
        Literal literal;
        if (auto number = ParseDecimal(values[i])) {
          literal.value = *number;
        } else {
          literal.value = values[i];
        }
        conjuncts.push_back(BoolExpr::Compare(Comparison{
            PropertyRef{anchor.variable, attributes[i]}, CompareOp::kEq, literal}));
        Applied(notes, "added condition " + Print(conjuncts.back()));
        ++conditions;
      }
    }
    if (conditions < aux.condition_count) {
      Flag(notes, "condition deficit: " + std::to_string(conditions) + " < " +
                      std::to_string(aux.condition_count));
    }
  }
  query.where = FromConjuncts(std::move(conjuncts));

  while (CountRelationships(query) > aux.relation_count) {
    auto longest = std::max_element(
        query.patterns.begin(), query.patterns.end(),
        [](const PathPattern& a, const PathPattern& b) { return a.rels.size() < b.rels.size(); });
    Applied(notes, "dropped relationship " + QuoteIdentifier(longest->rels.back().type));
    NodePattern tail = std::move(longest->nodes.back());
    longest->nodes.pop_back();
    longest->rels.pop_back();
    if (!tail.variable.empty()) {
      std::vector<std::string> still_bound = NodeVariables(query);
      bool bound = std::find(still_bound.begin(), still_bound.end(), tail.variable) !=
                   still_bound.end();
      if (!bound && IsReferenced(query, tail.variable)) {
        query.patterns.push_back(PathPattern{{std::move(tail)}, {}});
      }
    }
  }
  if (CountRelationships(query) < aux.relation_count) {
    if (notes != nullptr) notes->relation_deficit = true;
    Flag(notes, "relation deficit: " + std::to_string(CountRelationships(query)) +
                    " < " + std::to_string(aux.relation_count));
  }
  return query;
}

Query Postprocess(Query query, const KnowledgeGraph& graph,
                  const Lexicon& lexicon, const AuxPrediction& aux,
                  const KeyInfo& key_info, RepairNotes* notes) {
  query = ReclassifyTags(std::move(query), graph, lexicon, notes);
  query = MapFuzzyNouns(std::move(query), lexicon, notes);
  return RepairConditions(std::move(query), aux, key_info, notes);
}

}  // namespace cql
}  // namespace kbqa
