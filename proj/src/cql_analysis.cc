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

#include "kbqa/cql_analysis.h"

#include <algorithm>

namespace kbqa {
namespace cql {

namespace {

int CountLeaves(const BoolExpr& expr) {
  if (expr.kind == BoolExpr::Kind::kCompare) return 1;
  int total = 0;
  for (const BoolExpr& child : expr.children) total += CountLeaves(child);
  return total;
}

}  // namespace

int CountConditions(const Query& query) {
  return query.where ? CountLeaves(*query.where) : 0;
}

int CountRelationships(const Query& query) {
  int total = 0;
  for (const PathPattern& pattern : query.patterns) {
    total += static_cast<int>(pattern.rels.size());
  }
  return total;
}

int InferIntent(const Query& query) {
  const auto& items = query.ret.items;
  if (std::any_of(items.begin(), items.end(), [](const ProjectionItem& item) {
        return std::holds_alternative<Comparison>(item.expr);
      })) {
    return 3;
  }
  if (std::any_of(items.begin(), items.end(), [](const ProjectionItem& item) {
        const auto* agg = std::get_if<Aggregate>(&item.expr);
        return agg != nullptr && agg->fn == AggregateFn::kCount;
      })) {
    return 1;
  }
  if (query.ret.order_by && query.ret.limit) return 2;
  return 0;
}

AuxPrediction DeriveAux(const Query& query) {
  AuxPrediction aux;
  aux.intent = InferIntent(query);
  aux.relation_count = std::min(2, CountRelationships(query));
  aux.condition_count = std::min(2, CountConditions(query));
  return aux;
}

}  // namespace cql
}  // namespace kbqa
