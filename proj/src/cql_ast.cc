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

#include "kbqa/cql_ast.h"

#include <algorithm>
#include <utility>

namespace kbqa {
namespace cql {

BoolExpr BoolExpr::Compare(Comparison comparison) {
  BoolExpr expr;
  expr.kind = Kind::kCompare;
  expr.comparison = std::move(comparison);
  return expr;
}

BoolExpr BoolExpr::And(std::vector<BoolExpr> children) {
  BoolExpr expr;
  expr.kind = Kind::kAnd;
  expr.children = std::move(children);
  return expr;
}

BoolExpr BoolExpr::Or(std::vector<BoolExpr> children) {
  BoolExpr expr;
  expr.kind = Kind::kOr;
  expr.children = std::move(children);
  return expr;
}

BoolExpr BoolExpr::Not(BoolExpr child) {
  BoolExpr expr;
  expr.kind = Kind::kNot;
  expr.children.push_back(std::move(child));
  return expr;
}

bool IsAggregate(const Expr& expr) {
  return std::holds_alternative<Aggregate>(expr);
}

std::vector<std::string> NodeVariables(const Query& query) {
  std::vector<std::string> names;
  for (const PathPattern& pattern : query.patterns) {
    for (const NodePattern& node : pattern.nodes) {
      if (node.variable.empty()) continue;
      if (std::find(names.begin(), names.end(), node.variable) == names.end()) {
        names.push_back(node.variable);
      }
    }
  }
  return names;
}

std::set<std::string> RelationshipVariables(const Query& query) {
  std::set<std::string> names;
  for (const PathPattern& pattern : query.patterns) {
    for (const RelPattern& rel : pattern.rels) {
      if (!rel.variable.empty()) names.insert(rel.variable);
    }
  }
  return names;
}

namespace {

void CollectOperand(const Operand& operand, std::set<std::string>& out) {
  if (const auto* prop = std::get_if<PropertyRef>(&operand)) {
    out.insert(prop->variable);
  }
}

}  // namespace

std::set<std::string> VariablesIn(const BoolExpr& expr) {
  std::set<std::string> out;
  if (expr.kind == BoolExpr::Kind::kCompare) {
    CollectOperand(expr.comparison.lhs, out);
    CollectOperand(expr.comparison.rhs, out);
    return out;
  }
  for (const BoolExpr& child : expr.children) {
    out.merge(VariablesIn(child));
  }
  return out;
}

std::set<std::string> VariablesIn(const Expr& expr) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, VariableRef>) {
          out.insert(e.name);
        } else if constexpr (std::is_same_v<T, PropertyRef>) {
          out.insert(e.variable);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          if (const auto* v = std::get_if<VariableRef>(&e.argument)) {
            out.insert(v->name);
          } else if (const auto* p = std::get_if<PropertyRef>(&e.argument)) {
            out.insert(p->variable);
          }
        } else {
          CollectOperand(e.lhs, out);
          CollectOperand(e.rhs, out);
        }
      },
      expr);
  return out;
}

std::optional<std::string> FindUnboundVariable(const Query& query) {
  std::vector<std::string> node_vars = NodeVariables(query);
  std::set<std::string> scope(node_vars.begin(), node_vars.end());
  auto check = [](const std::set<std::string>& used,
                  const std::set<std::string>& bound)
      -> std::optional<std::string> {
    for (const std::string& name : used) {
      if (!bound.contains(name)) return name;
    }
    return std::nullopt;
  };

  if (query.where) {
    if (auto name = check(VariablesIn(*query.where), scope)) return name;
  }
  if (query.with) {
    std::set<std::string> projected;
    for (const ProjectionItem& item : query.with->items) {
      if (auto name = check(VariablesIn(item.expr), scope)) return name;
      if (!item.alias.empty()) {
        projected.insert(item.alias);
      } else if (const auto* v = std::get_if<VariableRef>(&item.expr)) {
        projected.insert(v->name);
      }
    }
    scope = std::move(projected);
  }
  std::set<std::string> with_aliases = scope;
  for (const ProjectionItem& item : query.ret.items) {
    if (auto name = check(VariablesIn(item.expr), scope)) return name;
    if (!item.alias.empty()) with_aliases.insert(item.alias);
  }
  if (query.ret.order_by) {
    if (auto name = check(VariablesIn(query.ret.order_by->expr), with_aliases)) {
      return name;
    }
  }
  return std::nullopt;
}

}  // namespace cql
}  // namespace kbqa
