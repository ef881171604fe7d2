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

#include "kbqa/cql_printer.h"

#include <array>
#include <cctype>

#include "kbqa/io_util.h"

namespace kbqa {
namespace cql {

namespace {

constexpr std::array<std::string_view, 27> kNeedsQuoting = {
    "MATCH", "WHERE",  "WITH",   "RETURN", "ORDER", "BY",      "LIMIT",
    "AND",   "OR",     "NOT",    "AS",     "ASC",   "DESC",    "DISTINCT",
    "XOR",   "OPTIONAL", "UNWIND", "CREATE", "MERGE", "DELETE", "SKIP",
    "SET",   "CALL",   "ASCENDING", "DESCENDING", "TRUE", "FALSE"};

bool IsPlainWord(std::string_view name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') {
    return false;
  }
  for (char c : name) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80 || !(std::isalnum(u) || c == '_')) return false;
  }
  for (std::string_view word : kNeedsQuoting) {
    if (word.size() != name.size()) continue;
    bool same = true;
    for (size_t i = 0; i < word.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(name[i])) != word[i]) {
        same = false;
        break;
      }
    }
    if (same) return false;
  }
  return true;
}

const char* OpText(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "<>";
    case CompareOp::kLt: return "<";
    case CompareOp::kGt: return ">";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGe: return ">=";
  }
  return "=";
}

const char* FnName(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::kCount: return "count";
    case AggregateFn::kMin: return "min";
    case AggregateFn::kMax: return "max";
    case AggregateFn::kAvg: return "avg";
    case AggregateFn::kSum: return "sum";
  }
  return "count";
}

std::string PrintProperty(const PropertyRef& prop) {
  return QuoteIdentifier(prop.variable) + "." + QuoteIdentifier(prop.property);
}

std::string PrintLiteral(const Literal& literal) {
  if (literal.is_number()) return FormatNumber(literal.number());
  return QuoteString(literal.text());
}

std::string PrintOperand(const Operand& operand) {
  if (const auto* prop = std::get_if<PropertyRef>(&operand)) {
    return PrintProperty(*prop);
  }
  return PrintLiteral(std::get<Literal>(operand));
}

std::string PrintComparison(const Comparison& comparison) {
  return PrintOperand(comparison.lhs) + " " + OpText(comparison.op) + " " +
         PrintOperand(comparison.rhs);
}

std::string PrintNode(const NodePattern& node) {
  std::string out = "(";
  if (!node.variable.empty()) out += QuoteIdentifier(node.variable);
  if (node.tag) out += ":" + QuoteIdentifier(*node.tag);
  return out + ")";
}

std::string PrintRel(const RelPattern& rel) {
  std::string body = "[";
  if (!rel.variable.empty()) body += QuoteIdentifier(rel.variable);
  body += ":" + QuoteIdentifier(rel.type) + "]";
  switch (rel.direction) {
    case Direction::kRight: return "-" + body + "->";
    case Direction::kLeft: return "<-" + body + "-";
    case Direction::kBoth: return "-" + body + "-";
  }
  return "-" + body + "->";
}

std::string PrintPattern(const PathPattern& pattern) {
  std::string out = PrintNode(pattern.nodes.front());
  for (size_t i = 0; i < pattern.rels.size(); ++i) {
    out += PrintRel(pattern.rels[i]);
    out += PrintNode(pattern.nodes[i + 1]);
  }
  return out;
}

bool NeedsParens(const BoolExpr& parent, const BoolExpr& child) {
  if (child.kind == BoolExpr::Kind::kCompare ||
      child.kind == BoolExpr::Kind::kNot) {
    return false;
  }
  // AND binds tighter than OR, so only AND-under-OR can go bare.
  return !(parent.kind == BoolExpr::Kind::kOr &&
           child.kind == BoolExpr::Kind::kAnd);
}

std::string PrintItem(const ProjectionItem& item) {
  std::string out = Print(item.expr);
  if (!item.alias.empty()) out += " AS " + QuoteIdentifier(item.alias);
  return out;
}

}  // namespace

std::string QuoteIdentifier(std::string_view name) {
  if (IsPlainWord(name)) return std::string(name);
  std::string out = "`";
  for (char c : name) {
    if (c == '`') out += "``";
    else out.push_back(c);
  }
  return out + "`";
}

std::string QuoteString(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string Print(const BoolExpr& expr) {
  switch (expr.kind) {
    case BoolExpr::Kind::kCompare:
      return PrintComparison(expr.comparison);
    case BoolExpr::Kind::kNot: {
      const BoolExpr& child = expr.children.front();
      std::string inner = Print(child);
      if (NeedsParens(expr, child)) inner = "(" + inner + ")";
      return "NOT " + inner;
    }
    case BoolExpr::Kind::kAnd:
    case BoolExpr::Kind::kOr: {
      const char* joiner = expr.kind == BoolExpr::Kind::kAnd ? " AND " : " OR ";
      std::string out;
      for (size_t i = 0; i < expr.children.size(); ++i) {
        if (i > 0) out += joiner;
        std::string inner = Print(expr.children[i]);
        if (NeedsParens(expr, expr.children[i])) inner = "(" + inner + ")";
        out += inner;
      }
      return out;
    }
  }
  return {};
}

std::string Print(const Expr& expr) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, VariableRef>) {
          return QuoteIdentifier(e.name);
        } else if constexpr (std::is_same_v<T, PropertyRef>) {
          return PrintProperty(e);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          std::string out = std::string(FnName(e.fn)) + "(";
          if (e.distinct) out += "DISTINCT ";
          if (std::holds_alternative<std::monostate>(e.argument)) {
            out += "*";
          } else if (const auto* v = std::get_if<VariableRef>(&e.argument)) {
            out += QuoteIdentifier(v->name);
          } else {
            out += PrintProperty(std::get<PropertyRef>(e.argument));
          }
          return out + ")";
        } else {
          return PrintComparison(e);
        }
      },
      expr);
}

std::string Print(const Query& query) {
  std::string out = "MATCH ";
  for (size_t i = 0; i < query.patterns.size(); ++i) {
    if (i > 0) out += ", ";
    out += PrintPattern(query.patterns[i]);
  }
  if (query.where) out += " WHERE " + Print(*query.where);
  if (query.with) {
    out += " WITH ";
    for (size_t i = 0; i < query.with->items.size(); ++i) {
      if (i > 0) out += ", ";
      out += PrintItem(query.with->items[i]);
    }
  }
  out += " RETURN ";
  if (query.ret.distinct) out += "DISTINCT ";
  for (size_t i = 0; i < query.ret.items.size(); ++i) {
    if (i > 0) out += ", ";
    out += PrintItem(query.ret.items[i]);
  }
  if (query.ret.order_by) {
    out += " ORDER BY " + Print(query.ret.order_by->expr);
    out += query.ret.order_by->descending ? " DESC" : " ASC";
  }
  if (query.ret.limit) out += " LIMIT " + std::to_string(*query.ret.limit);
  return out;
}

}  // namespace cql
}  // namespace kbqa
