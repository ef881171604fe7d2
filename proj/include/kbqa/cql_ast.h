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

#ifndef KBQA_CQL_AST_H_
#define KBQA_CQL_AST_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace kbqa {
namespace cql {

// AST for the Cypher subset generated by the pipeline: comma-separated MATCH
// patterns of at most two hops, a WHERE tree, one optional WITH and a RETURN
// with ORDER BY / LIMIT.

inline constexpr size_t kMaxHops = 2;

enum class Direction { kRight, kLeft, kBoth };

struct NodePattern {
  std::string variable;  // empty when anonymous
  std::optional<std::string> tag;

  bool operator==(const NodePattern&) const = default;
};

struct RelPattern {
  std::string variable;
  std::string type;
  Direction direction = Direction::kRight;

  bool operator==(const RelPattern&) const = default;
};

// nodes.size() == rels.size() + 1.
struct PathPattern {
  std::vector<NodePattern> nodes;
  std::vector<RelPattern> rels;

  bool operator==(const PathPattern&) const = default;
};

struct PropertyRef {
  std::string variable;
  std::string property;

  bool operator==(const PropertyRef&) const = default;
};

struct Literal {
  std::variant<double, std::string> value;

  bool is_number() const { return value.index() == 0; }
  double number() const { return std::get<double>(value); }
  const std::string& text() const { return std::get<std::string>(value); }

  bool operator==(const Literal&) const = default;
};

using Operand = std::variant<PropertyRef, Literal>;

enum class CompareOp { kEq, kNe, kLt, kGt, kLe, kGe };

struct Comparison {
  Operand lhs;
  CompareOp op = CompareOp::kEq;
  Operand rhs;

  bool operator==(const Comparison&) const = default;
};

struct BoolExpr {
  enum class Kind { kCompare, kAnd, kOr, kNot };

  Kind kind = Kind::kCompare;
  Comparison comparison;          // kCompare only
  std::vector<BoolExpr> children;  // kAnd / kOr: two or more; kNot: one

  static BoolExpr Compare(Comparison comparison);
  static BoolExpr And(std::vector<BoolExpr> children);
  static BoolExpr Or(std::vector<BoolExpr> children);
  static BoolExpr Not(BoolExpr child);

  bool operator==(const BoolExpr&) const = default;
};

struct VariableRef {
  std::string name;

  bool operator==(const VariableRef&) const = default;
};

enum class AggregateFn { kCount, kMin, kMax, kAvg, kSum };

struct Aggregate {
  AggregateFn fn = AggregateFn::kCount;
  bool distinct = false;
  // monostate is `*`, valid for count only.
  std::variant<std::monostate, VariableRef, PropertyRef> argument;

  bool operator==(const Aggregate&) const = default;
};

using Expr = std::variant<VariableRef, PropertyRef, Aggregate, Comparison>;

struct ProjectionItem {
  Expr expr;
  std::string alias;  // empty when absent

  bool operator==(const ProjectionItem&) const = default;
};

struct WithClause {
  std::vector<ProjectionItem> items;

  bool operator==(const WithClause&) const = default;
};

struct OrderBy {
  Expr expr;
  bool descending = false;

  bool operator==(const OrderBy&) const = default;
};

struct ReturnClause {
  bool distinct = false;
  std::vector<ProjectionItem> items;
  std::optional<OrderBy> order_by;
  std::optional<int64_t> limit;

  bool operator==(const ReturnClause&) const = default;
};

struct Query {
  std::vector<PathPattern> patterns;
  std::optional<BoolExpr> where;
  std::optional<WithClause> with;
  ReturnClause ret;

  bool operator==(const Query&) const = default;
};

bool IsAggregate(const Expr& expr);

// Named node variables in first-appearance order across the patterns.
std::vector<std::string> NodeVariables(const Query& query);
std::set<std::string> RelationshipVariables(const Query& query);

// Every variable name mentioned in WHERE.
std::set<std::string> VariablesIn(const BoolExpr& expr);
// Variable names an expression reads.
std::set<std::string> VariablesIn(const Expr& expr);

// Checks that WHERE, WITH, RETURN and ORDER BY only read node variables bound
// by MATCH, or names projected by WITH once it is present. Returns the first
// unbound name.
std::optional<std::string> FindUnboundVariable(const Query& query);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_AST_H_
