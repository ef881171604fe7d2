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

#include "kbqa/cql_executor.h"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kbqa {
namespace cql {

namespace {

struct Value {
  enum class Kind { kNull, kScalar, kBool, kNode };

  Kind kind = Kind::kNull;
  std::string raw;                 // kScalar
  std::optional<double> numeric;   // kScalar
  bool flag = false;               // kBool
  size_t node = 0;                 // kNode

  static Value Scalar(std::string raw, std::optional<double> numeric) {
    Value v;
    v.kind = Kind::kScalar;
    v.raw = std::move(raw);
    v.numeric = numeric;
    return v;
  }
  static Value Number(double number) {
    return Scalar(FormatNumber(number), number);
  }
  static Value Bool(bool flag) {
    Value v;
    v.kind = Kind::kBool;
    v.flag = flag;
    return v;
  }
  static Value NodeRef(size_t node) {
    Value v;
    v.kind = Kind::kNode;
    v.node = node;
    return v;
  }

  bool is_null() const { return kind == Kind::kNull; }
};

using Env = std::unordered_map<std::string, Value>;

// Total order used by ORDER BY, min and max: numbers, then other text,
// then booleans, then nodes; missing values last.
int Rank(const Value& v) {
  switch (v.kind) {
    case Value::Kind::kScalar: return v.numeric ? 0 : 1;
    case Value::Kind::kBool: return 2;
    case Value::Kind::kNode: return 3;
    case Value::Kind::kNull: return 4;
  }
  return 4;
}

// Negative, zero or positive.
int OrderCompare(const Value& a, const Value& b, const KnowledgeGraph& graph) {
  int ra = Rank(a);
  int rb = Rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0:
      return *a.numeric < *b.numeric ? -1 : (*b.numeric < *a.numeric ? 1 : 0);
    case 1:
      return a.raw.compare(b.raw);
    case 2:
      return static_cast<int>(a.flag) - static_cast<int>(b.flag);
    case 3:
      return graph.nodes()[a.node].name.compare(graph.nodes()[b.node].name);
    default:
      return 0;
  }
}

// Identity key for grouping and DISTINCT.
std::string GroupKey(const Value& v) {
  switch (v.kind) {
    case Value::Kind::kNull: return "n";
    case Value::Kind::kScalar: return "s" + v.raw;
    case Value::Kind::kBool: return v.flag ? "bT" : "bF";
    case Value::Kind::kNode: return "v" + std::to_string(v.node);
  }
  return "n";
}

std::optional<std::string> Render(const Value& v, const KnowledgeGraph& graph) {
  switch (v.kind) {
    case Value::Kind::kNull: return std::nullopt;
    case Value::Kind::kScalar: return v.raw;
    case Value::Kind::kBool: return std::string(v.flag ? "True" : "False");
    case Value::Kind::kNode: return graph.nodes()[v.node].name;
  }
  return std::nullopt;
}

class Executor {
 public:
  Executor(const Query& query, const KnowledgeGraph& graph)
      : query_(query), graph_(graph) {}

  AnswerSet Run() {
    if (auto name = FindUnboundVariable(query_)) {
      throw ExecutionError("unbound variable \"" + *name + "\"");
    }
    AssignSlots();
    std::vector<Env> envs = MatchAndFilter();
    if (query_.with) envs = ProjectWith(envs);
    return ProjectReturn(envs);
  }

 private:
  // ---- Matching ----

  struct NodeSlotRef {
    size_t slot;
    const NodePattern* pattern;
  };

  void AssignSlots() {
    std::map<std::string, size_t> named;
    node_slot_names_.clear();
    positions_.clear();
    size_t rel_slot = 0;
    for (const PathPattern& pattern : query_.patterns) {
      std::vector<size_t> slots;
      for (const NodePattern& node : pattern.nodes) {
        if (!node.variable.empty()) {
          auto [it, inserted] = named.emplace(node.variable, node_slot_names_.size());
          if (inserted) node_slot_names_.push_back(node.variable);
          slots.push_back(it->second);
        } else {
          slots.push_back(node_slot_names_.size());
          node_slot_names_.push_back("");
        }
      }
      positions_.push_back(std::move(slots));
      rel_slot += pattern.rels.size();
    }
    rel_slot_count_ = rel_slot;
  }

  bool NodeFits(size_t node, const NodePattern& pattern) const {
    return !pattern.tag || graph_.nodes()[node].tags.contains(*pattern.tag);
  }

  struct Binding {
    std::vector<size_t> nodes;  // kUnset when free
    std::vector<size_t> edges;
  };
  static constexpr size_t kUnset = static_cast<size_t>(-1);

  void MatchPattern(size_t p, size_t rel_base, Binding& binding,
                    std::vector<Binding>& out) {
    if (p == query_.patterns.size()) {
      out.push_back(binding);
      return;
    }
    const PathPattern& pattern = query_.patterns[p];
    size_t slot = positions_[p][0];
    const NodePattern& first = pattern.nodes[0];
    auto continue_from = [&](size_t node) {
      MatchStep(p, 0, node, rel_base, binding, out);
    };
    if (binding.nodes[slot] != kUnset) {
      if (NodeFits(binding.nodes[slot], first)) continue_from(binding.nodes[slot]);
      return;
    }
    for (size_t n = 0; n < graph_.node_count(); ++n) {
      if (!NodeFits(n, first)) continue;
      binding.nodes[slot] = n;
      continue_from(n);
    }
    binding.nodes[slot] = kUnset;
  }

  // Extends pattern `p` from its node at position `i` (bound to `current`).
  void MatchStep(size_t p, size_t i, size_t current, size_t rel_base,
                 Binding& binding, std::vector<Binding>& out) {
    const PathPattern& pattern = query_.patterns[p];
    if (i == pattern.rels.size()) {
      MatchPattern(p + 1, rel_base + pattern.rels.size(), binding, out);
      return;
    }
    const RelPattern& rel = pattern.rels[i];
    const NodePattern& next_pattern = pattern.nodes[i + 1];
    size_t next_slot = positions_[p][i + 1];
    size_t rel_slot = rel_base + i;

    auto try_edge = [&](size_t e, size_t other) {
      if (graph_.edges()[e].relation != rel.type) return;
      for (size_t used = 0; used < rel_slot; ++used) {
        if (binding.edges[used] == e) return;
      }
      bool was_free = binding.nodes[next_slot] == kUnset;
      if (!was_free && binding.nodes[next_slot] != other) return;
      if (!NodeFits(other, next_pattern)) return;
      binding.nodes[next_slot] = other;
      binding.edges[rel_slot] = e;
      MatchStep(p, i + 1, other, rel_base, binding, out);
      binding.edges[rel_slot] = kUnset;
      if (was_free) binding.nodes[next_slot] = kUnset;
    };

    if (rel.direction != Direction::kLeft) {
      for (size_t e : graph_.OutEdges(current)) try_edge(e, graph_.EdgeTarget(e));
    }
    if (rel.direction != Direction::kRight) {
      for (size_t e : graph_.InEdges(current)) {
        // A self-loop was already offered through the outgoing list.
        if (rel.direction == Direction::kBoth &&
            graph_.EdgeSource(e) == graph_.EdgeTarget(e)) {
          continue;
        }
        try_edge(e, graph_.EdgeSource(e));
      }
    }
  }

  std::vector<Env> MatchAndFilter() {
    Binding binding;
    binding.nodes.assign(node_slot_names_.size(), kUnset);
    binding.edges.assign(rel_slot_count_, kUnset);
    std::vector<Binding> bindings;
    MatchPattern(0, 0, binding, bindings);
    std::sort(bindings.begin(), bindings.end(),
              [](const Binding& a, const Binding& b) {
                if (a.nodes != b.nodes) return a.nodes < b.nodes;
                return a.edges < b.edges;
              });

    std::vector<Env> envs;
    for (const Binding& b : bindings) {
      Env env;
      for (size_t s = 0; s < node_slot_names_.size(); ++s) {
        if (!node_slot_names_[s].empty()) {
          env.emplace(node_slot_names_[s], Value::NodeRef(b.nodes[s]));
        }
      }
      if (query_.where && !Test(*query_.where, env)) continue;
      envs.push_back(std::move(env));
    }
    return envs;
  }

  // ---- Expressions ----

  Value Lookup(const Env& env, const std::string& name) const {
    auto it = env.find(name);
    if (it == env.end()) throw ExecutionError("unbound variable \"" + name + "\"");
    return it->second;
  }

  Value Property(const Env& env, const PropertyRef& prop) const {
    Value target = Lookup(env, prop.variable);
    if (target.kind != Value::Kind::kNode) return {};
    const Node& node = graph_.nodes()[target.node];
    if (prop.property == "name") return Value::Scalar(node.name, ParseDecimal(node.name));
    auto it = node.attributes.find(prop.property);
    if (it == node.attributes.end()) return {};
    return Value::Scalar(it->second.raw, it->second.numeric);
  }

  Value EvalOperand(const Env& env, const Operand& operand) const {
    if (const auto* prop = std::get_if<PropertyRef>(&operand)) {
      return Property(env, *prop);
    }
    const Literal& literal = std::get<Literal>(operand);
    if (literal.is_number()) return Value::Number(literal.number());
    return Value::Scalar(literal.text(), ParseDecimal(literal.text()));
  }

  bool Compare(const Env& env, const Comparison& comparison) const {
    Value lhs = EvalOperand(env, comparison.lhs);
    Value rhs = EvalOperand(env, comparison.rhs);
    if (lhs.is_null() || rhs.is_null()) return false;
    int cmp;
    if (lhs.numeric && rhs.numeric) {
      cmp = *lhs.numeric < *rhs.numeric ? -1 : (*rhs.numeric < *lhs.numeric ? 1 : 0);
    } else {
      cmp = lhs.raw.compare(rhs.raw);
    }
    switch (comparison.op) {
      case CompareOp::kEq: return cmp == 0;
      case CompareOp::kNe: return cmp != 0;
      case CompareOp::kLt: return cmp < 0;
      case CompareOp::kGt: return cmp > 0;
      case CompareOp::kLe: return cmp <= 0;
      case CompareOp::kGe: return cmp >= 0;
    }
    return false;
  }

  bool Test(const BoolExpr& expr, const Env& env) const {
    switch (expr.kind) {
      case BoolExpr::Kind::kCompare:
        return Compare(env, expr.comparison);
      case BoolExpr::Kind::kNot:
        return !Test(expr.children.front(), env);
      case BoolExpr::Kind::kAnd:
        return std::all_of(expr.children.begin(), expr.children.end(),
                           [&](const BoolExpr& c) { return Test(c, env); });
      case BoolExpr::Kind::kOr:
        return std::any_of(expr.children.begin(), expr.children.end(),
                           [&](const BoolExpr& c) { return Test(c, env); });
    }
    return false;
  }

  Value EvalRow(const Env& env, const Expr& expr) const {
    if (const auto* v = std::get_if<VariableRef>(&expr)) return Lookup(env, v->name);
    if (const auto* p = std::get_if<PropertyRef>(&expr)) return Property(env, *p);
    if (const auto* c = std::get_if<Comparison>(&expr)) return Value::Bool(Compare(env, *c));
    throw ExecutionError("aggregate outside of a projection");
  }

  Value EvalAggregate(const Aggregate& agg, const std::vector<const Env*>& group) const {
    if (std::holds_alternative<std::monostate>(agg.argument)) {
      return Value::Number(static_cast<double>(group.size()));
    }
    std::vector<Value> values;
    std::set<std::string> seen;
    for (const Env* env : group) {
      Value v;
      if (const auto* var = std::get_if<VariableRef>(&agg.argument)) {
        v = Lookup(*env, var->name);
      } else {
        v = Property(*env, std::get<PropertyRef>(agg.argument));
      }
      if (v.is_null()) continue;
      if (agg.distinct && !seen.insert(GroupKey(v)).second) continue;
      values.push_back(std::move(v));
    }
    switch (agg.fn) {
      case AggregateFn::kCount:
        return Value::Number(static_cast<double>(values.size()));
      case AggregateFn::kMin:
      case AggregateFn::kMax: {
        if (values.empty()) return {};
        const Value* best = &values.front();
        for (const Value& v : values) {
          int cmp = OrderCompare(v, *best, graph_);
          if (agg.fn == AggregateFn::kMin ? cmp < 0 : cmp > 0) best = &v;
        }
        return *best;
      }
      case AggregateFn::kSum:
      case AggregateFn::kAvg: {
        double sum = 0;
        size_t n = 0;
        for (const Value& v : values) {
          if (v.kind != Value::Kind::kScalar || !v.numeric) continue;
          sum += *v.numeric;
          ++n;
        }
        if (n == 0) return {};
        return Value::Number(agg.fn == AggregateFn::kSum ? sum : sum / static_cast<double>(n));
      }
    }
    return {};
  }

  // ---- Projection ----

  struct Row {
    std::vector<Value> cells;
    std::vector<const Env*> members;  // the group, or the single source row
  };

  std::vector<Row> Project(const std::vector<Env>& envs,
                           const std::vector<ProjectionItem>& items) const {
    bool aggregating = std::any_of(items.begin(), items.end(),
                                   [](const ProjectionItem& i) { return IsAggregate(i.expr); });
    std::vector<Row> rows;
    if (!aggregating) {
      for (const Env& env : envs) {
        Row row;
        for (const ProjectionItem& item : items) row.cells.push_back(EvalRow(env, item.expr));
        row.members.push_back(&env);
        rows.push_back(std::move(row));
      }
      return rows;
    }
    std::map<std::string, size_t> group_of;
    bool has_keys = std::any_of(items.begin(), items.end(),
                                [](const ProjectionItem& i) { return !IsAggregate(i.expr); });
    if (!has_keys) rows.push_back(Row{});
    for (const Env& env : envs) {
      if (!has_keys) {
        rows.front().members.push_back(&env);
        continue;
      }
      std::string key;
      std::vector<Value> cells;
      for (const ProjectionItem& item : items) {
        if (IsAggregate(item.expr)) {
          cells.emplace_back();
          continue;
        }
        Value v = EvalRow(env, item.expr);
        key += GroupKey(v);
        key.push_back('\x1f');
        cells.push_back(std::move(v));
      }
      auto [it, inserted] = group_of.emplace(key, rows.size());
      if (inserted) rows.push_back(Row{std::move(cells), {}});
      rows[it->second].members.push_back(&env);
    }
    for (Row& row : rows) {
      row.cells.resize(items.size());
      for (size_t i = 0; i < items.size(); ++i) {
        if (const auto* agg = std::get_if<Aggregate>(&items[i].expr)) {
          row.cells[i] = EvalAggregate(*agg, row.members);
        }
      }
    }
    return rows;
  }

  std::vector<Env> ProjectWith(const std::vector<Env>& envs) const {
    const auto& items = query_.with->items;
    std::vector<Env> out;
    for (Row& row : Project(envs, items)) {
      Env env;
      for (size_t i = 0; i < items.size(); ++i) {
        const std::string& name = items[i].alias.empty()
                                      ? std::get<VariableRef>(items[i].expr).name
                                      : items[i].alias;
        env[name] = std::move(row.cells[i]);
      }
      out.push_back(std::move(env));
    }
    return out;
  }

  Value OrderKey(const Row& row, const OrderBy& order,
                 const std::vector<ProjectionItem>& items) const {
    if (const auto* agg = std::get_if<Aggregate>(&order.expr)) {
      return EvalAggregate(*agg, row.members);
    }
    for (size_t i = 0; i < items.size(); ++i) {
      if (items[i].expr == order.expr) return row.cells[i];
      const auto* var = std::get_if<VariableRef>(&order.expr);
      if (var != nullptr && !items[i].alias.empty() && items[i].alias == var->name) {
        return row.cells[i];
      }
    }
    if (row.members.empty()) return {};
    return EvalRow(*row.members.front(), order.expr);
  }

  AnswerSet ProjectReturn(const std::vector<Env>& envs) const {
    const ReturnClause& ret = query_.ret;
    std::vector<Row> rows = Project(envs, ret.items);
    if (ret.distinct) {
      std::set<std::string> seen;
      std::vector<Row> unique;
      for (Row& row : rows) {
        std::string key;
        for (const Value& v : row.cells) {
          key += GroupKey(v);
          key.push_back('\x1f');
        }
        if (seen.insert(key).second) unique.push_back(std::move(row));
      }
      rows = std::move(unique);
    }
    if (ret.order_by) {
      std::vector<std::pair<Value, size_t>> keyed;
      keyed.reserve(rows.size());
      for (size_t i = 0; i < rows.size(); ++i) {
        keyed.emplace_back(OrderKey(rows[i], *ret.order_by, ret.items), i);
      }
      bool desc = ret.order_by->descending;
      std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        int cmp = OrderCompare(a.first, b.first, graph_);
        return desc ? cmp > 0 : cmp < 0;
      });
      std::vector<Row> sorted;
      sorted.reserve(rows.size());
      for (auto& [key, index] : keyed) sorted.push_back(std::move(rows[index]));
      rows = std::move(sorted);
    }
    if (ret.limit && rows.size() > static_cast<size_t>(*ret.limit)) {
      rows.resize(static_cast<size_t>(*ret.limit));
    }
    AnswerSet answers;
    for (const Row& row : rows) {
      for (const Value& v : row.cells) {
        if (auto text = Render(v, graph_)) answers.insert(std::move(*text));
      }
    }
    return answers;
  }

  const Query& query_;
  const KnowledgeGraph& graph_;
  std::vector<std::string> node_slot_names_;
  std::vector<std::vector<size_t>> positions_;
  size_t rel_slot_count_ = 0;
};

}  // namespace

AnswerSet Execute(const Query& query, const KnowledgeGraph& graph) {
  return Executor(query, graph).Run();
}

}  // namespace cql
}  // namespace kbqa
