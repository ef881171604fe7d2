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

#include "oracles.h"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <stdexcept>

namespace kbqa::testing {

namespace {

std::u32string Decode(std::string_view s) {
  std::u32string out;
  for (size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string Encode(const std::u32string& s) {
  std::string out;
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

struct Occurrence {
  size_t start;
  size_t end;
};

std::vector<Occurrence> AllOccurrences(const std::u32string& text,
                                       const std::set<std::string>& terms) {
  std::vector<std::u32string> decoded;
  for (const std::string& t : terms) decoded.push_back(Decode(t));
  std::vector<Occurrence> out;
  for (size_t i = 0; i < text.size(); ++i) {
    for (size_t j = i + 1; j <= text.size(); ++j) {
      std::u32string sub = text.substr(i, j - i);
      for (const std::u32string& t : decoded) {
        if (t == sub) {
          out.push_back({i, j});
          break;
        }
      }
    }
  }
  return out;
}

Span MakeSpan(const std::u32string& text, Occurrence o) {
  return Span{Encode(text.substr(o.start, o.end - o.start)), o.start, o.end};
}

size_t Cost(size_t length, const std::vector<Span>& spans) {
  size_t covered = 0;
  for (const Span& s : spans) covered += s.end - s.start;
  return spans.size() + (length - covered);
}

}  // namespace

std::vector<Span> OracleForward(std::string_view text, const std::set<std::string>& terms) {
  std::u32string t = Decode(text);
  std::vector<Occurrence> all = AllOccurrences(t, terms);
  std::vector<Span> out;
  size_t pos = 0;
  while (pos < t.size()) {
    std::optional<Occurrence> best;
    for (const Occurrence& o : all) {
      if (o.start == pos && (!best || o.end > best->end)) best = o;
    }
    if (best) {
      out.push_back(MakeSpan(t, *best));
      pos = best->end;
    } else {
      ++pos;
    }
  }
  return out;
}

std::vector<Span> OracleBackward(std::string_view text, const std::set<std::string>& terms) {
  std::u32string t = Decode(text);
  std::vector<Occurrence> all = AllOccurrences(t, terms);
  std::vector<Span> reversed;
  size_t pos = t.size();
  while (pos > 0) {
    std::optional<Occurrence> best;
    for (const Occurrence& o : all) {
      if (o.end == pos && (!best || o.start < best->start)) best = o;
    }
    if (best) {
      reversed.push_back(MakeSpan(t, *best));
      pos = best->start;
    } else {
      --pos;
    }
  }
  return {reversed.rbegin(), reversed.rend()};
}

std::vector<Span> OracleBidirectional(std::string_view text,
                                      const std::set<std::string>& terms) {
  size_t length = Decode(text).size();
  std::vector<Span> forward = OracleForward(text, terms);
  std::vector<Span> backward = OracleBackward(text, terms);
  return Cost(length, forward) < Cost(length, backward) ? forward : backward;
}

std::string ShortestFixed(double value) {
  if (value == 0) return "0";
  char buf[512];
  for (int decimals = 0; decimals <= 40; ++decimals) {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    if (std::strtod(buf, nullptr) == value) return buf;
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Executor oracle.

namespace {

using namespace cql;

bool LooksNumeric(const std::string& text, double* out) {
  static const std::regex kDecimal(R"(\s*([+-]?\d+(\.\d+)?)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, kDecimal)) return false;
  *out = std::strtod(m[1].str().c_str(), nullptr);
  return true;
}

// Cell of a table row.
struct Cell {
  enum Kind { kMissing, kText, kTruth, kVertex } kind = kMissing;
  std::string text;
  bool has_number = false;
  double number = 0;
  bool truth = false;
  size_t vertex = 0;

  static Cell Text(std::string s) {
    Cell c;
    c.kind = kText;
    c.has_number = LooksNumeric(s, &c.number);
    c.text = std::move(s);
    return c;
  }
  static Cell Number(double v) {
    Cell c;
    c.kind = kText;
    c.text = ShortestFixed(v);
    c.has_number = true;
    c.number = v;
    return c;
  }
  static Cell Truth(bool b) {
    Cell c;
    c.kind = kTruth;
    c.truth = b;
    return c;
  }
  static Cell Vertex(size_t v) {
    Cell c;
    c.kind = kVertex;
    c.vertex = v;
    return c;
  }

  std::string Identity() const {
    switch (kind) {
      case kMissing: return "missing";
      case kText: return "text:" + text;
      case kTruth: return truth ? "truth:1" : "truth:0";
      case kVertex: return "vertex:" + std::to_string(vertex);
    }
    return "";
  }
};

using Row = std::map<std::string, Cell>;

class Oracle {
 public:
  Oracle(const Query& q, const KnowledgeGraph& g) : q_(q), g_(g) {}

  AnswerSet Run() {
    if (FindUnboundVariable(q_)) throw std::runtime_error("unbound variable");
    std::vector<Row> rows = Assignments();
    if (q_.with) rows = With(rows);
    return Return(rows);
  }

 private:
  // Node slots in first-appearance order: each named variable once, each
  // anonymous node on its own.
  struct Slots {
    std::vector<std::string> names;                 // "" for anonymous
    std::vector<std::vector<size_t>> node_slot;     // per pattern, per node
    std::vector<std::pair<size_t, size_t>> rels;    // (pattern, index)
  };

  Slots MakeSlots() const {
    Slots s;
    for (const PathPattern& p : q_.patterns) {
      std::vector<size_t> here;
      for (const NodePattern& n : p.nodes) {
        size_t found = s.names.size();
        if (!n.variable.empty()) {
          for (size_t i = 0; i < s.names.size(); ++i) {
            if (s.names[i] == n.variable) found = i;
          }
        }
        if (found == s.names.size()) s.names.push_back(n.variable);
        here.push_back(found);
      }
      s.node_slot.push_back(here);
    }
    for (size_t p = 0; p < q_.patterns.size(); ++p) {
      for (size_t i = 0; i < q_.patterns[p].rels.size(); ++i) s.rels.push_back({p, i});
    }
    return s;
  }

  std::vector<Row> Assignments() const {
    Slots s = MakeSlots();
    size_t n = g_.node_count();
    size_t m = g_.edges().size();
    std::vector<Row> rows;
    std::vector<size_t> nodes(s.names.size(), 0);
    std::vector<size_t> edges(s.rels.size(), 0);

    std::function<void(size_t)> pick_edges;
    pick_edges = [&](size_t k) {
      if (k == edges.size()) {
        for (size_t a = 0; a < edges.size(); ++a) {
          for (size_t b = a + 1; b < edges.size(); ++b) {
            if (edges[a] == edges[b]) return;
          }
        }
        Row row;
        for (size_t i = 0; i < s.names.size(); ++i) {
          if (!s.names[i].empty()) row[s.names[i]] = Cell::Vertex(nodes[i]);
        }
        if (q_.where && !Holds(*q_.where, row)) return;
        rows.push_back(std::move(row));
        return;
      }
      auto [p, i] = s.rels[k];
      const RelPattern& rel = q_.patterns[p].rels[i];
      size_t left = nodes[s.node_slot[p][i]];
      size_t right = nodes[s.node_slot[p][i + 1]];
      for (size_t e = 0; e < m; ++e) {
        const Edge& edge = g_.edges()[e];
        if (edge.relation != rel.type) continue;
        const std::string& a = g_.nodes()[left].name;
        const std::string& b = g_.nodes()[right].name;
        bool forward = edge.src == a && edge.dst == b;
        bool backward = edge.src == b && edge.dst == a;
        bool ok = rel.direction == Direction::kRight  ? forward
                  : rel.direction == Direction::kLeft ? backward
                                                      : (forward || backward);
        if (!ok) continue;
        edges[k] = e;
        pick_edges(k + 1);
      }
    };

    std::function<void(size_t)> pick_nodes;
    pick_nodes = [&](size_t k) {
      if (k == nodes.size()) {
        for (size_t p = 0; p < q_.patterns.size(); ++p) {
          for (size_t i = 0; i < q_.patterns[p].nodes.size(); ++i) {
            const auto& tag = q_.patterns[p].nodes[i].tag;
            if (tag && !g_.nodes()[nodes[s.node_slot[p][i]]].tags.contains(*tag)) return;
          }
        }
        pick_edges(0);
        return;
      }
      for (size_t v = 0; v < n; ++v) {
        nodes[k] = v;
        pick_nodes(k + 1);
      }
    };
    pick_nodes(0);
    return rows;
  }

  Cell Get(const Row& row, const std::string& name) const {
    auto it = row.find(name);
    if (it == row.end()) throw std::runtime_error("unbound " + name);
    return it->second;
  }

  Cell Prop(const Row& row, const PropertyRef& p) const {
    Cell target = Get(row, p.variable);
    if (target.kind != Cell::kVertex) return {};
    const Node& node = g_.nodes()[target.vertex];
    if (p.property == "name") return Cell::Text(node.name);
    auto it = node.attributes.find(p.property);
    if (it == node.attributes.end()) return {};
    return Cell::Text(it->second.raw);
  }

  Cell Side(const Row& row, const Operand& o) const {
    if (const auto* p = std::get_if<PropertyRef>(&o)) return Prop(row, *p);
    const Literal& l = std::get<Literal>(o);
    return l.is_number() ? Cell::Number(l.number()) : Cell::Text(l.text());
  }

  bool Check(const Comparison& c, const Row& row) const {
    Cell a = Side(row, c.lhs);
    Cell b = Side(row, c.rhs);
    if (a.kind == Cell::kMissing || b.kind == Cell::kMissing) return false;
    bool lt, gt;
    if (a.has_number && b.has_number) {
      lt = a.number < b.number;
      gt = b.number < a.number;
    } else {
      lt = a.text < b.text;
      gt = b.text < a.text;
    }
    switch (c.op) {
      case CompareOp::kEq: return !lt && !gt;
      case CompareOp::kNe: return lt || gt;
      case CompareOp::kLt: return lt;
      case CompareOp::kGt: return gt;
      case CompareOp::kLe: return !gt;
      case CompareOp::kGe: return !lt;
    }
    return false;
  }

  bool Holds(const BoolExpr& e, const Row& row) const {
    if (e.kind == BoolExpr::Kind::kCompare) return Check(e.comparison, row);
    if (e.kind == BoolExpr::Kind::kNot) return !Holds(e.children[0], row);
    bool is_and = e.kind == BoolExpr::Kind::kAnd;
    for (const BoolExpr& c : e.children) {
      bool v = Holds(c, row);
      if (is_and && !v) return false;
      if (!is_and && v) return true;
    }
    return is_and;
  }

  Cell Scalar(const Expr& e, const Row& row) const {
    if (const auto* v = std::get_if<VariableRef>(&e)) return Get(row, v->name);
    if (const auto* p = std::get_if<PropertyRef>(&e)) return Prop(row, *p);
    if (const auto* c = std::get_if<Comparison>(&e)) return Cell::Truth(Check(*c, row));
    throw std::runtime_error("aggregate in scalar position");
  }

  // Sort class: numbers, text, truth values, vertices, missing.
  int Class(const Cell& c) const {
    switch (c.kind) {
      case Cell::kText: return c.has_number ? 0 : 1;
      case Cell::kTruth: return 2;
      case Cell::kVertex: return 3;
      case Cell::kMissing: return 4;
    }
    return 4;
  }

  bool Less(const Cell& a, const Cell& b) const {
    int ca = Class(a), cb = Class(b);
    if (ca != cb) return ca < cb;
    switch (ca) {
      case 0: return a.number < b.number;
      case 1: return a.text < b.text;
      case 2: return !a.truth && b.truth;
      case 3: return g_.nodes()[a.vertex].name < g_.nodes()[b.vertex].name;
    }
    return false;
  }

  Cell Fold(const Aggregate& agg, const std::vector<const Row*>& group) const {
    if (std::holds_alternative<std::monostate>(agg.argument)) {
      return Cell::Number(static_cast<double>(group.size()));
    }
    std::vector<Cell> cells;
    std::set<std::string> seen;
    for (const Row* row : group) {
      Cell c = std::holds_alternative<VariableRef>(agg.argument)
                   ? Get(*row, std::get<VariableRef>(agg.argument).name)
                   : Prop(*row, std::get<PropertyRef>(agg.argument));
      if (c.kind == Cell::kMissing) continue;
      if (agg.distinct && !seen.insert(c.Identity()).second) continue;
      cells.push_back(c);
    }
    if (agg.fn == AggregateFn::kCount) return Cell::Number(static_cast<double>(cells.size()));
    if (agg.fn == AggregateFn::kMin || agg.fn == AggregateFn::kMax) {
      if (cells.empty()) return {};
      Cell best = cells[0];
      for (const Cell& c : cells) {
        if (agg.fn == AggregateFn::kMin ? Less(c, best) : Less(best, c)) best = c;
      }
      return best;
    }
    double total = 0;
    int count = 0;
    for (const Cell& c : cells) {
      if (c.kind == Cell::kText && c.has_number) {
        total += c.number;
        ++count;
      }
    }
    if (count == 0) return {};
    return Cell::Number(agg.fn == AggregateFn::kSum ? total : total / count);
  }

  struct Out {
    std::vector<Cell> cells;
    std::vector<const Row*> group;
  };

  std::vector<Out> Project(const std::vector<Row>& rows,
                           const std::vector<ProjectionItem>& items) const {
    std::vector<size_t> agg_items, key_items;
    for (size_t i = 0; i < items.size(); ++i) {
      (IsAggregate(items[i].expr) ? agg_items : key_items).push_back(i);
    }
    std::vector<Out> out;
    if (agg_items.empty()) {
      for (const Row& row : rows) {
        Out o;
        for (const ProjectionItem& it : items) o.cells.push_back(Scalar(it.expr, row));
        o.group = {&row};
        out.push_back(o);
      }
      return out;
    }
    if (key_items.empty()) {
      Out o;
      for (const Row& row : rows) o.group.push_back(&row);
      out.push_back(o);
    } else {
      std::vector<std::string> keys;
      for (const Row& row : rows) {
        std::string key;
        std::vector<Cell> cells(items.size());
        for (size_t i : key_items) {
          cells[i] = Scalar(items[i].expr, row);
          key += cells[i].Identity() + "|";
        }
        size_t at = 0;
        while (at < keys.size() && keys[at] != key) ++at;
        if (at == keys.size()) {
          keys.push_back(key);
          out.push_back(Out{cells, {}});
        }
        out[at].group.push_back(&row);
      }
    }
    for (Out& o : out) {
      o.cells.resize(items.size());
      for (size_t i : agg_items) o.cells[i] = Fold(std::get<Aggregate>(items[i].expr), o.group);
    }
    return out;
  }

  std::vector<Row> With(const std::vector<Row>& rows) {
    with_source_ = rows;
    std::vector<Row> next;
    const auto& items = q_.with->items;
    for (const Out& o : Project(with_source_, items)) {
      Row row;
      for (size_t i = 0; i < items.size(); ++i) {
        std::string name = items[i].alias.empty() ? std::get<VariableRef>(items[i].expr).name
                                                  : items[i].alias;
        row[name] = o.cells[i];
      }
      next.push_back(row);
    }
    return next;
  }

  Cell SortKey(const Out& o) const {
    const OrderBy& ob = *q_.ret.order_by;
    if (const auto* agg = std::get_if<Aggregate>(&ob.expr)) return Fold(*agg, o.group);
    const auto& items = q_.ret.items;
    for (size_t i = 0; i < items.size(); ++i) {
      if (items[i].expr == ob.expr) return o.cells[i];
      const auto* v = std::get_if<VariableRef>(&ob.expr);
      if (v && !items[i].alias.empty() && v->name == items[i].alias) return o.cells[i];
    }
    if (o.group.empty()) return {};
    return Scalar(ob.expr, *o.group[0]);
  }

  AnswerSet Return(const std::vector<Row>& rows) const {
    std::vector<Out> outs = Project(rows, q_.ret.items);
    if (q_.ret.distinct) {
      std::vector<Out> kept;
      std::set<std::string> seen;
      for (const Out& o : outs) {
        std::string key;
        for (const Cell& c : o.cells) key += c.Identity() + "|";
        if (seen.insert(key).second) kept.push_back(o);
      }
      outs = kept;
    }
    if (q_.ret.order_by) {
      // Insertion sort keeps equal keys in their original order.
      bool desc = q_.ret.order_by->descending;
      std::vector<std::pair<Cell, Out>> keyed;
      for (const Out& o : outs) keyed.push_back({SortKey(o), o});
      for (size_t i = 1; i < keyed.size(); ++i) {
        for (size_t j = i; j > 0; --j) {
          const Cell& prev = keyed[j - 1].first;
          const Cell& cur = keyed[j].first;
          bool before = desc ? Less(prev, cur) : Less(cur, prev);
          if (!before) break;
          std::swap(keyed[j - 1], keyed[j]);
        }
      }
      outs.clear();
      for (auto& [key, o] : keyed) outs.push_back(o);
    }
    if (q_.ret.limit && outs.size() > static_cast<size_t>(*q_.ret.limit)) {
      outs.resize(static_cast<size_t>(*q_.ret.limit));
    }
    AnswerSet answers;
    for (const Out& o : outs) {
      for (const Cell& c : o.cells) {
        switch (c.kind) {
          case Cell::kMissing: break;
          case Cell::kText: answers.insert(c.text); break;
          case Cell::kTruth: answers.insert(c.truth ? "True" : "False"); break;
          case Cell::kVertex: answers.insert(g_.nodes()[c.vertex].name); break;
        }
      }
    }
    return answers;
  }

  const Query& q_;
  const KnowledgeGraph& g_;
  std::vector<Row> with_source_;
};

}  // namespace

AnswerSet OracleExecute(const Query& query, const KnowledgeGraph& graph) {
  return Oracle(query, graph).Run();
}

}  // namespace kbqa::testing
