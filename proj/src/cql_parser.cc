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

#include "kbqa/cql_parser.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <utility>

namespace kbqa {
namespace cql {

namespace {

constexpr std::array<std::string_view, 21> kReserved = {
    "MATCH", "WHERE", "WITH",     "RETURN", "ORDER",  "BY",     "LIMIT",
    "AND",   "OR",    "NOT",      "AS",     "ASC",    "DESC",   "DISTINCT",
    "XOR",   "OPTIONAL", "UNWIND", "CREATE", "MERGE", "DELETE", "SKIP"};

constexpr std::array<std::string_view, 8> kUnsupportedClauses = {
    "OPTIONAL", "UNWIND", "CREATE", "MERGE", "DELETE", "SET", "CALL", "SKIP"};

// Words that may directly follow a string literal.
constexpr std::array<std::string_view, 12> kAfterLiteral = {
    "AND", "OR",    "XOR",  "NOT", "RETURN", "WITH",
    "ORDER", "LIMIT", "WHERE", "AS", "ASC",  "DESC"};

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool IsWordByte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Query ParseQuery() {
    Query query;
    SkipSpace();
    RejectUnsupportedClause();
    ExpectKeyword("MATCH");
    query.patterns.push_back(ParsePattern());
    while (AcceptChar(',')) query.patterns.push_back(ParsePattern());
    if (AcceptKeyword("WHERE")) query.where = ParseOr();
    if (AcceptKeyword("WITH")) query.with = ParseWith();
    RejectUnsupportedClause();
    ExpectKeyword("RETURN");
    query.ret = ParseReturn();
    AcceptChar(';');
    SkipSpace();
    if (pos_ != text_.size()) {
      RejectUnsupportedClause();
      Fail("unexpected trailing input");
    }
    return query;
  }

 private:
  // ---- Lexical helpers ----

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void Expected(std::string token) {
    if (expected_pos_ != pos_) {
      expected_pos_ = pos_;
      expected_.clear();
    }
    expected_.insert(std::move(token));
  }

  [[noreturn]] void Fail(const std::string& detail) {
    std::vector<std::string> expected;
    if (expected_pos_ == pos_) expected.assign(expected_.begin(), expected_.end());
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  bool AcceptChar(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    Expected(std::string(1, c));
    return false;
  }

  void ExpectChar(char c) {
    if (!AcceptChar(c)) Fail(std::string("expected '") + c + "'");
  }

  // ASCII word at the cursor, without consuming it.
  std::string_view PeekWord() {
    SkipSpace();
    size_t end = pos_;
    while (end < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    if (end < text_.size() && IsWordByte(text_[end])) return {};
    return text_.substr(pos_, end - pos_);
  }

  bool PeekKeyword(std::string_view keyword) {
    return EqualsIgnoreCase(PeekWord(), keyword);
  }

  bool AcceptKeyword(std::string_view keyword) {
    if (PeekKeyword(keyword)) {
      pos_ += keyword.size();
      return true;
    }
    Expected(std::string(keyword));
    return false;
  }

  void ExpectKeyword(std::string_view keyword) {
    if (!AcceptKeyword(keyword)) Fail("expected " + std::string(keyword));
  }

  void RejectUnsupportedClause() {
    std::string_view word = PeekWord();
    for (std::string_view clause : kUnsupportedClauses) {
      if (EqualsIgnoreCase(word, clause)) {
        Fail("unsupported clause " + std::string(clause));
      }
    }
  }

  static bool IsReserved(std::string_view word) {
    return std::any_of(kReserved.begin(), kReserved.end(),
                       [&](std::string_view r) { return EqualsIgnoreCase(word, r); });
  }

  // Bare word or backtick-quoted name. Reserved words are only accepted as
  // bare identifiers when `allow_reserved` is set (property names).
  std::optional<std::string> AcceptIdentifier(bool allow_reserved = false) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == '`') {
      size_t start = pos_;
      std::string name;
      size_t i = pos_ + 1;
      while (true) {
        if (i >= text_.size()) {
          pos_ = text_.size();
          Expected("`");
          Fail("unterminated quoted identifier starting at " +
               std::to_string(start));
        }
        if (text_[i] == '`') {
          if (i + 1 < text_.size() && text_[i + 1] == '`') {
            name.push_back('`');
            i += 2;
            continue;
          }
          break;
        }
        name.push_back(text_[i]);
        ++i;
      }
      if (name.empty()) Fail("empty quoted identifier");
      pos_ = i + 1;
      return name;
    }
    size_t end = pos_;
    while (end < text_.size() && IsWordByte(text_[end])) ++end;
    if (end == pos_ || IsDigit(text_[pos_])) {
      Expected("identifier");
      return std::nullopt;
    }
    std::string_view word = text_.substr(pos_, end - pos_);
    if (!allow_reserved && IsReserved(word)) {
      Expected("identifier");
      return std::nullopt;
    }
    pos_ = end;
    return std::string(word);
  }

  std::string ExpectIdentifier(bool allow_reserved = false) {
    auto name = AcceptIdentifier(allow_reserved);
    if (!name) Fail("expected identifier");
    return *name;
  }

  // True when a closing quote at `at` (exclusive) can end a literal.
  bool EndsLiteral(size_t at) const {
    while (at < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[at]))) {
      ++at;
    }
    if (at >= text_.size()) return true;
    char c = text_[at];
    if (std::string_view(")],;=<>!}").find(c) != std::string_view::npos) {
      return true;
    }
    size_t end = at;
    while (end < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    if (end == at || (end < text_.size() && IsWordByte(text_[end]))) return false;
    std::string_view word = text_.substr(at, end - at);
    return std::any_of(kAfterLiteral.begin(), kAfterLiteral.end(),
                       [&](std::string_view k) { return EqualsIgnoreCase(word, k); });
  }

  std::string ParseString() {
    char quote = text_[pos_];
    size_t start = pos_;
    std::string value;
    size_t i = pos_ + 1;
    while (true) {
      if (i >= text_.size()) {
        pos_ = text_.size();
        Expected(std::string(1, quote));
        Fail("unterminated string literal starting at " + std::to_string(start));
      }
      char c = text_[i];
      if (c == '\\' && i + 1 < text_.size()) {
        char next = text_[i + 1];
        switch (next) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          default: value.push_back(next); break;
        }
        i += 2;
        continue;
      }
      if (c == quote && EndsLiteral(i + 1)) break;
      value.push_back(c);
      ++i;
    }
    pos_ = i + 1;
    return value;
  }

  std::optional<Literal> AcceptLiteral() {
    SkipSpace();
    if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '\'')) {
      return Literal{ParseString()};
    }
    size_t i = pos_;
    if (i < text_.size() && text_[i] == '-') ++i;
    if (i < text_.size() && IsDigit(text_[i])) {
      while (i < text_.size() && IsDigit(text_[i])) ++i;
      if (i + 1 < text_.size() && text_[i] == '.' && IsDigit(text_[i + 1])) {
        ++i;
        while (i < text_.size() && IsDigit(text_[i])) ++i;
      }
      if (i < text_.size() && IsWordByte(text_[i])) {
        Expected("literal");
        return std::nullopt;
      }
      double value = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + i, value);
      if (ec != std::errc() || ptr != text_.data() + i) Fail("bad number");
      pos_ = i;
      return Literal{value};
    }
    Expected("literal");
    return std::nullopt;
  }

  std::optional<CompareOp> AcceptCompareOp() {
    SkipSpace();
    auto rest = text_.substr(pos_);
    struct Op {
      std::string_view token;
      CompareOp op;
    };
    static constexpr Op kOps[] = {
        {"<>", CompareOp::kNe}, {"!=", CompareOp::kNe}, {"<=", CompareOp::kLe},
        {">=", CompareOp::kGe}, {"=", CompareOp::kEq},  {"<", CompareOp::kLt},
        {">", CompareOp::kGt}};
    for (const Op& op : kOps) {
      if (rest.starts_with(op.token)) {
        pos_ += op.token.size();
        return op.op;
      }
    }
    Expected("comparison operator");
    return std::nullopt;
  }

  // ---- Patterns ----

  NodePattern ParseNode() {
    NodePattern node;
    ExpectChar('(');
    if (auto var = AcceptIdentifier()) node.variable = std::move(*var);
    if (AcceptChar(':')) node.tag = ExpectIdentifier(true);
    ExpectChar(')');
    return node;
  }

  RelPattern ParseRelBody() {
    RelPattern rel;
    ExpectChar('[');
    if (auto var = AcceptIdentifier()) rel.variable = std::move(*var);
    ExpectChar(':');
    rel.type = ExpectIdentifier(true);
    ExpectChar(']');
    ExpectChar('-');
    return rel;
  }

  PathPattern ParsePattern() {
    PathPattern pattern;
    pattern.nodes.push_back(ParseNode());
    while (true) {
      SkipSpace();
      size_t segment_start = pos_;
      RelPattern rel;
      if (AcceptChar('<')) {
        ExpectChar('-');
        rel = ParseRelBody();
        rel.direction = Direction::kLeft;
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == '>') {
          Fail("relationship cannot point both ways");
        }
      } else if (AcceptChar('-')) {
        rel = ParseRelBody();
        rel.direction = AcceptChar('>') ? Direction::kRight : Direction::kBoth;
      } else {
        break;
      }
      if (pattern.rels.size() == kMaxHops) {
        pos_ = segment_start;
        Fail("pattern exceeds two relationship hops");
      }
      pattern.rels.push_back(std::move(rel));
      pattern.nodes.push_back(ParseNode());
    }
    return pattern;
  }

  // ---- Boolean expressions ----

  Operand ParseOperand() {
    if (auto literal = AcceptLiteral()) return *literal;
    auto var = AcceptIdentifier();
    if (!var) Fail("expected property access or literal");
    ExpectChar('.');
    return PropertyRef{std::move(*var), ExpectIdentifier(true)};
  }

  Comparison ParseComparison() {
    Comparison comparison;
    comparison.lhs = ParseOperand();
    auto op = AcceptCompareOp();
    if (!op) Fail("expected comparison operator");
    comparison.op = *op;
    comparison.rhs = ParseOperand();
    return comparison;
  }

  BoolExpr ParseOr() {
    std::vector<BoolExpr> children;
    children.push_back(ParseAnd());
    while (AcceptKeyword("OR")) children.push_back(ParseAnd());
    if (children.size() == 1) return std::move(children.front());
    return BoolExpr::Or(std::move(children));
  }

  BoolExpr ParseAnd() {
    std::vector<BoolExpr> children;
    children.push_back(ParseNot());
    while (AcceptKeyword("AND")) children.push_back(ParseNot());
    if (children.size() == 1) return std::move(children.front());
    return BoolExpr::And(std::move(children));
  }

  BoolExpr ParseNot() {
    if (AcceptKeyword("NOT")) return BoolExpr::Not(ParseNot());
    if (AcceptChar('(')) {
      BoolExpr inner = ParseOr();
      ExpectChar(')');
      return inner;
    }
    return BoolExpr::Compare(ParseComparison());
  }

  // ---- Projections ----

  std::optional<AggregateFn> PeekAggregate() {
    static constexpr std::pair<std::string_view, AggregateFn> kFns[] = {
        {"count", AggregateFn::kCount}, {"min", AggregateFn::kMin},
        {"max", AggregateFn::kMax},     {"avg", AggregateFn::kAvg},
        {"sum", AggregateFn::kSum}};
    std::string_view word = PeekWord();
    for (const auto& [name, fn] : kFns) {
      if (!EqualsIgnoreCase(word, name)) continue;
      size_t after = pos_ + word.size();
      while (after < text_.size() &&
             std::isspace(static_cast<unsigned char>(text_[after]))) {
        ++after;
      }
      if (after < text_.size() && text_[after] == '(') return fn;
    }
    return std::nullopt;
  }

  Aggregate ParseAggregate(AggregateFn fn) {
    Aggregate aggregate;
    aggregate.fn = fn;
    pos_ += PeekWord().size();
    ExpectChar('(');
    aggregate.distinct = AcceptKeyword("DISTINCT");
    if (AcceptChar('*')) {
      if (fn != AggregateFn::kCount || aggregate.distinct) {
        Fail("'*' is only valid in count(*)");
      }
    } else {
      std::string var = ExpectIdentifier();
      if (AcceptChar('.')) {
        aggregate.argument = PropertyRef{std::move(var), ExpectIdentifier(true)};
      } else {
        aggregate.argument = VariableRef{std::move(var)};
      }
    }
    ExpectChar(')');
    return aggregate;
  }

  Expr ParseExpr() {
    if (auto fn = PeekAggregate()) return ParseAggregate(*fn);
    Operand lhs;
    bool plain_variable = false;
    std::string variable;
    if (auto literal = AcceptLiteral()) {
      lhs = *literal;
    } else {
      auto var = AcceptIdentifier();
      if (!var) Fail("expected expression");
      if (AcceptChar('.')) {
        lhs = PropertyRef{std::move(*var), ExpectIdentifier(true)};
      } else {
        plain_variable = true;
        variable = std::move(*var);
      }
    }
    size_t before_op = pos_;
    auto op = AcceptCompareOp();
    if (!op) {
      if (plain_variable) return VariableRef{std::move(variable)};
      if (const auto* prop = std::get_if<PropertyRef>(&lhs)) return *prop;
      Fail("literal must be part of a comparison");
    }
    if (plain_variable) {
      pos_ = before_op;
      Fail("comparison operand must be a property access or literal");
    }
    Comparison comparison{std::move(lhs), *op, ParseOperand()};
    return comparison;
  }

  ProjectionItem ParseItem() {
    ProjectionItem item;
    item.expr = ParseExpr();
    if (AcceptKeyword("AS")) item.alias = ExpectIdentifier();
    return item;
  }

  WithClause ParseWith() {
    WithClause with;
    do {
      size_t start = pos_;
      ProjectionItem item = ParseItem();
      if (item.alias.empty() && !std::holds_alternative<VariableRef>(item.expr)) {
        pos_ = start;
        SkipSpace();
        Fail("WITH expressions other than variables need an alias");
      }
      with.items.push_back(std::move(item));
    } while (AcceptChar(','));
    return with;
  }

  ReturnClause ParseReturn() {
    ReturnClause ret;
    ret.distinct = AcceptKeyword("DISTINCT");
    do {
      ret.items.push_back(ParseItem());
    } while (AcceptChar(','));
    if (AcceptKeyword("ORDER")) {
      ExpectKeyword("BY");
      OrderBy order;
      order.expr = ParseExpr();
      if (AcceptKeyword("DESC") || AcceptKeyword("DESCENDING")) {
        order.descending = true;
      } else if (!AcceptKeyword("ASC")) {
        AcceptKeyword("ASCENDING");
      }
      ret.order_by = std::move(order);
    }
    if (AcceptKeyword("LIMIT")) {
      SkipSpace();
      size_t start = pos_;
      while (pos_ < text_.size() && IsDigit(text_[pos_])) ++pos_;
      if (start == pos_) {
        Expected("integer");
        Fail("expected LIMIT count");
      }
      int64_t limit = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, limit);
      if (ec != std::errc() || limit < 1) {
        pos_ = start;
        Fail("LIMIT must be a positive integer");
      }
      ret.limit = limit;
    }
    return ret;
  }

  std::string_view text_;
  size_t pos_ = 0;
  size_t expected_pos_ = static_cast<size_t>(-1);
  std::set<std::string> expected_;
};

std::string DescribeError(size_t offset, const std::vector<std::string>& expected,
                          const std::string& detail) {
  std::string message = "syntax error at offset " + std::to_string(offset) +
                        ": " + detail;
  if (!expected.empty()) {
    message += " (expected one of:";
    for (const std::string& token : expected) message += " " + token;
    message += ")";
  }
  return message;
}

}  // namespace

SyntaxError::SyntaxError(size_t offset, std::vector<std::string> expected,
                         const std::string& detail)
    : Error(DescribeError(offset, expected, detail)),
      offset_(offset),
      expected_(std::move(expected)) {}

Query Parse(std::string_view text) { return Parser(text).ParseQuery(); }

}  // namespace cql
}  // namespace kbqa
