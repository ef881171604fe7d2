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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails or exceeds its time limit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kbqa/cql_analysis.h"
#include "kbqa/cql_executor.h"
#include "kbqa/cql_parser.h"
#include "kbqa/cql_postprocess.h"
#include "kbqa/cql_printer.h"
#include "kbqa/demo_selector.h"
#include "kbqa/ensemble_eval.h"
#include "kbqa/lexicon_matcher.h"
#include "kbqa/pipeline.h"
#include "oracles.h"
#include "random_cql.h"

namespace kbqa {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

fs::path FixtureDir() { return fs::path(KBQA_DATA_DIR) / "fixture"; }

// Collects the first failure of a criterion.
class Check {
 public:
  void That(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }
  std::string detail;

 private:
  std::string failure_;
};

struct Criterion {
  const char* name;
  std::chrono::milliseconds limit;
  std::function<void(Check&)> body;
};

bool Near(double a, double b) { return std::abs(a - b) <= 1e-12; }

void MetricExactness(Check& c) {
  struct Case {
    AnswerSet predicted, gold;
    double p, r, f1;
  };
  const std::vector<Case> cases = {
      {{"x"}, {"x"}, 1, 1, 1},
      {{"a", "b"}, {"a"}, 0.5, 1, 2.0 / 3.0},
      {{}, {"a"}, 0, 0, 0},
      {{"a"}, {}, 0, 0, 0},
      {{}, {}, 0, 0, 0},
      {{"a"}, {"b"}, 0, 0, 0},
      {{"a"}, {"a", "b", "c"}, 1, 1.0 / 3.0, 0.5},
      {{"a", "b", "c"}, {"b", "c", "d", "e"}, 2.0 / 3.0, 0.5, 4.0 / 7.0},
      {{"1", "2", "3", "4"}, {"4"}, 0.25, 1, 0.4},
      {{"True"}, {"False"}, 0, 0, 0},
  };
  for (size_t i = 0; i < cases.size(); ++i) {
    QuestionScore s = ScoreQuestion(cases[i].predicted, cases[i].gold);
    c.That(Near(s.precision, cases[i].p) && Near(s.recall, cases[i].r) && Near(s.f1, cases[i].f1),
           "case " + std::to_string(i));
  }
  std::map<int64_t, AnswerSet> gold{{1, {"a", "b", "c", "d"}}, {2, {"a"}}};
  std::map<int64_t, AnswerSet> pred{{1, {"a"}}, {2, {"a", "x", "y", "z"}}};
  EvalReport r = Evaluate(pred, gold);
  double harmonic = 2 * r.macro_precision * r.macro_recall / (r.macro_precision + r.macro_recall);
  c.That(Near(r.averaged_f1, 0.4), "asymmetric averaged F1");
  c.That(std::abs(r.averaged_f1 - harmonic) > 0.2, "averaged F1 equals harmonic mean");
  c.detail = "10 cases, averaged " + FormatNumber(r.averaged_f1) + " vs harmonic " +
             FormatNumber(harmonic);
}

void MatcherOracle(Check& c) {
  std::mt19937 rng(6);
  const std::vector<std::string> alphabet{"a", "b", "c", "无", "人", "机"};
  auto text = [&](int max_len) {
    std::string out;
    int len = std::uniform_int_distribution<int>(0, max_len)(rng);
    for (int i = 0; i < len; ++i) out += alphabet[rng() % alphabet.size()];
    return out;
  };
  for (int i = 0; i < 200; ++i) {
    std::set<std::string> terms;
    int n = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int t = 0; t < n; ++t) {
      std::string term = text(4);
      if (!term.empty()) terms.insert(term);
    }
    std::string t = text(30);
    c.That(ForwardMaxMatch(t, terms) == testing::OracleForward(t, terms), "forward: " + t);
    c.That(BackwardMaxMatch(t, terms) == testing::OracleBackward(t, terms), "backward: " + t);
    c.That(BidirectionalMaxMatch(t, terms) == testing::OracleBidirectional(t, terms),
           "bidirectional: " + t);
  }
  c.detail = "200 cases";
}

void KiSimCriterion(Check& c) {
  SimilarityWeights w;
  KeyInfo full{{"e"}, {"t"}, {"r"}, {"a"}, {"v"}, {1, 1, 1}};
  c.That(Near(KiSim(full, full, w), 13.6), "full agreement");
  std::mt19937 rng(9);
  const std::vector<std::string> vocab{"p", "q", "r"};
  auto random_info = [&] {
    KeyInfo k;
    for (TermList* list : {&k.entities, &k.tags, &k.relations, &k.attributes, &k.values}) {
      for (const auto& v : vocab) {
        if (rng() % 3 == 0) list->push_back(v);
      }
    }
    k.aux = {static_cast<int>(rng() % 4), static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
    return k;
  };
  for (int i = 0; i < 1000; ++i) {
    KeyInfo a = random_info(), b = random_info();
    double ab = KiSim(a, b, w);
    c.That(ab == KiSim(b, a, w), "symmetry");
    c.That(ab >= 0 && ab <= w.Total() + 1e-12, "bounds");
  }
  KnowledgeGraph graph =
      KnowledgeGraph::Load(FixtureDir() / "kb_nodes.jsonl", FixtureDir() / "kb_edges.jsonl");
  Lexicon lexicon = Lexicon::Load(FixtureDir() / "lexicon.json");
  KeyInfoExtractor extractor(lexicon, graph);
  std::vector<AnnotatedExample> rows;
  for (auto& ex : LoadExamplePool(FixtureDir() / "pool.jsonl", &extractor)) {
    if (ex.id >= 101 && ex.id <= 106) rows.push_back(std::move(ex));
  }
  c.That(rows.size() == 6, "six pool rows");
  KeyInfo target = extractor.Extract("最大飞行速度小于等于460的实体有几个？", {1, 0, 1});
  std::vector<int64_t> ranked = SelectDemonstrations(target, std::nullopt, rows, 6, w);
  std::set<int64_t> top(ranked.begin(), ranked.begin() + std::min<size_t>(3, ranked.size()));
  c.That(top == std::set<int64_t>{104, 105, 106}, "counting questions not in top 3");
  c.detail = "top 3 = " + std::to_string(ranked[0]) + "," + std::to_string(ranked[1]) + "," +
             std::to_string(ranked[2]);
}

const std::vector<std::string>& ExampleQueries() {
  static const std::vector<std::string> queries = {
      "MATCH (n) where n.name=\"M29式81毫米迫击炮\" or n.name=\"M1高射炮\" RETURN n.name ORDER BY "
      "n.`口径` asc limit 1",
      "MATCH (n), (m) where n.name=\"扫描鹰无人机\" and m.name=\"MQ-1\"捕食者\"无人机\" RETURN "
      "n.`交付数量` > m.`交付数量`",
      "MATCH (n)-[r:`产国`]->(m)-[r1:`军种涉及项目`]->(l) RETURN l.name",
  };
  return queries;
}

void RoundTrip(Check& c) {
  for (const std::string& text : ExampleQueries()) {
    cql::Query q = cql::Parse(text);
    c.That(cql::Parse(cql::Print(q)) == q, text);
  }
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    cql::Query q = testing::RandomQuery(rng, {4, 2, i % 2 == 1});
    std::string printed = cql::Print(q);
    try {
      c.That(cql::Parse(printed) == q, printed);
    } catch (const Error& e) {
      c.That(false, printed + ": " + e.what());
    }
  }
  c.detail = std::to_string(ExampleQueries().size()) + " example + 100 random queries";
}

void ExecutorOracle(Check& c) {
  std::mt19937_64 rng(4242);
  int aggregates = 0, ordered = 0, booleans = 0, missing = 0, total = 0;
  for (int i = 0; i < 600; ++i) {
    KnowledgeGraph g = testing::RandomGraph(rng);
    cql::Query q = testing::RandomQuery(rng);
    std::string printed = cql::Print(q);
    AnswerSet want = testing::OracleExecute(q, g);
    AnswerSet got = cql::Execute(q, g);
    c.That(got == want, printed);
    ++total;
    bool has_agg = false, has_bool = false;
    for (const auto* items : {&q.ret.items}) {
      for (const auto& item : *items) {
        has_agg |= cql::IsAggregate(item.expr);
        has_bool |= std::holds_alternative<cql::Comparison>(item.expr);
      }
    }
    if (q.with) {
      for (const auto& item : q.with->items) has_agg |= cql::IsAggregate(item.expr);
    }
    aggregates += has_agg;
    booleans += has_bool;
    ordered += q.ret.order_by && q.ret.limit;
    bool reads_missing = false;
    for (const Node& node : g.nodes()) reads_missing |= node.attributes.size() < 3;
    missing += reads_missing && (q.where.has_value() || has_bool);
  }
  c.That(aggregates > 0 && ordered > 0 && booleans > 0 && missing > 0, "coverage");
  c.detail = std::to_string(total) + " cases (" + std::to_string(aggregates) + " aggregate, " +
             std::to_string(ordered) + " order+limit, " + std::to_string(booleans) +
             " boolean, " + std::to_string(missing) + " sparse-attribute)";
}

void ReferenceAnswerSemantics(Check& c) {
  KnowledgeGraph g =
      KnowledgeGraph::Load(FixtureDir() / "kb_nodes.jsonl", FixtureDir() / "kb_edges.jsonl");
  c.That(cql::Execute(cql::Parse(ExampleQueries()[0]), g) == AnswerSet{"M29式81毫米迫击炮"},
         "mortar query");
  c.That(cql::Execute(cql::Parse(ExampleQueries()[1]), g) == AnswerSet{"False"},
         "delivery comparison");
}

void Postprocessing(Check& c) {
  KnowledgeGraph g =
      KnowledgeGraph::Load(FixtureDir() / "kb_nodes.jsonl", FixtureDir() / "kb_edges.jsonl");
  Lexicon lexicon = Lexicon::Load(FixtureDir() / "lexicon.json");
  using cql::Parse;
  c.That(cql::ReclassifyTags(Parse("MATCH (n:`扫描鹰无人机`) RETURN n.`交付数量`"), g, lexicon) ==
             Parse("MATCH (n) WHERE n.name = \"扫描鹰无人机\" RETURN n.`交付数量`"),
         "tag to entity");
  c.That(cql::RepairConditions(Parse("MATCH (n) WHERE n.x = 1 AND n.y = 2 RETURN n"), {0, 0, 1},
                               {}) == Parse("MATCH (n) WHERE n.x = 1 RETURN n"),
         "condition truncation");
  KeyInfo ki;
  ki.attributes = {"最大飞行速度"};
  ki.values = {"460"};
  c.That(cql::RepairConditions(Parse("MATCH (n) RETURN count(n)"), {1, 0, 1}, ki) ==
             Parse("MATCH (n) WHERE n.`最大飞行速度` = 460 RETURN count(n)"),
         "condition filling");
  c.That(cql::NormalizedSimilarity("最大飞行速", "最大飞行速度") >= 0.5, "similarity");
  c.That(cql::MapFuzzyNouns(Parse("MATCH (n) RETURN n.`最大飞行速`"), lexicon) ==
             Parse("MATCH (n) RETURN n.`最大飞行速度`"),
         "fuzzy restoration");

  std::mt19937_64 rng(55);
  for (int i = 0; i < 100; ++i) {
    KnowledgeGraph rg = testing::RandomGraph(rng);
    Lexicon rl;
    for (const Node& node : rg.nodes()) {
      if (rng() % 5) rl.entities.insert(node.name);
      rl.tags.insert(node.tags.begin(), node.tags.end());
    }
    for (const auto& r : rg.AllRelations()) {
      if (rng() % 5) rl.relations.insert(r);
    }
    for (const auto& a : rg.AllAttributes()) {
      if (rng() % 5) rl.attributes.insert(a);
    }
    AuxPrediction aux{static_cast<int>(rng() % 4), static_cast<int>(rng() % 3),
                      static_cast<int>(rng() % 3)};
    KeyInfo rki;
    rki.attributes = {"x", "z"};
    rki.values = {"2", "abc"};
    cql::Query q = testing::RandomQuery(rng);
    cql::Query once = cql::Postprocess(q, rg, rl, aux, rki);
    c.That(cql::Postprocess(once, rg, rl, aux, rki) == once, "idempotence: " + cql::Print(q));
  }
  c.detail = "4 targeted repairs + 100 random queries";
}

std::vector<QuestionOutcome> RunFixture(const fs::path& script) {
  PipelineConfig config = PipelineConfig::Load(FixtureDir() / "config.json");
  config.mock_script = script;
  PipelineResources res(config);
  return RunPipeline(res, LoadQuestions(FixtureDir() / "questions.jsonl"));
}

double AveragedF1(const std::vector<QuestionOutcome>& outcomes) {
  std::map<int64_t, AnswerSet> predicted;
  for (const auto& o : outcomes) predicted[o.id] = o.answers;
  return Evaluate(predicted, LoadAnswerFile(FixtureDir() / "gold.jsonl")).averaged_f1;
}

void EndToEnd(Check& c) {
  std::vector<QuestionOutcome> gold = RunFixture(FixtureDir() / "mock_gold.jsonl");
  std::vector<QuestionOutcome> corrupted = RunFixture(FixtureDir() / "mock_corrupted.jsonl");
  std::vector<QuestionOutcome> again = RunFixture(FixtureDir() / "mock_corrupted.jsonl");
  double gold_f1 = AveragedF1(gold);
  double corrupted_f1 = AveragedF1(corrupted);
  c.That(gold.size() == 20, "20 questions");
  c.That(gold_f1 == 1.0, "gold script F1");
  c.That(corrupted_f1 >= 0.9, "corrupted script F1");
  bool same = corrupted.size() == again.size();
  for (size_t i = 0; same && i < corrupted.size(); ++i) {
    same = corrupted[i].answers == again[i].answers &&
           corrupted[i].trace.dump() == again[i].trace.dump();
  }
  c.That(same, "repeat run differs");
  c.detail = "gold F1 " + FormatNumber(gold_f1) + ", corrupted F1 " + FormatNumber(corrupted_f1);
}

void Voting(Check& c) {
  c.That(Vote({{"a"}, {"a"}, {"b"}}) == AnswerSet{"a"}, "plurality");
  c.That(Vote({{}, {"a"}}) == AnswerSet{"a"}, "empty exclusion");
  c.That(Vote({{"a"}, {"b"}}) == AnswerSet{"a"}, "tie");
  std::mt19937 rng(77);
  const std::vector<AnswerSet> options{{}, {"a"}, {"b"}, {"a", "b"}, {"1"}, {"True"}};
  for (int i = 0; i < 1000; ++i) {
    std::vector<AnswerSet> ballots(1 + rng() % 8);
    for (auto& b : ballots) b = options[rng() % options.size()];
    bool all_empty = true;
    for (const auto& b : ballots) all_empty &= b.empty();
    int best = 0;
    AnswerSet expected;
    for (const AnswerSet& candidate : ballots) {
      if (candidate.empty() && !all_empty) continue;
      int count = 0;
      for (const AnswerSet& b : ballots) count += b == candidate;
      if (count > best) {
        best = count;
        expected = candidate;
      }
    }
    c.That(Vote(ballots) == expected, "ballot list " + std::to_string(i));
  }
  c.detail = "1000 ballot lists";
}

int Main() {
  const std::vector<Criterion> criteria = {
      {"metric exactness", 1000ms, MetricExactness},
      {"matcher oracle", 5000ms, MatcherOracle},
      {"KI-Sim", 1000ms, KiSimCriterion},
      {"CQL round trip", 5000ms, RoundTrip},
      {"executor oracle", 30000ms, ExecutorOracle},
      {"mortar and comparison semantics", 1000ms, ReferenceAnswerSemantics},
      {"post-processing", 5000ms, Postprocessing},
      {"end-to-end hermetic run", 10000ms, EndToEnd},
      {"voting", 2000ms, Voting},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.That(false, std::string("exception: ") + e.what());
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    bool in_time = elapsed <= criterion.limit;
    bool pass = check.ok() && in_time;
    failures += !pass;
    std::string note = !check.ok() ? "failed: " + check.failure()
                       : !in_time  ? "too slow"
                                   : check.detail;
    std::printf("%s  %-32s %6lld ms (limit %lld ms)  %s\n", pass ? "PASS" : "FAIL",
                criterion.name, static_cast<long long>(elapsed.count()),
                static_cast<long long>(criterion.limit.count()), note.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace kbqa

int main() { return kbqa::Main(); }
