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

#include "cli.h"

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kbqa/cql_analysis.h"
#include "kbqa/cql_parser.h"
#include "kbqa/ensemble_eval.h"
#include "kbqa/pipeline.h"

namespace kbqa::cli {

namespace fs = std::filesystem;

namespace {

// Usage or input problem that maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

template <typename T>
std::map<int64_t, T> LoadById(const fs::path& path, const char* field,
                              T (*convert)(const Json&)) {
  std::map<int64_t, T> out;
  ForEachJsonLine(path, [&](const Json& record, int) {
    int64_t id = record.at("id").get<int64_t>();
    if (!out.emplace(id, convert(record.at(field))).second) {
      throw Error("duplicate id " + std::to_string(id) + " in " + path.string());
    }
  });
  return out;
}

std::vector<int64_t> IdList(const Json& json) { return json.get<std::vector<int64_t>>(); }

template <typename Map>
const typename Map::mapped_type& Lookup(const Map& map, int64_t id, const fs::path& path) {
  auto it = map.find(id);
  if (it == map.end()) {
    throw UsageError("no entry for id " + std::to_string(id) + " in " + path.string());
  }
  return it->second;
}

void WriteLines(const fs::path& path, const std::vector<Json>& lines) {
  std::string text;
  for (const Json& line : lines) {
    text += line.dump();
    text += '\n';
  }
  WriteFile(path, text);
}

struct Options {
  std::string config;
  std::string questions;
  std::string out;
  std::string nodes;
  std::string edges;
  std::string aux;
  std::string keyinfo;
  std::string demos;
  std::string prompts;
  std::string completions;
  std::string ballots;
  std::string predictions;
  std::string gold;
  std::string trace_dir;
  std::string cql;
  std::optional<int64_t> id;
  std::optional<int> n;
};

int BuildKb(const Options& o) {
  KnowledgeGraph graph = KnowledgeGraph::Load(o.nodes, o.edges);
  Json summary{{"nodes", graph.node_count()},
               {"edges", graph.edge_count()},
               {"tags", graph.tag_index().size()},
               {"relations", graph.AllRelations().size()},
               {"attributes", graph.AllAttributes().size()}};
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

int AuxCommand(const PipelineResources& res, const Options& o) {
  std::vector<Json> lines;
  for (const Question& q : LoadQuestions(o.questions)) {
    Json line = ToJson(PredictAux(res, q));
    line["id"] = q.id;
    lines.push_back(std::move(line));
  }
  WriteLines(o.out, lines);
  return kExitOk;
}

int KeyInfoCommand(const PipelineResources& res, const Options& o) {
  std::optional<FileAuxProvider> predictions;
  if (!o.aux.empty()) predictions = LoadPredictions(o.aux);
  std::vector<Json> lines;
  for (const Question& q : LoadQuestions(o.questions)) {
    AuxPrediction aux = predictions ? predictions->Predict(q.id, q.text, {}) : PredictAux(res, q);
    lines.push_back(Json{{"id", q.id}, {"key_info", ToJson(ExtractFor(res, q, aux))}});
  }
  WriteLines(o.out, lines);
  return kExitOk;
}

int SelectCommand(const PipelineResources& res, const Options& o) {
  auto key_infos = LoadById<KeyInfo>(o.keyinfo, "key_info", &KeyInfoFromJson);
  std::vector<Json> lines;
  for (const Question& q : LoadQuestions(o.questions)) {
    const KeyInfo& ki = Lookup(key_infos, q.id, o.keyinfo);
    lines.push_back(Json{{"id", q.id}, {"demo_ids", SelectFor(res, q, ki)}});
  }
  WriteLines(o.out, lines);
  return kExitOk;
}

int PromptCommand(const PipelineResources& res, const Options& o) {
  auto key_infos = LoadById<KeyInfo>(o.keyinfo, "key_info", &KeyInfoFromJson);
  auto demos = LoadById<std::vector<int64_t>>(o.demos, "demo_ids", &IdList);
  std::vector<Json> lines;
  for (const Question& q : LoadQuestions(o.questions)) {
    Prompt prompt = PromptFor(res, q, Lookup(key_infos, q.id, o.keyinfo),
                              Lookup(demos, q.id, o.demos));
    lines.push_back(Json{{"id", q.id},
                         {"digest", prompt.Digest()},
                         {"demo_ids", prompt.demo_ids},
                         {"system_text", prompt.system_text},
                         {"user_text", prompt.user_text}});
  }
  WriteLines(o.out, lines);
  return kExitOk;
}

int GenerateCommand(PipelineResources& res, const Options& o) {
  res.EnsureClient();
  int n = o.n.value_or(res.config().n);
  if (n < 1) throw UsageError("--n must be at least 1");
  std::vector<Json> lines;
  bool partial = false;
  ForEachJsonLine(o.prompts, [&](const Json& record, int) {
    Prompt prompt;
    prompt.question_id = record.at("id").get<int64_t>();
    prompt.system_text = record.at("system_text").get<std::string>();
    prompt.user_text = record.at("user_text").get<std::string>();
    for (int attempt = 0; attempt < n; ++attempt) {
      try {
        Completion c = res.client()->Complete(RequestFor(res.config(), prompt, attempt));
        lines.push_back(Json{{"question_id", *prompt.question_id},
                             {"attempt", attempt},
                             {"response", c.text}});
      } catch (const LlmError& e) {
        partial = true;
        std::cerr << "question " << *prompt.question_id << " attempt " << attempt << ": "
                  << e.what() << '\n';
      }
    }
  });
  WriteLines(o.out, lines);
  return partial ? kExitPartial : kExitOk;
}

Json AttemptLine(int64_t id, int attempt, const AttemptResult& r) {
  return Json{{"question_id", id},
              {"attempt", attempt},
              {"cql", r.repaired_cql ? Json(*r.repaired_cql) : Json(nullptr)},
              {"answers", r.ballot},
              {"error", r.error ? Json(*r.error) : Json(nullptr)}};
}

int AnswerCommand(const PipelineResources& res, const Options& o) {
  if (!o.cql.empty()) {
    KeyInfo ki;
    if (!o.keyinfo.empty()) {
      if (!o.id) throw UsageError("--keyinfo with --cql needs --id");
      auto key_infos = LoadById<KeyInfo>(o.keyinfo, "key_info", &KeyInfoFromJson);
      ki = Lookup(key_infos, *o.id, o.keyinfo);
    } else {
      // Without key information the repairs keep the query's own counts.
      try {
        ki.aux = cql::DeriveAux(cql::Parse(ExtractCql(o.cql)));
      } catch (const cql::SyntaxError&) {
        // Reported by AnswerCompletion below.
      }
    }
    AttemptResult r = AnswerCompletion(res, o.cql, ki);
    std::cout << AttemptLine(o.id.value_or(0), 0, r).dump() << '\n';
    return r.error ? kExitPartial : kExitOk;
  }
  if (o.completions.empty() || o.keyinfo.empty() || o.out.empty()) {
    throw UsageError("answer needs --cql, or --completions with --keyinfo and --out");
  }
  auto key_infos = LoadById<KeyInfo>(o.keyinfo, "key_info", &KeyInfoFromJson);
  std::vector<Json> lines;
  for (const auto& [key, response] : LoadMockScript(o.completions)) {
    const KeyInfo& ki = Lookup(key_infos, key.first, o.keyinfo);
    lines.push_back(AttemptLine(key.first, key.second, AnswerCompletion(res, response, ki)));
  }
  WriteLines(o.out, lines);
  return kExitOk;
}

int VoteCommand(const Options& o) {
  std::map<int64_t, std::map<int, AnswerSet>> grouped;
  ForEachJsonLine(o.ballots, [&](const Json& record, int) {
    grouped[record.at("question_id").get<int64_t>()][record.at("attempt").get<int>()] =
        record.at("answers").get<AnswerSet>();
  });
  std::string text;
  for (const auto& [id, by_attempt] : grouped) {
    std::vector<AnswerSet> ballots;
    for (const auto& [attempt, answers] : by_attempt) ballots.push_back(answers);
    text += FormatAnswerLine(id, Vote(ballots));
    text += '\n';
  }
  WriteFile(o.out, text);
  return kExitOk;
}

int EvalCommand(const Options& o) {
  EvalReport report = Evaluate(LoadAnswerFile(o.predictions), LoadAnswerFile(o.gold));
  Json per_question = Json::array();
  for (const QuestionScore& s : report.per_question) {
    per_question.push_back(
        Json{{"id", s.id}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}});
  }
  Json json{{"macro_precision", report.macro_precision},
            {"macro_recall", report.macro_recall},
            {"averaged_f1", report.averaged_f1},
            {"per_question", per_question},
            {"warnings", report.warnings}};
  for (const std::string& warning : report.warnings) std::cerr << "warning: " << warning << '\n';
  if (o.out.empty()) {
    std::cout << json.dump(2) << '\n';
  } else {
    WriteFile(o.out, json.dump(2) + "\n");
  }
  return kExitOk;
}

int RunCommand(PipelineResources& res, const Options& o) {
  std::vector<Question> questions = LoadQuestions(o.questions);
  std::vector<QuestionOutcome> outcomes = RunPipeline(res, questions);
  fs::path trace_dir = o.trace_dir.empty() ? fs::path(o.out).parent_path() / "traces"
                                           : fs::path(o.trace_dir);
  WriteOutcomes(outcomes, o.out, trace_dir);
  size_t failed = 0;
  for (const QuestionOutcome& outcome : outcomes) failed += outcome.provider_failed;
  if (failed > 0) {
    std::cerr << failed << " of " << outcomes.size() << " questions had provider failures\n";
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv) {
  CLI::App app{"Knowledge-base question answering through generated Cypher queries"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Pipeline config file")->required();
  };
  auto add_questions = [&](CLI::App* cmd) {
    cmd->add_option("--questions", o.questions, "Line-delimited {id, question}")->required();
  };
  auto add_out = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--out", o.out, "Output file");
    if (required) opt->required();
  };

  auto* build_kb = app.add_subcommand("build-kb", "Load and validate a knowledge base");
  build_kb->add_option("--nodes", o.nodes, "Node file")->required();
  build_kb->add_option("--edges", o.edges, "Edge file")->required();

  auto* aux = app.add_subcommand("aux", "Predict intent, relation and condition counts");
  add_config(aux);
  add_questions(aux);
  add_out(aux, true);

  auto* keyinfo = app.add_subcommand("keyinfo", "Extract key information per question");
  add_config(keyinfo);
  add_questions(keyinfo);
  keyinfo->add_option("--aux", o.aux, "Aux predictions from the aux subcommand");
  add_out(keyinfo, true);

  auto* select = app.add_subcommand("select", "Choose demonstrations by key-info similarity");
  add_config(select);
  add_questions(select);
  select->add_option("--keyinfo", o.keyinfo, "Output of keyinfo")->required();
  add_out(select, true);

  auto* prompt = app.add_subcommand("prompt", "Assemble prompts");
  add_config(prompt);
  add_questions(prompt);
  prompt->add_option("--keyinfo", o.keyinfo, "Output of keyinfo")->required();
  prompt->add_option("--demos", o.demos, "Output of select")->required();
  add_out(prompt, true);

  auto* generate = app.add_subcommand("generate", "Request completions for prompts");
  add_config(generate);
  generate->add_option("--prompts", o.prompts, "Output of prompt")->required();
  generate->add_option("--n", o.n, "Completions per prompt (default from config)");
  add_out(generate, true);

  auto* answer = app.add_subcommand("answer", "Parse, repair and execute CQL");
  add_config(answer);
  answer->add_option("--cql", o.cql, "A single query or completion text");
  answer->add_option("--id", o.id, "Question id for --cql");
  answer->add_option("--completions", o.completions, "Output of generate");
  answer->add_option("--keyinfo", o.keyinfo, "Output of keyinfo");
  add_out(answer, false);

  auto* vote = app.add_subcommand("vote", "Vote over per-attempt answers");
  vote->add_option("--ballots", o.ballots, "Output of answer")->required();
  add_out(vote, true);

  auto* eval = app.add_subcommand("eval", "Score predictions against gold answers");
  eval->add_option("--predictions", o.predictions, "Line-delimited {id, answers}")->required();
  eval->add_option("--gold", o.gold, "Line-delimited {id, answers}")->required();
  add_out(eval, false);

  auto* run = app.add_subcommand("run", "Run every stage end to end");
  add_config(run);
  add_questions(run);
  add_out(run, true);
  run->add_option("--trace-dir", o.trace_dir, "Trace directory (default: traces/ next to --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (build_kb->parsed()) return BuildKb(o);
    if (vote->parsed()) return VoteCommand(o);
    if (eval->parsed()) return EvalCommand(o);
    PipelineResources res(PipelineConfig::Load(o.config));
    if (aux->parsed()) return AuxCommand(res, o);
    if (keyinfo->parsed()) return KeyInfoCommand(res, o);
    if (select->parsed()) return SelectCommand(res, o);
    if (prompt->parsed()) return PromptCommand(res, o);
    if (generate->parsed()) return GenerateCommand(res, o);
    if (answer->parsed()) return AnswerCommand(res, o);
    if (run->parsed()) return RunCommand(res, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

int Run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return Run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kbqa::cli
