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

#include "kbqa/pipeline.h"

#include <atomic>
#include <cctype>
#include <thread>
#include <unordered_set>

#include "kbqa/cql_parser.h"
#include "kbqa/cql_postprocess.h"
#include "kbqa/cql_printer.h"
#include "kbqa/ensemble_eval.h"

namespace kbqa {

namespace fs = std::filesystem;

namespace {

const std::unordered_set<std::string> kConfigKeys = {
    "kb",      "lexicon", "example_pool", "templates", "aux", "provider",
    "weights", "k",       "n",            "parallelism", "seed"};

fs::path ResolvePath(const Json& value, const fs::path& base_dir) {
  fs::path path = value.get<std::string>();
  return path.is_relative() ? base_dir / path : path;
}

void RequireFile(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
}

}  // namespace

PipelineConfig PipelineConfig::FromJson(const Json& json, const fs::path& base_dir) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : json.items()) {
    if (!kConfigKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  PipelineConfig config;
  try {
    const Json& kb = json.at("kb");
    config.kb_nodes = ResolvePath(kb.at("nodes"), base_dir);
    config.kb_edges = ResolvePath(kb.at("edges"), base_dir);
    config.lexicon = ResolvePath(json.at("lexicon"), base_dir);
    config.example_pool = ResolvePath(json.at("example_pool"), base_dir);

    const Json& templates = json.at("templates");
    config.template_language = templates.value("language", "zh");
    config.cot_template = ResolvePath(templates.at("cot"), base_dir);
    config.prior_knowledge = ResolvePath(templates.at("prior"), base_dir);

    const Json& aux = json.at("aux");
    if (aux.contains("rules")) config.aux_rules = ResolvePath(aux.at("rules"), base_dir);
    if (aux.contains("predictions")) {
      config.aux_predictions = ResolvePath(aux.at("predictions"), base_dir);
    }

    const Json& provider = json.at("provider");
    config.provider = ParseProvider(provider.at("kind").get<std::string>());
    if (provider.contains("cache")) config.cache = ResolvePath(provider.at("cache"), base_dir);
    if (provider.contains("mock_script")) {
      config.mock_script = ResolvePath(provider.at("mock_script"), base_dir);
    }
    config.live.endpoint = provider.value("endpoint", config.live.endpoint);
    config.live.api_key_env = provider.value("api_key_env", config.live.api_key_env);
    config.live.max_retries = provider.value("max_retries", config.live.max_retries);
    config.model = provider.value("model", config.model);
    config.temperature = provider.value("temperature", config.temperature);

    if (json.contains("weights")) {
      config.weights = SimilarityWeights::FromJson(json.at("weights"));
    }
    config.k = json.value("k", config.k);
    config.n = json.value("n", config.n);
    config.parallelism = json.value("parallelism", config.parallelism);
    config.seed = json.value("seed", config.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  config.Validate();
  return config;
}

PipelineConfig PipelineConfig::Load(const fs::path& path) {
  Json json;
  try {
    json = Json::parse(ReadFile(path));
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return FromJson(json, path.parent_path());
}

void PipelineConfig::Validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (temperature < 0) throw ConfigError("temperature must be non-negative");
  if (template_language != "zh" && template_language != "en") {
    throw ConfigError("template language must be zh or en");
  }
  if (aux_rules.has_value() == aux_predictions.has_value()) {
    throw ConfigError("aux needs exactly one of 'rules' or 'predictions'");
  }
  try {
    weights.Validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  RequireFile(kb_nodes, "KB node file");
  RequireFile(kb_edges, "KB edge file");
  RequireFile(lexicon, "lexicon");
  RequireFile(example_pool, "example pool");
  RequireFile(cot_template, "CoT template");
  RequireFile(prior_knowledge, "prior knowledge");
  if (aux_rules) RequireFile(*aux_rules, "aux rule table");
  if (aux_predictions) RequireFile(*aux_predictions, "aux predictions");
  switch (provider) {
    case Provider::kMock:
      if (!mock_script) throw ConfigError("mock provider needs 'mock_script'");
      RequireFile(*mock_script, "mock script");
      break;
    case Provider::kReplay:
      if (!cache) throw ConfigError("replay provider needs 'cache'");
      RequireFile(*cache, "completion cache");
      break;
    case Provider::kLive:
      break;
  }
}

std::vector<Question> LoadQuestions(const fs::path& path) {
  std::vector<Question> questions;
  std::unordered_set<int64_t> seen;
  ForEachJsonLine(path, [&](const Json& record, int) {
    Question q{record.at("id").get<int64_t>(), record.at("question").get<std::string>()};
    if (!seen.insert(q.id).second) throw Error("duplicate question id " + std::to_string(q.id));
    questions.push_back(std::move(q));
  });
  return questions;
}

PipelineResources::PipelineResources(const PipelineConfig& config) : config_(config) {
  config_.Validate();
  try {
    graph_ = KnowledgeGraph::Load(config_.kb_nodes, config_.kb_edges);
    lexicon_ = Lexicon::Load(config_.lexicon);
    extractor_ = std::make_unique<KeyInfoExtractor>(lexicon_, graph_);
    pool_ = LoadExamplePool(config_.example_pool, extractor_.get());
    for (size_t i = 0; i < pool_.size(); ++i) pool_index_[pool_[i].id] = i;
    template_ = CotTemplate::Load(config_.cot_template, config_.template_language);
    // Render once so a broken template fails before any question runs.
    RenderCotBlock("", KeyInfo{}, AuxPrediction{}, std::nullopt, template_);
    prior_ = ReadFile(config_.prior_knowledge);
    if (config_.aux_rules) {
      aux_ = std::make_unique<HeuristicAuxProvider>(LoadRuleTable(*config_.aux_rules));
    } else {
      aux_ = std::make_unique<FileAuxProvider>(LoadPredictions(*config_.aux_predictions));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

const AnnotatedExample& PipelineResources::example(int64_t id) const {
  auto it = pool_index_.find(id);
  if (it == pool_index_.end()) throw Error("no pool example with id " + std::to_string(id));
  return pool_[it->second];
}

void PipelineResources::EnsureClient() {
  if (client_) return;
  try {
    if (config_.cache) cache_ = std::make_shared<CompletionCache>(*config_.cache);
    switch (config_.provider) {
      case Provider::kLive:
        client_ = std::make_unique<LiveChatClient>(config_.live, cache_);
        break;
      case Provider::kReplay:
        client_ = std::make_unique<ReplayChatClient>(cache_);
        break;
      case Provider::kMock:
        client_ = std::make_unique<MockChatClient>(LoadMockScript(*config_.mock_script));
        break;
    }
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

AuxPrediction PredictAux(const PipelineResources& res, const Question& q) {
  KeyInfo preliminary = res.extractor().Extract(q.text, AuxPrediction{});
  AuxPrediction aux = res.aux_provider().Predict(q.id, q.text, KeyInfoCounts::Of(preliminary));
  aux.Validate();
  return aux;
}

KeyInfo ExtractFor(const PipelineResources& res, const Question& q,
                   const AuxPrediction& aux) {
  return res.extractor().Extract(q.text, aux);
}

std::vector<int64_t> SelectFor(const PipelineResources& res, const Question& q,
                               const KeyInfo& key_info) {
  return SelectDemonstrations(key_info, q.id, res.pool(), res.config().k,
                              res.config().weights);
}

Prompt PromptFor(const PipelineResources& res, const Question& q,
                 const KeyInfo& key_info, const std::vector<int64_t>& demo_ids) {
  std::vector<std::string> blocks;
  for (int64_t id : demo_ids) {
    const AnnotatedExample& demo = res.example(id);
    blocks.push_back(RenderCotBlock(demo.question, demo.key_info, demo.key_info.aux,
                                    demo.gold_cql, res.cot_template()));
  }
  std::string target =
      RenderCotBlock(q.text, key_info, key_info.aux, std::nullopt, res.cot_template());
  Prompt prompt = BuildPrompt(res.prior(), blocks, target);
  prompt.question_id = q.id;
  prompt.demo_ids = demo_ids;
  return prompt;
}

ChatRequest RequestFor(const PipelineConfig& config, const Prompt& prompt, int attempt) {
  ChatRequest request;
  request.model = config.model;
  request.temperature = config.temperature;
  request.system_text = prompt.system_text;
  request.user_text = prompt.user_text;
  request.attempt_index = attempt;
  request.question_id = prompt.question_id;
  return request;
}

namespace {

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

size_t FindKeyword(const std::string& text, std::string_view keyword) {
  for (size_t i = 0; i + keyword.size() <= text.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < keyword.size() && match; ++j) {
      match = std::toupper(static_cast<unsigned char>(text[i + j])) == keyword[j];
    }
    if (!match) continue;
    bool left = i == 0 || !IsWordChar(text[i - 1]);
    size_t end = i + keyword.size();
    bool right = end == text.size() || !IsWordChar(text[end]);
    if (left && right) return i;
  }
  return std::string::npos;
}

}  // namespace

std::string ExtractCql(std::string_view completion) {
  std::string text(completion);
  if (size_t fence = text.find("```"); fence != std::string::npos) {
    size_t start = text.find('\n', fence);
    start = start == std::string::npos ? fence + 3 : start + 1;
    size_t end = text.find("```", start);
    text = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
  }
  if (size_t match = FindKeyword(text, "MATCH"); match != std::string::npos) {
    text.erase(0, match);
  }
  for (std::string_view marker : {"返回值", "Return value", "\n\n"}) {
    if (size_t cut = text.find(marker); cut != std::string::npos) text.erase(cut);
  }
  return std::string(Trim(text));
}

AttemptResult AnswerCompletion(const PipelineResources& res, std::string_view completion,
                               const KeyInfo& key_info) {
  AttemptResult result;
  result.completion = std::string(completion);
  result.extracted_cql = ExtractCql(completion);
  try {
    cql::Query query = cql::Parse(result.extracted_cql);
    cql::RepairNotes notes;
    query = cql::Postprocess(std::move(query), res.graph(), res.lexicon(), key_info.aux,
                             key_info, &notes);
    result.repaired_cql = cql::Print(query);
    result.repairs = notes.applied;
    result.repair_flags = notes.flags;
    result.ballot = cql::Execute(query, res.graph());
  } catch (const cql::SyntaxError& e) {
    result.error = std::string("syntax error: ") + e.what();
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

namespace {

Json AttemptJson(const AttemptResult& a, const std::string& digest) {
  Json json{{"attempt", a.attempt},
            {"request_digest", digest},
            {"completion", a.completion},
            {"extracted_cql", a.extracted_cql},
            {"repaired_cql", a.repaired_cql ? Json(*a.repaired_cql) : Json(nullptr)},
            {"repairs", a.repairs},
            {"repair_flags", a.repair_flags},
            {"ballot", a.ballot},
            {"error", a.error ? Json(*a.error) : Json(nullptr)}};
  if (a.provider_failed) json["provider_failed"] = true;
  return json;
}

}  // namespace

QuestionOutcome AnswerQuestion(const PipelineResources& res, const Question& q) {
  QuestionOutcome outcome;
  outcome.id = q.id;
  Json& trace = outcome.trace;
  trace["id"] = q.id;
  trace["question"] = q.text;

  KeyInfo key_info;
  Prompt prompt;
  try {
    AuxPrediction aux = PredictAux(res, q);
    trace["aux"] = ToJson(aux);
    key_info = ExtractFor(res, q, aux);
    trace["key_info"] = ToJson(key_info);
    std::vector<int64_t> demo_ids = SelectFor(res, q, key_info);
    trace["demo_ids"] = demo_ids;
    prompt = PromptFor(res, q, key_info, demo_ids);
    trace["prompt_digest"] = prompt.Digest();
  } catch (const std::exception& e) {
    trace["error"] = e.what();
    trace["answers"] = Json::array();
    outcome.provider_failed = true;
    return outcome;
  }

  std::vector<AnswerSet> ballots;
  Json attempts = Json::array();
  for (int attempt = 0; attempt < res.config().n; ++attempt) {
    ChatRequest request = RequestFor(res.config(), prompt, attempt);
    std::string digest = RequestDigest(request);
    AttemptResult result;
    try {
      Completion completion = res.client()->Complete(request);
      result = AnswerCompletion(res, completion.text, key_info);
    } catch (const std::exception& e) {
      result.error = e.what();
      result.provider_failed = true;
      outcome.provider_failed = true;
    }
    result.attempt = attempt;
    ballots.push_back(result.ballot);
    attempts.push_back(AttemptJson(result, digest));
  }
  trace["attempts"] = std::move(attempts);

  VoteTally tally = Tally(ballots);
  trace["votes"] = tally.counts;
  outcome.answers = tally.winner;
  trace["answers"] = outcome.answers;
  return outcome;
}

std::vector<QuestionOutcome> RunPipeline(PipelineResources& res,
                                         const std::vector<Question>& questions) {
  res.EnsureClient();
  std::vector<QuestionOutcome> outcomes(questions.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < questions.size(); i = next++) {
      outcomes[i] = AnswerQuestion(res, questions[i]);
    }
  };
  size_t threads = std::min<size_t>(static_cast<size_t>(res.config().parallelism),
                                    questions.size());
  {
    std::vector<std::jthread> pool;
    for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return outcomes;
}

void WriteOutcomes(const std::vector<QuestionOutcome>& outcomes, const fs::path& output,
                   const fs::path& trace_dir) {
  std::string lines;
  for (const QuestionOutcome& outcome : outcomes) {
    fs::path trace_path = trace_dir / (std::to_string(outcome.id) + ".json");
    WriteFile(trace_path, outcome.trace.dump(2) + "\n");
    Json line{{"id", outcome.id}, {"answers", outcome.answers},
              {"trace_path", trace_path.string()}};
    lines += line.dump();
    lines += '\n';
  }
  WriteFile(output, lines);
}

}  // namespace kbqa
