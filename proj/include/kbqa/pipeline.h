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

#ifndef KBQA_PIPELINE_H_
#define KBQA_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/aux_classifier.h"
#include "kbqa/cql_executor.h"
#include "kbqa/demo_selector.h"
#include "kbqa/graph_store.h"
#include "kbqa/key_info.h"
#include "kbqa/lexicon_matcher.h"
#include "kbqa/llm_client.h"
#include "kbqa/prompt_builder.h"

namespace kbqa {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Relative paths in the config file are resolved against its directory.
struct PipelineConfig {
  std::filesystem::path kb_nodes;
  std::filesystem::path kb_edges;
  std::filesystem::path lexicon;
  std::filesystem::path example_pool;
  std::filesystem::path cot_template;
  std::filesystem::path prior_knowledge;
  std::string template_language = "zh";

  // Exactly one of the two aux sources is set.
  std::optional<std::filesystem::path> aux_rules;
  std::optional<std::filesystem::path> aux_predictions;

  Provider provider = Provider::kMock;
  std::optional<std::filesystem::path> cache;
  std::optional<std::filesystem::path> mock_script;
  LiveClientOptions live;
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 1.0;

  SimilarityWeights weights;
  size_t k = 3;
  int n = 5;
  int parallelism = 1;
  uint64_t seed = 0;  // reserved; every stage is deterministic

  // Throws ConfigError on bad values or missing input files.
  void Validate() const;

  static PipelineConfig FromJson(const Json& json,
                                 const std::filesystem::path& base_dir);
  static PipelineConfig Load(const std::filesystem::path& path);
};

struct Question {
  int64_t id = 0;
  std::string text;
};

// Line-delimited {id, question}; ids must be unique.
std::vector<Question> LoadQuestions(const std::filesystem::path& path);

// Read-only state shared by every question of a run.
class PipelineResources {
 public:
  // Throws ConfigError when anything fails to load.
  explicit PipelineResources(const PipelineConfig& config);

  PipelineResources(const PipelineResources&) = delete;
  PipelineResources& operator=(const PipelineResources&) = delete;

  const PipelineConfig& config() const { return config_; }
  const KnowledgeGraph& graph() const { return graph_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const KeyInfoExtractor& extractor() const { return *extractor_; }
  const std::vector<AnnotatedExample>& pool() const { return pool_; }
  const AnnotatedExample& example(int64_t id) const;
  const CotTemplate& cot_template() const { return template_; }
  const std::string& prior() const { return prior_; }
  const AuxProvider& aux_provider() const { return *aux_; }
  // Null until EnsureClient() succeeds.
  ChatClient* client() const { return client_.get(); }

  // Creates the configured chat provider. Kept separate so offline stages
  // never need provider credentials.
  void EnsureClient();

 private:
  PipelineConfig config_;
  KnowledgeGraph graph_;
  Lexicon lexicon_;
  std::unique_ptr<KeyInfoExtractor> extractor_;
  std::vector<AnnotatedExample> pool_;
  std::map<int64_t, size_t> pool_index_;
  CotTemplate template_;
  std::string prior_;
  std::unique_ptr<AuxProvider> aux_;
  std::shared_ptr<CompletionCache> cache_;
  std::unique_ptr<ChatClient> client_;
};

// Stages. Each one is what the matching subcommand runs.
AuxPrediction PredictAux(const PipelineResources& res, const Question& q);
KeyInfo ExtractFor(const PipelineResources& res, const Question& q,
                   const AuxPrediction& aux);
std::vector<int64_t> SelectFor(const PipelineResources& res, const Question& q,
                               const KeyInfo& key_info);
Prompt PromptFor(const PipelineResources& res, const Question& q,
                 const KeyInfo& key_info, const std::vector<int64_t>& demo_ids);
ChatRequest RequestFor(const PipelineConfig& config, const Prompt& prompt,
                       int attempt);

// Drops code fences and keeps the text from the first MATCH keyword up to
// any trailing return-value note.
std::string ExtractCql(std::string_view completion);

struct AttemptResult {
  int attempt = 0;
  std::string completion;
  std::string extracted_cql;
  std::optional<std::string> repaired_cql;
  std::vector<std::string> repairs;
  std::vector<std::string> repair_flags;
  AnswerSet ballot;
  std::optional<std::string> error;
  bool provider_failed = false;
};

// Parse, repair and execute one completion. Failures yield an empty ballot
// with `error` set.
AttemptResult AnswerCompletion(const PipelineResources& res,
                               std::string_view completion,
                               const KeyInfo& key_info);

struct QuestionOutcome {
  int64_t id = 0;
  AnswerSet answers;
  Json trace;
  bool provider_failed = false;
};

// Requires EnsureClient(). Never throws for per-question failures.
QuestionOutcome AnswerQuestion(const PipelineResources& res, const Question& q);

// Questions run on up to config.parallelism threads; the result is in input
// order and independent of the thread count.
std::vector<QuestionOutcome> RunPipeline(PipelineResources& res,
                                         const std::vector<Question>& questions);

// Writes {id, answers, trace_path} lines to `output` and one JSON trace per
// question under `trace_dir`.
void WriteOutcomes(const std::vector<QuestionOutcome>& outcomes,
                   const std::filesystem::path& output,
                   const std::filesystem::path& trace_dir);

}  // namespace kbqa

#endif  // KBQA_PIPELINE_H_
