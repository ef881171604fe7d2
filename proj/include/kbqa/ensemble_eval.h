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

#ifndef KBQA_ENSEMBLE_EVAL_H_
#define KBQA_ENSEMBLE_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kbqa/cql_executor.h"

namespace kbqa {

struct VoteTally {
  std::vector<std::pair<int, AnswerSet>> ballots;  // (attempt index, answers)
  AnswerSet winner;
  std::map<std::string, int> counts;  // canonical serialization -> votes
};

// Sorted answers joined into one comparable string.
std::string SerializeAnswers(const AnswerSet& answers);

// Plurality vote over the ballots of one question; ballot i is attempt i.
// Empty ballots only count when every ballot is empty. Ties go to the
// serialization first cast by the lowest attempt index. Throws Error on an
// empty ballot list.
VoteTally Tally(const std::vector<AnswerSet>& ballots);
AnswerSet Vote(const std::vector<AnswerSet>& ballots);

struct QuestionScore {
  int64_t id = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Per-question precision, recall and F1 with zero for every undefined
// ratio (|A| = 0, |G| = 0, P + R = 0).
QuestionScore ScoreQuestion(const AnswerSet& predicted, const AnswerSet& gold);

struct EvalReport {
  std::vector<QuestionScore> per_question;
  double macro_precision = 0;
  double macro_recall = 0;
  double averaged_f1 = 0;  // mean of per-question F1
  std::vector<std::string> warnings;
};

// Scores every gold question; a missing prediction counts as an empty
// answer set, predictions without gold are reported in `warnings` and
// ignored. Throws Error when `gold` is empty.
EvalReport Evaluate(const std::map<int64_t, AnswerSet>& predictions,
                    const std::map<int64_t, AnswerSet>& gold);

// Line-delimited {id, answers} records.
std::map<int64_t, AnswerSet> LoadAnswerFile(const std::filesystem::path& path);
std::string FormatAnswerLine(int64_t id, const AnswerSet& answers);

}  // namespace kbqa

#endif  // KBQA_ENSEMBLE_EVAL_H_
