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

#include "kbqa/ensemble_eval.h"

#include <algorithm>

#include "kbqa/io_util.h"

namespace kbqa {

std::string SerializeAnswers(const AnswerSet& answers) {
  // std::set iterates in sorted order already.
  Json array = Json::array();
  for (const std::string& answer : answers) array.push_back(answer);
  return array.dump();
}

VoteTally Tally(const std::vector<AnswerSet>& ballots) {
  if (ballots.empty()) throw Error("cannot vote over zero ballots");
  VoteTally tally;
  bool all_empty = std::all_of(ballots.begin(), ballots.end(),
                               [](const AnswerSet& b) { return b.empty(); });
  std::map<std::string, int> first_seen;
  std::map<std::string, const AnswerSet*> by_key;
  for (size_t i = 0; i < ballots.size(); ++i) {
    tally.ballots.emplace_back(static_cast<int>(i), ballots[i]);
    if (ballots[i].empty() && !all_empty) continue;
    std::string key = SerializeAnswers(ballots[i]);
    ++tally.counts[key];
    first_seen.emplace(key, static_cast<int>(i));
    by_key.emplace(key, &ballots[i]);
  }
  const std::string* best = nullptr;
  for (const auto& [key, count] : tally.counts) {
    if (best == nullptr || count > tally.counts[*best] ||
        (count == tally.counts[*best] && first_seen[key] < first_seen[*best])) {
      best = &key;
    }
  }
  tally.winner = *by_key.at(*best);
  return tally;
}

AnswerSet Vote(const std::vector<AnswerSet>& ballots) {
  return Tally(ballots).winner;
}

QuestionScore ScoreQuestion(const AnswerSet& predicted, const AnswerSet& gold) {
  QuestionScore score;
  size_t overlap = 0;
  for (const std::string& answer : predicted) {
    if (gold.contains(answer)) ++overlap;
  }
  if (!predicted.empty()) {
    score.precision = static_cast<double>(overlap) / static_cast<double>(predicted.size());
  }
  if (!gold.empty()) {
    score.recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  }
  if (score.precision + score.recall > 0) {
    score.f1 = 2 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

EvalReport Evaluate(const std::map<int64_t, AnswerSet>& predictions,
                    const std::map<int64_t, AnswerSet>& gold) {
  if (gold.empty()) throw Error("gold answer set is empty");
  EvalReport report;
  static const AnswerSet kEmpty;
  for (const auto& [id, gold_answers] : gold) {
    auto it = predictions.find(id);
    QuestionScore score =
        ScoreQuestion(it == predictions.end() ? kEmpty : it->second, gold_answers);
    score.id = id;
    report.macro_precision += score.precision;
    report.macro_recall += score.recall;
    report.averaged_f1 += score.f1;
    report.per_question.push_back(score);
  }
  double n = static_cast<double>(gold.size());
  report.macro_precision /= n;
  report.macro_recall /= n;
  report.averaged_f1 /= n;
  for (const auto& [id, answers] : predictions) {
    if (!gold.contains(id)) {
      report.warnings.push_back("prediction for unknown question id " +
                                std::to_string(id) + " ignored");
    }
  }
  return report;
}

std::map<int64_t, AnswerSet> LoadAnswerFile(const std::filesystem::path& path) {
  std::map<int64_t, AnswerSet> out;
  ForEachJsonLine(path, [&](const Json& record, int) {
    int64_t id = record.at("id").get<int64_t>();
    AnswerSet answers;
    for (const auto& answer : record.at("answers")) {
      answers.insert(answer.is_string() ? answer.get<std::string>() : answer.dump());
    }
    if (!out.emplace(id, std::move(answers)).second) {
      throw Error("duplicate id " + std::to_string(id));
    }
  });
  return out;
}

std::string FormatAnswerLine(int64_t id, const AnswerSet& answers) {
  return Json{{"id", id}, {"answers", answers}}.dump();
}

}  // namespace kbqa
