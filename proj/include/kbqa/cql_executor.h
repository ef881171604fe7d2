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

#ifndef KBQA_CQL_EXECUTOR_H_
#define KBQA_CQL_EXECUTOR_H_

#include <set>
#include <string>

#include "kbqa/cql_ast.h"
#include "kbqa/graph_store.h"
#include "kbqa/io_util.h"

namespace kbqa {

// Canonical answer strings: booleans "True"/"False", computed numbers
// without trailing fractional zeros, node names and stored values verbatim.
using AnswerSet = std::set<std::string>;

namespace cql {

class ExecutionError : public Error {
 public:
  using Error::Error;
};

// Runs `query` against `graph` with Cypher matching semantics:
//  * every MATCH pattern binds nodes and relationships respecting tags,
//    relationship types and directions; one relationship is never bound
//    twice within a binding;
//  * bindings are ordered by node assignment (slots in order of first
//    appearance, anonymous nodes included) and then relationship assignment,
//    which fixes the outcome of ORDER BY ties under LIMIT;
//  * comparisons are numeric when both sides parse as decimals and
//    byte-lexicographic otherwise; a missing attribute makes them false;
//  * non-aggregate projection items group aggregates, as in Cypher;
//  * count(*) counts bindings, count(x) counts non-missing values.
// Throws ExecutionError for unbound variables.
AnswerSet Execute(const Query& query, const KnowledgeGraph& graph);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_EXECUTOR_H_
