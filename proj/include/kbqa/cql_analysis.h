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

#ifndef KBQA_CQL_ANALYSIS_H_
#define KBQA_CQL_ANALYSIS_H_

#include "kbqa/cql_ast.h"
#include "kbqa/key_info.h"

namespace kbqa {
namespace cql {

// Comparison leaves in the WHERE tree (0 without WHERE).
int CountConditions(const Query& query);

// Relationship segments over all MATCH patterns.
int CountRelationships(const Query& query);

// Intent read off the RETURN clause: a boolean comparison item is
// attribute-value comparison (3), a count aggregate is entity counting (1),
// ORDER BY with LIMIT is conditional sorting (2), anything else is
// entity-attribute retrieval (0).
int InferIntent(const Query& query);

// Aux labels implied by an annotated query, clamped into the legal ranges.
AuxPrediction DeriveAux(const Query& query);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_ANALYSIS_H_
