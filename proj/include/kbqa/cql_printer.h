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

#ifndef KBQA_CQL_PRINTER_H_
#define KBQA_CQL_PRINTER_H_

#include <string>
#include <string_view>

#include "kbqa/cql_ast.h"

namespace kbqa {
namespace cql {

// Canonical text: single spaces, upper-case keywords, lower-case function
// names, identifiers backtick-quoted unless they are plain ASCII words.
std::string Print(const Query& query);
std::string Print(const BoolExpr& expr);
std::string Print(const Expr& expr);

std::string QuoteIdentifier(std::string_view name);
std::string QuoteString(std::string_view text);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_PRINTER_H_
