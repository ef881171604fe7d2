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

#ifndef KBQA_CQL_PARSER_H_
#define KBQA_CQL_PARSER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/cql_ast.h"
#include "kbqa/io_util.h"

namespace kbqa {
namespace cql {

class SyntaxError : public Error {
 public:
  SyntaxError(size_t offset, std::vector<std::string> expected,
              const std::string& detail);

  // Byte offset into the query text.
  size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  size_t offset_;
  std::vector<std::string> expected_;
};

// Parses one query. Keywords are case-insensitive; identifiers may be bare
// or backtick-quoted; strings use double (or single) quotes. A double quote
// inside a string that is not followed by something that can end a literal
// is kept as text, so names like MQ-1"捕食者"无人机 survive unescaped.
Query Parse(std::string_view text);

}  // namespace cql
}  // namespace kbqa

#endif  // KBQA_CQL_PARSER_H_
