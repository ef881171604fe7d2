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

#ifndef KBQA_IO_UTIL_H_
#define KBQA_IO_UTIL_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace kbqa {

using Json = nlohmann::json;

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input file. The message carries path and line.
class FormatError : public Error {
 public:
  FormatError(const std::filesystem::path& path, int line,
              const std::string& message);

  int line() const { return line_; }

 private:
  int line_;
};

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Calls `fn` for every non-blank line of a line-delimited JSON file with the
// parsed record and its 1-based line number. Parse failures and exceptions
// thrown by `fn` are rethrown as FormatError tagged with the line.
void ForEachJsonLine(const std::filesystem::path& path,
                     const std::function<void(const Json&, int)>& fn);

// Parses a complete decimal literal: optional sign, digits, optional
// fractional part. Surrounding whitespace is ignored.
std::optional<double> ParseDecimal(std::string_view text);

// Shortest fixed-notation rendering; integral values carry no fraction.
std::string FormatNumber(double value);

std::string Sha256Hex(std::string_view data);

std::string_view Trim(std::string_view text);

}  // namespace kbqa

#endif  // KBQA_IO_UTIL_H_
