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

#ifndef KBQA_UTF8_H_
#define KBQA_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace kbqa {
namespace utf8 {

// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to
// U+FFFD one byte at a time.
std::u32string Decode(std::string_view text);

std::string Encode(std::u32string_view text);

// Number of scalar values in `text`.
size_t Length(std::string_view text);

bool IsAscii(std::string_view text);

}  // namespace utf8
}  // namespace kbqa

#endif  // KBQA_UTF8_H_
