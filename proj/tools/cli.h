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

#ifndef KBQA_TOOLS_CLI_H_
#define KBQA_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace kbqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

// Entry point of the `kbqa` tool. Returns the process exit code.
int Run(int argc, const char* const* argv);
int Run(const std::vector<std::string>& args);

}  // namespace kbqa::cli

#endif  // KBQA_TOOLS_CLI_H_
