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

#ifndef KBQA_LLM_CLIENT_H_
#define KBQA_LLM_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "kbqa/io_util.h"

namespace kbqa {

struct ChatRequest {
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 1.0;
  std::string system_text;
  std::string user_text;
  int attempt_index = 0;
  // Routing key for scripted providers; not part of the digest.
  std::optional<int64_t> question_id;

  void Validate() const;
};

// Stable hex SHA-256 over model, temperature, both texts and attempt index.
std::string RequestDigest(const ChatRequest& request);

enum class Provider { kLive, kReplay, kMock };

std::string_view ProviderName(Provider provider);
Provider ParseProvider(std::string_view name);

struct Completion {
  std::string text;
  Provider provider = Provider::kMock;
  std::string request_digest;
};

// Raised by providers. `status` is the last HTTP status, or 0 when no
// response was received or the failure was not an HTTP one.
class LlmError : public Error {
 public:
  LlmError(const std::string& message, int status)
      : Error(message), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;

  virtual Completion Complete(const ChatRequest& request) = 0;
};

// Append-only line-delimited {digest, request, response} store. Lookups may
// run concurrently; appends are serialized.
class CompletionCache {
 public:
  // Loads `path` when it exists; later records are appended to it.
  explicit CompletionCache(std::filesystem::path path);

  std::optional<std::string> Lookup(const std::string& digest) const;
  void Record(const ChatRequest& request, const std::string& response);

  size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

struct LiveClientOptions {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

// Chat-completions over HTTP. Transport failures, 5xx and 429 are retried
// with exponential backoff; every successful response goes to `cache`.
class LiveChatClient : public ChatClient {
 public:
  LiveChatClient(LiveClientOptions options, std::shared_ptr<CompletionCache> cache);

  Completion Complete(const ChatRequest& request) override;

 private:
  LiveClientOptions options_;
  std::string api_key_;
  std::string base_url_;
  std::string path_;
  std::shared_ptr<CompletionCache> cache_;
};

class ReplayChatClient : public ChatClient {
 public:
  explicit ReplayChatClient(std::shared_ptr<CompletionCache> cache)
      : cache_(std::move(cache)) {}

  Completion Complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<CompletionCache> cache_;
};

// Responses keyed by (question id, attempt index).
using MockScript = std::map<std::pair<int64_t, int>, std::string>;

// Reads line-delimited {question_id, attempt, response} records.
MockScript LoadMockScript(const std::filesystem::path& path);

class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(MockScript script) : script_(std::move(script)) {}

  Completion Complete(const ChatRequest& request) override;

 private:
  MockScript script_;
};

}  // namespace kbqa

#endif  // KBQA_LLM_CLIENT_H_
