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

#include "kbqa/llm_client.h"

#include <cstdlib>
#include <fstream>
#include <thread>

#include "httplib.h"

namespace kbqa {

void ChatRequest::Validate() const {
  if (temperature < 0) throw Error("temperature must be non-negative");
  if (attempt_index < 0) throw Error("attempt index must be non-negative");
  if (model.empty()) throw Error("model name must not be empty");
}

namespace {

Json RequestSummary(const ChatRequest& request) {
  return Json{{"model", request.model},
              {"temperature", request.temperature},
              {"system_text", request.system_text},
              {"user_text", request.user_text},
              {"attempt_index", request.attempt_index}};
}

}  // namespace

std::string RequestDigest(const ChatRequest& request) {
  // Object keys serialize in sorted order, so the encoding is canonical.
  return Sha256Hex(RequestSummary(request).dump());
}

std::string_view ProviderName(Provider provider) {
  switch (provider) {
    case Provider::kLive:
      return "live";
    case Provider::kReplay:
      return "replay";
    case Provider::kMock:
      return "mock";
  }
  return "unknown";
}

Provider ParseProvider(std::string_view name) {
  if (name == "live") return Provider::kLive;
  if (name == "replay") return Provider::kReplay;
  if (name == "mock") return Provider::kMock;
  throw Error("unknown provider '" + std::string(name) +
              "' (expected live, replay or mock)");
}

CompletionCache::CompletionCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  ForEachJsonLine(path_, [&](const Json& record, int) {
    entries_.insert_or_assign(record.at("digest").get<std::string>(),
                              record.at("response").get<std::string>());
  });
}

std::optional<std::string> CompletionCache::Lookup(const std::string& digest) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CompletionCache::Record(const ChatRequest& request, const std::string& response) {
  std::string digest = RequestDigest(request);
  Json line{{"digest", digest}, {"request", RequestSummary(request)}, {"response", response}};
  std::unique_lock lock(mutex_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to cache " + path_.string());
  out << line.dump() << '\n';
  if (!out) throw Error("failed writing cache " + path_.string());
  entries_.insert_or_assign(std::move(digest), response);
}

size_t CompletionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

LiveChatClient::LiveChatClient(LiveClientOptions options,
                               std::shared_ptr<CompletionCache> cache)
    : options_(std::move(options)), cache_(std::move(cache)) {
  const char* key = std::getenv(options_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error("environment variable " + options_.api_key_env + " is not set");
  }
  api_key_ = key;
  size_t scheme = options_.endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error("endpoint must be an absolute URL: " + options_.endpoint);
  }
  size_t slash = options_.endpoint.find('/', scheme + 3);
  base_url_ = options_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : options_.endpoint.substr(slash);
}

Completion LiveChatClient::Complete(const ChatRequest& request) {
  request.Validate();
  Json body{{"model", request.model},
            {"temperature", request.temperature},
            {"messages", Json::array({Json{{"role", "system"}, {"content", request.system_text}},
                                      Json{{"role", "user"}, {"content", request.user_text}}})}};
  std::string payload = body.dump();

  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_bearer_token_auth(api_key_);

  int status = 0;
  std::string detail;
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto result = client.Post(path_, payload, "application/json");
    if (!result) {
      status = 0;
      detail = httplib::to_string(result.error());
      continue;
    }
    status = result->status;
    if (status == 429 || status >= 500) {
      detail = result->body;
      continue;
    }
    if (status != 200) {
      throw LlmError("chat completion failed with HTTP " + std::to_string(status) +
                         ": " + result->body,
                     status);
    }
    std::string text;
    try {
      text = Json::parse(result->body)
                 .at("choices")
                 .at(0)
                 .at("message")
                 .at("content")
                 .get<std::string>();
    } catch (const Json::exception& e) {
      throw LlmError(std::string("malformed chat completion response: ") + e.what(), status);
    }
    if (cache_) cache_->Record(request, text);
    return Completion{text, Provider::kLive, RequestDigest(request)};
  }
  throw LlmError("chat completion failed after " + std::to_string(options_.max_retries) +
                     " retries (status " + std::to_string(status) + "): " + detail,
                 status);
}

Completion ReplayChatClient::Complete(const ChatRequest& request) {
  std::string digest = RequestDigest(request);
  std::optional<std::string> text = cache_->Lookup(digest);
  if (!text) throw LlmError("no cached completion for request digest " + digest, 0);
  return Completion{*text, Provider::kReplay, digest};
}

MockScript LoadMockScript(const std::filesystem::path& path) {
  MockScript script;
  ForEachJsonLine(path, [&](const Json& record, int) {
    auto key = std::make_pair(record.at("question_id").get<int64_t>(),
                              record.at("attempt").get<int>());
    if (!script.emplace(key, record.at("response").get<std::string>()).second) {
      throw Error("duplicate script entry for question " + std::to_string(key.first) +
                  " attempt " + std::to_string(key.second));
    }
  });
  return script;
}

Completion MockChatClient::Complete(const ChatRequest& request) {
  if (!request.question_id) throw LlmError("mock provider needs a question id", 0);
  auto it = script_.find({*request.question_id, request.attempt_index});
  if (it == script_.end()) {
    throw LlmError("mock script has no entry for question " +
                       std::to_string(*request.question_id) + " attempt " +
                       std::to_string(request.attempt_index),
                   0);
  }
  return Completion{it->second, Provider::kMock, RequestDigest(request)};
}

}  // namespace kbqa
