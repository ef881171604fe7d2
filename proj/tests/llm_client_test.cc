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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "kbqa/io_util.h"
#include "kbqa/llm_client.h"

namespace kbqa {
namespace {

namespace fs = std::filesystem;

ChatRequest Request(int attempt = 0) {
  ChatRequest r;
  r.system_text = "prior";
  r.user_text = "question";
  r.attempt_index = attempt;
  r.question_id = 5;
  return r;
}

fs::path FreshPath(const std::string& name) {
  fs::path path = fs::temp_directory_path() / ("kbqa_llm_" + name);
  fs::remove(path);
  return path;
}

TEST(RequestDigest, StableAndSensitive) {
  EXPECT_EQ(RequestDigest(Request()), RequestDigest(Request()));
  EXPECT_NE(RequestDigest(Request(0)), RequestDigest(Request(1)));
  ChatRequest other = Request();
  other.question_id = 99;
  EXPECT_EQ(RequestDigest(other), RequestDigest(Request()));
  other.temperature = 0.5;
  EXPECT_NE(RequestDigest(other), RequestDigest(Request()));
  other = Request();
  other.model = "another-model";
  EXPECT_NE(RequestDigest(other), RequestDigest(Request()));
}

TEST(ChatRequest, ValidateRejectsBadFields) {
  ChatRequest r = Request();
  r.temperature = -0.1;
  EXPECT_THROW(r.Validate(), Error);
  r = Request();
  r.attempt_index = -1;
  EXPECT_THROW(r.Validate(), Error);
  r = Request();
  r.model.clear();
  EXPECT_THROW(r.Validate(), Error);
}

TEST(Provider, NamesRoundTrip) {
  for (Provider p : {Provider::kLive, Provider::kReplay, Provider::kMock}) {
    EXPECT_EQ(ParseProvider(ProviderName(p)), p);
  }
  EXPECT_THROW(ParseProvider("carrier-pigeon"), Error);
}

TEST(MockChatClient, ReturnsScriptedTextVerbatim) {
  MockChatClient client(MockScript{{{5, 0}, "MATCH (n) RETURN n\n"}, {{5, 1}, "second"}});
  Completion c = client.Complete(Request(0));
  EXPECT_EQ(c.text, "MATCH (n) RETURN n\n");
  EXPECT_EQ(c.provider, Provider::kMock);
  EXPECT_EQ(c.request_digest, RequestDigest(Request(0)));
  EXPECT_EQ(client.Complete(Request(1)).text, "second");
  EXPECT_THROW(client.Complete(Request(2)), LlmError);
  ChatRequest anonymous = Request();
  anonymous.question_id.reset();
  EXPECT_THROW(client.Complete(anonymous), LlmError);
}

TEST(LoadMockScript, RejectsDuplicates) {
  fs::path path = FreshPath("dup.jsonl");
  WriteFile(path, R"({"question_id":1,"attempt":0,"response":"a"})" "\n"
                  R"({"question_id":1,"attempt":0,"response":"b"})" "\n");
  EXPECT_THROW(LoadMockScript(path), Error);
}

TEST(CompletionCache, RecordThenReplayIsByteIdentical) {
  fs::path path = FreshPath("cache.jsonl");
  std::string text = "含\"引号\"的回答\n第二行\t";
  {
    auto cache = std::make_shared<CompletionCache>(path);
    cache->Record(Request(0), text);
    EXPECT_EQ(cache->size(), 1u);
  }
  auto reloaded = std::make_shared<CompletionCache>(path);
  ReplayChatClient replay(reloaded);
  Completion c = replay.Complete(Request(0));
  EXPECT_EQ(c.text, text);
  EXPECT_EQ(c.provider, Provider::kReplay);
  try {
    replay.Complete(Request(1));
    FAIL() << "expected a miss";
  } catch (const LlmError& e) {
    EXPECT_EQ(std::string(e.what()),
              "no cached completion for request digest " + RequestDigest(Request(1)));
  }
}

class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::function<int(int)> status_for_call) {
    server_.Post("/v1/chat/completions", [this, status_for_call](const httplib::Request& req,
                                                                 httplib::Response& res) {
      int call = calls_++;
      last_auth_ = req.get_header_value("Authorization");
      int status = status_for_call(call);
      res.status = status;
      if (status == 200) {
        Json body{{"choices", Json::array({Json{{"message", {{"content", "answer " +
                                                                      std::to_string(call)}}}}})}};
        res.set_content(body.dump(), "application/json");
      } else {
        res.set_content("{\"error\":\"nope\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  LiveClientOptions Options() const {
    LiveClientOptions options;
    options.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    options.api_key_env = "KBQA_TEST_API_KEY";
    options.initial_backoff = std::chrono::milliseconds(1);
    options.timeout = std::chrono::seconds(5);
    return options;
  }

  int calls() const { return calls_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::string last_auth_;
};

class LiveChatClientTest : public ::testing::Test {
 protected:
  void SetUp() override { setenv("KBQA_TEST_API_KEY", "test-key", 1); }
  void TearDown() override { unsetenv("KBQA_TEST_API_KEY"); }
};

TEST_F(LiveChatClientTest, RetriesServerErrorsAndRateLimits) {
  FakeEndpoint endpoint([](int call) { return call == 0 ? 500 : call == 1 ? 429 : 200; });
  fs::path path = FreshPath("live.jsonl");
  auto cache = std::make_shared<CompletionCache>(path);
  LiveChatClient client(endpoint.Options(), cache);
  Completion c = client.Complete(Request());
  EXPECT_EQ(c.text, "answer 2");
  EXPECT_EQ(c.provider, Provider::kLive);
  EXPECT_EQ(endpoint.calls(), 3);
  EXPECT_EQ(endpoint.last_auth(), "Bearer test-key");
  EXPECT_EQ(cache->Lookup(RequestDigest(Request())), "answer 2");
  EXPECT_EQ(ReplayChatClient(std::make_shared<CompletionCache>(path)).Complete(Request()).text,
            "answer 2");
}

TEST_F(LiveChatClientTest, ClientErrorsAreNotRetried) {
  FakeEndpoint endpoint([](int) { return 400; });
  LiveChatClient client(endpoint.Options(), nullptr);
  try {
    client.Complete(Request());
    FAIL() << "expected an error";
  } catch (const LlmError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(endpoint.calls(), 1);
}

TEST_F(LiveChatClientTest, GivesUpAfterMaxRetries) {
  FakeEndpoint endpoint([](int) { return 503; });
  LiveClientOptions options = endpoint.Options();
  options.max_retries = 2;
  LiveChatClient client(options, nullptr);
  try {
    client.Complete(Request());
    FAIL() << "expected an error";
  } catch (const LlmError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(endpoint.calls(), 3);
}

TEST(LiveChatClient, MissingKeyIsAnError) {
  LiveClientOptions options;
  options.api_key_env = "KBQA_TEST_UNSET_KEY";
  unsetenv("KBQA_TEST_UNSET_KEY");
  EXPECT_THROW(LiveChatClient(options, nullptr), Error);
}

}  // namespace
}  // namespace kbqa
