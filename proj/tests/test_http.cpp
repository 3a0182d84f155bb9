// tests/test_http.cpp

// Copyright 2026  The simt Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <thread>

#include "httplib.h"
#include "simt/agents.hpp"
#include "simt/http.hpp"
#include "test_util.hpp"

using namespace simt;
using testutil::text_instance;

namespace {

class Running {
 public:
  explicit Running(EvaluationServer& server) : frontend_(server) {
    port_ = frontend_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { frontend_.listen(); });
    while (!frontend_.is_running()) std::this_thread::yield();
  }
  ~Running() {
    frontend_.stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  HttpFrontend frontend_;
  std::thread thread_;
  int port_ = 0;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("endpoints over loopback") {
  EvaluationServer server({text_instance(0, "a b", "a b"), text_instance(1, "c", "c")}, {});
  Running running(server);
  HttpTransport client("127.0.0.1", running.port());

  const auto info = client.info();
  CHECK(info.num_sentences == 2);
  CHECK(info.data_kind == DataKind::Text);

  auto r = client.get_src(0, std::nullopt);
  CHECK(r.sent_id == 0);
  CHECK(*r.segment == "a");
  CHECK_FALSE(r.finished);
  client.post_hypo(0, "a");
  client.get_src(0, std::nullopt);
  r = client.get_src(0, std::nullopt);
  CHECK(*r.segment == "</s>");
  CHECK(r.finished);
  client.post_hypo(0, "b");
  client.post_hypo(0, "</s>");

  const auto s = server.session(0);
  CHECK(s.phase == SessionPhase::Finished);
  CHECK(s.delays == std::vector<double>{1, 2});
  CHECK(server.pending() == std::set<std::size_t>{1});
}

TEST_CASE("errors map to status codes") {
  EvaluationServer server({text_instance(0, "a", "a")}, {});
  Running running(server);
  HttpTransport client("127.0.0.1", running.port());

  CHECK(code_of([&] { client.get_src(7, std::nullopt); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { client.post_hypo(7, "x"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { client.post_hypo(0, " "); }) == ErrorCode::BadRequest);
  client.post_hypo(0, "</s>");
  CHECK(code_of([&] { client.get_src(0, std::nullopt); }) == ErrorCode::Conflict);
  CHECK(code_of([&] { client.post_hypo(0, "late"); }) == ErrorCode::Conflict);

  httplib::Client raw("127.0.0.1", running.port());
  auto res = raw.Get("/src");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = raw.Get("/src?sent_id=abc");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = raw.Post("/hypo", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = raw.Post("/hypo", R"({"sent_id": 0})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(nlohmann::json::parse(res->body).contains("error"));
}

TEST_CASE("speech segments travel as samples") {
  EvaluationServer server({testutil::speech_instance(0, 16000, 16000, "x")}, {});
  Running running(server);
  HttpTransport client("127.0.0.1", running.port());
  CHECK(client.info().data_kind == DataKind::Speech);
  CHECK(code_of([&] { client.get_src(0, std::nullopt); }) == ErrorCode::BadRequest);
  const auto r = client.get_src(0, 400);
  REQUIRE(r.samples.has_value());
  CHECK(r.samples->size() == 6400);
  CHECK(*r.sample_rate == 16000);
  CHECK((*r.samples)[1] == server.corpus()[0].audio.samples[1]);
}

TEST_CASE("a full agent run over HTTP matches the in-process run") {
  auto corpus = testutil::synthetic_corpus(6);
  std::vector<Instance> instances;
  std::vector<std::vector<std::string>> script;
  for (std::size_t i = 0; i < 6; ++i) {
    instances.push_back(text_instance(i, corpus.source[i], corpus.reference[i]));
    script.push_back(split_whitespace(corpus.script[i]));
  }
  agents::WaitKAgent agent({3, agents::PredictorKind::Scripted, std::nullopt},
                           agents::Script(script));
  const std::vector<std::size_t> ids{0, 1, 2, 3, 4, 5};

  EvaluationServer local(instances, {});
  run_instances(agent, ids, [&] { return std::make_unique<LocalTransport>(local); });

  EvaluationServer remote(instances, {});
  {
    Running running(remote);
    run_instances(
        agent, ids,
        [&] { return std::make_unique<HttpTransport>("127.0.0.1", running.port()); },
        {}, 3);
  }
  CHECK(local.finish().to_json() == remote.finish().to_json());
}

TEST_CASE("unreachable server is a transport error") {
  int port = 0;
  {
    EvaluationServer server({text_instance(0, "a", "a")}, {});
    HttpFrontend frontend(server);
    port = frontend.bind("127.0.0.1", 0);
  }
  HttpTransport client("127.0.0.1", port, {1, std::chrono::milliseconds(1)});
  CHECK(code_of([&] { client.info(); }) == ErrorCode::Transport);
}

TEST_CASE("binding a busy port fails") {
  EvaluationServer server({text_instance(0, "a", "a")}, {});
  Running running(server);
  HttpFrontend other(server);
  CHECK_THROWS_AS(other.bind("127.0.0.1", running.port()), Error);
}
