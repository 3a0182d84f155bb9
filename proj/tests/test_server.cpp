// tests/test_server.cpp

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

#include "simt/server.hpp"
#include "test_util.hpp"

using namespace simt;
using testutil::TempDir;
using testutil::text_instance;
using testutil::speech_instance;

namespace {

std::vector<Instance> abc_corpus() {
  return {text_instance(0, "a b c", "a b c"),
          text_instance(1, "d e f g h", "le chat est sur tapis"),
          text_instance(2, "i j", "x y")};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

std::vector<EvaluationResult> read_rows(const std::filesystem::path& log) {
  std::vector<EvaluationResult> rows;
  std::istringstream in(testutil::read_file(log));
  std::string line;
  while (std::getline(in, line)) {
    rows.push_back(EvaluationResult::from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

}  // namespace

TEST_CASE("text source is served word by word, then EOS") {
  EvaluationServer server(abc_corpus(), {});
  CHECK(*server.handle_src(0, std::nullopt).segment == "a");
  CHECK(*server.handle_src(0, std::nullopt).segment == "b");
  auto third = server.handle_src(0, std::nullopt);
  CHECK(*third.segment == "c");
  CHECK_FALSE(third.finished);
  auto fourth = server.handle_src(0, std::nullopt);
  CHECK(*fourth.segment == "</s>");
  CHECK(fourth.finished);
  // surplus reads keep returning EOS and never advance the cursor
  for (int i = 0; i < 5; ++i) CHECK(*server.handle_src(0, std::nullopt).segment == "</s>");
  CHECK(server.session(0).read_cursor == 3);
  CHECK(server.session(0).elapsed_source == 3);
}

TEST_CASE("speech source is served in requested chunks with a short tail") {
  std::vector<Instance> corpus = {speech_instance(0, 16000, 16000, "x y")};
  EvaluationServer server(corpus, {});
  std::vector<std::size_t> sizes;
  while (true) {
    auto r = server.handle_src(0, 400);
    REQUIRE(r.samples.has_value());
    CHECK(*r.sample_rate == 16000);
    if (r.finished) {
      CHECK(r.samples->empty());
      break;
    }
    sizes.push_back(r.samples->size());
  }
  CHECK(sizes == std::vector<std::size_t>{6400, 6400, 3200});
  const auto st = server.session(0);
  CHECK(st.durations == std::vector<double>{400, 400, 200});
  CHECK(st.elapsed_source == 1000);
  CHECK(st.read_cursor == 3);
}

TEST_CASE("endpoint errors") {
  EvaluationServer server(abc_corpus(), {});
  CHECK(code_of([&] { server.handle_src(999, std::nullopt); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { server.handle_hypo(999, "x"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { server.handle_hypo(0, ""); }) == ErrorCode::BadRequest);
  CHECK(code_of([&] { server.handle_hypo(0, "two words"); }) == ErrorCode::BadRequest);
  server.handle_hypo(2, "</s>");
  CHECK(code_of([&] { server.handle_src(2, std::nullopt); }) == ErrorCode::Conflict);
  CHECK(code_of([&] { server.handle_hypo(2, "late"); }) == ErrorCode::Conflict);

  std::vector<Instance> speech = {speech_instance(0, 1600, 16000, "x")};
  EvaluationServer speech_server(speech, {});
  CHECK(code_of([&] { speech_server.handle_src(0, std::nullopt); }) == ErrorCode::BadRequest);
  CHECK(code_of([&] { speech_server.handle_src(0, 0); }) == ErrorCode::BadRequest);
}

TEST_CASE("hypothesis tokens take the delay of the source served so far") {
  EvaluationServer server(abc_corpus(), {});
  server.handle_src(1, std::nullopt);
  server.handle_src(1, std::nullopt);
  server.handle_hypo(1, "le");
  server.handle_hypo(1, "chat");  // no read in between
  server.handle_src(1, std::nullopt);
  server.handle_hypo(1, "est");
  const auto st = server.session(1);
  CHECK(st.delays == std::vector<double>{2, 2, 3});
  CHECK(st.phase == SessionPhase::Active);
  server.handle_hypo(1, "</s>");
  CHECK(server.session(1).phase == SessionPhase::Finished);
  CHECK(server.session(1).tokens.size() == 3);
}

TEST_CASE("speech writes without intervening reads keep the same delay") {
  std::vector<Instance> corpus = {speech_instance(0, 16000, 16000, "x y z")};
  EvaluationServer server(corpus, {});
  server.handle_src(0, 250);
  server.handle_hypo(0, "x");
  server.handle_hypo(0, "y");
  CHECK(server.session(0).delays == std::vector<double>{250, 250});
}

TEST_CASE("finalize: wait-1 identity run scores BLEU 100 and AL 1") {
  TempDir dir;
  ServerOptions opts;
  opts.output_dir = dir.path();
  EvaluationServer server(abc_corpus(), std::move(opts));
  for (const char* w : {"a", "b", "c"}) {
    server.handle_src(0, std::nullopt);
    server.handle_hypo(0, w);
  }
  server.handle_src(0, std::nullopt);
  server.handle_hypo(0, "</s>");

  const auto rows = read_rows(dir / kInstancesLog);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].index == 0);
  CHECK(rows[0].delays == std::vector<double>{1, 2, 3});
  CHECK(rows[0].metrics.at("BLEU") == doctest::Approx(100.0));
  CHECK(std::abs(rows[0].metrics.at("AL") - 1.0) < 1e-9);
  CHECK(std::abs(rows[0].metrics.at("DAL") - 1.0) < 1e-9);
  CHECK(std::abs(rows[0].metrics.at("AP") - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("finalize: empty hypothesis has BLEU 0 and no latency") {
  const auto row = finalize_instance(text_instance(0, "a b", "a b"), {}, {}, {}, {});
  CHECK(row.metrics.at("BLEU") == 0.0);
  CHECK_FALSE(row.latency_defined());
  CHECK(row.metrics.count("AL") == 0);
  // EOS is stripped even if it reaches finalize
  const auto eos = finalize_instance(text_instance(0, "a b", "a b"), {"a", "</s>"},
                                     {1, 2}, {}, {});
  CHECK(eos.hypothesis == std::vector<std::string>{"a"});
  CHECK(eos.delays == std::vector<double>{1});
}

TEST_CASE("finalize: early-stop speech instance logs the corrected AL") {
  TempDir dir;
  ServerOptions opts;
  opts.output_dir = dir.path();
  std::vector<Instance> corpus = {speech_instance(0, 16000, 16000, "r1 r2 r3 r4")};
  EvaluationServer server(corpus, std::move(opts));
  server.handle_src(0, 250);
  server.handle_hypo(0, "r1");
  server.handle_src(0, 250);
  server.handle_hypo(0, "r2");
  server.handle_hypo(0, "</s>");
  const auto rows = read_rows(dir / kInstancesLog);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].delays == std::vector<double>{250, 500});
  REQUIRE(rows[0].durations.has_value());
  CHECK(*rows[0].durations == std::vector<double>{250, 250});
  CHECK(std::abs(rows[0].metrics.at("AL") - 250.0) < 1e-9);
}

TEST_CASE("aggregate_corpus") {
  SUBCASE("identical hypotheses give corpus BLEU 100") {
    std::vector<EvaluationResult> rows(2);
    rows[0].index = 0;
    rows[0].hypothesis = rows[0].reference = {"a", "b", "c", "d"};
    rows[1].index = 1;
    rows[1].hypothesis = rows[1].reference = {"e", "f", "g", "h"};
    CHECK(aggregate_corpus(rows).bleu == doctest::Approx(100.0));
  }
  SUBCASE("latency means are unweighted over defined sentences") {
    std::vector<EvaluationResult> rows(3);
    for (std::size_t i = 0; i < 3; ++i) {
      rows[i].index = i;
      rows[i].reference = {"a"};
    }
    rows[0].hypothesis = {"a"};
    rows[0].metrics = {{"BLEU", 0}, {"AP", 0.5}, {"AL", 2.0}, {"DAL", 2.0}};
    rows[2].hypothesis = {"a"};
    rows[2].metrics = {{"BLEU", 0}, {"AP", 1.0}, {"AL", 4.0}, {"DAL", 5.0}};
    rows[1].metrics = {{"BLEU", 0}};
    const auto report = aggregate_corpus(rows);
    CHECK(*report.al == doctest::Approx(3.0));
    CHECK(*report.dal == doctest::Approx(3.5));
    CHECK(*report.ap == doctest::Approx(0.75));
    CHECK(report.num_latency_undefined == 1);
    CHECK(report.num_instances == 3);
  }
  SUBCASE("no rows is an error") {
    CHECK_THROWS_AS(aggregate_corpus({}), Error);
  }
}

TEST_CASE("resume finds pending instances") {
  TempDir dir;
  CHECK(resume(dir.path(), 10).pending.size() == 10);

  std::string log;
  for (std::size_t i = 0; i < 4; ++i) {
    EvaluationResult r;
    r.index = i;
    r.hypothesis = {"x"};
    r.delays = {1};
    r.reference = {"x"};
    r.metrics = {{"BLEU", 0}};
    log += r.to_json().dump() + "\n";
  }
  testutil::write_file(dir / kInstancesLog, log);
  auto state = resume(dir.path(), 10);
  CHECK(state.completed.size() == 4);
  CHECK(state.pending == std::set<std::size_t>{4, 5, 6, 7, 8, 9});

  SUBCASE("a cut trailing row is dropped and truncated") {
    testutil::write_file(dir / kInstancesLog, log + R"({"index": 4, "hypo)");
    auto cut = resume(dir.path(), 10);
    CHECK(cut.completed.size() == 4);
    CHECK(cut.pending.count(4) == 1);
    CHECK(testutil::read_file(dir / kInstancesLog) == log);
  }
  SUBCASE("a complete row missing its newline is also treated as cut") {
    auto last = log.substr(0, log.size() - 1);
    testutil::write_file(dir / kInstancesLog, last);
    auto cut = resume(dir.path(), 10);
    CHECK(cut.completed.size() == 3);
    CHECK(cut.pending.count(3) == 1);
  }
  SUBCASE("corruption before the last row is an error") {
    testutil::write_file(dir / kInstancesLog, "garbage\n" + log);
    CHECK_THROWS_AS(resume(dir.path(), 10), Error);
  }
}

TEST_CASE("resumed server skips completed sessions and keeps old rows") {
  TempDir dir;
  {
    ServerOptions opts;
    opts.output_dir = dir.path();
    EvaluationServer first(abc_corpus(), std::move(opts));
    first.handle_src(0, std::nullopt);
    first.handle_hypo(0, "a");
    first.handle_hypo(0, "</s>");
  }
  ServerOptions opts;
  opts.output_dir = dir.path();
  opts.resume = true;
  EvaluationServer second(abc_corpus(), std::move(opts));
  CHECK(second.pending() == std::set<std::size_t>{1, 2});
  CHECK(second.num_finished() == 1);
  CHECK(code_of([&] { second.handle_src(0, std::nullopt); }) == ErrorCode::Conflict);
  second.handle_hypo(1, "</s>");
  second.handle_hypo(2, "</s>");
  REQUIRE(second.all_finished());
  const auto report = second.finish();
  CHECK(report.num_instances == 3);
  CHECK(read_rows(dir / kInstancesLog).size() == 3);
  CHECK(std::filesystem::exists(dir / kScoresFile));
}

TEST_CASE("finish before every session ends is a conflict") {
  EvaluationServer server(abc_corpus(), {});
  CHECK(code_of([&] { server.finish(); }) == ErrorCode::Conflict);
}

TEST_CASE("logged delays equal the trace reconstruction") {
  TempDir dir;
  ServerOptions opts;
  opts.output_dir = dir.path();
  opts.write_trace = true;
  EvaluationServer server(abc_corpus(), std::move(opts));
  // session 1: R R W W R W R R R W(EOS)
  server.handle_src(1, std::nullopt);
  server.handle_src(1, std::nullopt);
  server.handle_hypo(1, "le");
  server.handle_hypo(1, "chat");
  server.handle_src(1, std::nullopt);
  server.handle_hypo(1, "est");
  for (int i = 0; i < 3; ++i) server.handle_src(1, std::nullopt);
  server.handle_hypo(1, "</s>");

  const auto st = server.session(1);
  const auto oracle = delays_from_trace(st.trace, DataKind::Text);
  CHECK(std::vector<double>(oracle.values().begin(), oracle.values().end()) == st.delays);

  std::vector<TraceEvent> logged;
  std::istringstream in(testutil::read_file(dir / kTraceLog));
  std::string line;
  while (std::getline(in, line)) {
    logged.push_back(trace_event_from_json(nlohmann::json::parse(line)));
  }
  REQUIRE(logged.size() == st.trace.size());
  const auto from_log = delays_from_trace(logged, DataKind::Text);
  CHECK(std::vector<double>(from_log.values().begin(), from_log.values().end()) ==
        read_rows(dir / kInstancesLog)[0].delays);
  for (std::size_t i = 1; i < logged.size(); ++i) {
    CHECK(logged[i].cumulative_source >= logged[i - 1].cumulative_source);
  }
}

TEST_CASE("interleaved sessions do not interfere") {
  auto run = [](bool interleave) {
    EvaluationServer server(abc_corpus(), {});
    auto step0 = [&](int i) {
      if (i < 3) {
        server.handle_src(0, std::nullopt);
        server.handle_hypo(0, "t" + std::to_string(i));
      } else if (i == 3) {
        server.handle_hypo(0, "</s>");
      }
    };
    auto step1 = [&](int i) {
      if (i < 2) {
        server.handle_src(1, std::nullopt);
        server.handle_src(1, std::nullopt);
        server.handle_hypo(1, "u" + std::to_string(i));
      } else if (i == 2) {
        server.handle_hypo(1, "</s>");
      }
    };
    if (interleave) {
      for (int i = 0; i < 4; ++i) {
        step1(i);
        step0(i);
      }
    } else {
      for (int i = 0; i < 4; ++i) step0(i);
      for (int i = 0; i < 4; ++i) step1(i);
    }
    return server.results();
  };
  const auto a = run(false);
  const auto b = run(true);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(a[i].to_json() == b[i].to_json());
}

TEST_CASE("concurrent sessions from many threads") {
  std::vector<Instance> corpus;
  for (std::size_t i = 0; i < 32; ++i) {
    corpus.push_back(text_instance(i, "a b c d e f", "a b c d e f"));
  }
  EvaluationServer server(corpus, {});
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t id = t; id < 32; id += 8) {
        for (const char* w : {"a", "b", "c", "d", "e", "f"}) {
          server.handle_src(id, std::nullopt);
          server.handle_hypo(id, w);
        }
        server.handle_hypo(id, "</s>");
      }
    });
  }
  for (auto& th : threads) th.join();
  REQUIRE(server.all_finished());
  const auto report = server.finish();
  CHECK(report.bleu == doctest::Approx(100.0));
  CHECK(*report.al == doctest::Approx(1.0));
}

TEST_CASE("wire types round-trip through JSON") {
  SrcResponse text;
  text.sent_id = 3;
  text.segment = "word";
  const auto tj = text.to_json();
  CHECK(tj.dump() ==
        R"({"finished":false,"sample_rate":null,"samples":null,"segment":"word","sent_id":3})");
  CHECK(SrcResponse::from_json(tj).segment == text.segment);

  SrcResponse speech;
  speech.samples = std::vector<std::int16_t>{1, -2, 3};
  speech.sample_rate = 16000;
  const auto back = SrcResponse::from_json(speech.to_json());
  CHECK(*back.samples == *speech.samples);
  CHECK(*back.sample_rate == 16000);
  CHECK_FALSE(back.segment.has_value());

  ServerInfo info{7, DataKind::Speech};
  CHECK(info.to_json().dump() == R"({"data_kind":"speech","num_sentences":7})");
  CHECK(ServerInfo::from_json(info.to_json()).num_sentences == 7);
}
