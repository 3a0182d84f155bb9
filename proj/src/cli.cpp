// src/cli.cpp

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

#include "simt/cli.hpp"

#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "simt/agents.hpp"
#include "simt/corpus.hpp"
#include "simt/http.hpp"
#include "simt/server.hpp"

namespace simt::cli {
namespace {

using nlohmann::json;

ClientOptions client_options(const RunConfig& cfg) {
  ClientOptions opts;
  if (cfg.lowercase) opts.pre = PreprocessKind::Lowercase;
  if (cfg.merge_subwords) opts.post = PostprocessKind::MergeSubwords;
  return opts;
}

quality::MetricRegistry metric_registry(const RunConfig& cfg) {
  quality::MetricRegistry registry;
  for (const auto& name : cfg.metrics) {
    registry.add(quality::builtin_plugin(name));
  }
  return registry;
}

std::vector<Instance> load(const RunConfig& cfg) {
  return load_corpus(cfg.source, cfg.reference, cfg.data_kind);
}

void prepare_output(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output);
  // a stale report from an earlier run must not survive a failed one
  std::filesystem::remove(cfg.output / kScoresFile);
  write_config(cfg.output, cfg.to_json());
}

void print_report(const CorpusReport& report) {
  std::cout << report.to_json().dump(2) << std::endl;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<std::size_t> to_vector(const std::set<std::size_t>& ids) {
  return {ids.begin(), ids.end()};
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::InvalidArgument, why);
  };
  if (mode != Mode::Client) {
    if (source.empty() || reference.empty() || output.empty()) {
      fail("--source, --reference and --output are required");
    }
  }
  if (mode == Mode::Server) return;
  if (port < 0 || port > 65535) fail("--port out of range");
  if (agent == "waitk") {
    if (waitk < 1) fail("--waitk must be >= 1");
    if (predictor != "echo" && predictor != "script") {
      fail("--predictor must be echo or script");
    }
    if (predictor == "script" && !script) fail("--predictor script needs --script");
  } else if (agent == "speech-chunk") {
    if (!script) fail("--agent speech-chunk needs --script");
    if (!segment_size_ms) fail("--agent speech-chunk needs --segment-size");
  } else {
    fail("unknown agent '" + agent + "' (waitk, speech-chunk)");
  }
  if (segment_size_ms && *segment_size_ms < 1) fail("--segment-size must be >= 1");
  if (jobs < 1) fail("--jobs must be >= 1");
  if (start_index && end_index && *start_index > *end_index) {
    fail("--start-index is past --end-index");
  }
}

json RunConfig::to_json() const {
  json j;
  j["mode"] = mode == Mode::Joint ? "joint" : mode == Mode::Server ? "server"
                                                                   : "client";
  j["source"] = source.string();
  j["reference"] = reference.string();
  j["output"] = output.string();
  j["data_kind"] = std::string(to_string(data_kind));
  j["resume"] = resume;
  j["trace"] = trace;
  j["metrics"] = metrics;
  if (mode == Mode::Server) {
    j["port"] = port;
    return j;
  }
  j["agent"] = agent;
  j["waitk"] = waitk;
  j["predictor"] = predictor;
  j["script"] = script ? json(script->string()) : json(nullptr);
  j["segment_size"] = segment_size_ms ? json(*segment_size_ms) : json(nullptr);
  j["tokens_per_chunk"] = tokens_per_chunk;
  j["lowercase"] = lowercase;
  j["merge_subwords"] = merge_subwords;
  j["jobs"] = jobs;
  return j;
}

std::unique_ptr<Agent> make_agent(const RunConfig& cfg,
                                  const ServerInfo& info) {
  if (info.data_kind == DataKind::Speech && !cfg.segment_size_ms) {
    throw Error(ErrorCode::InvalidArgument,
                "a speech corpus needs --segment-size");
  }
  agents::Script script;
  if (cfg.script) script = agents::Script::load(*cfg.script, info.num_sentences);

  if (cfg.agent == "speech-chunk") {
    agents::SpeechChunkConfig sc;
    sc.segment_size_ms = *cfg.segment_size_ms;
    sc.tokens_per_chunk = cfg.tokens_per_chunk;
    return std::make_unique<agents::SpeechChunkAgent>(sc, std::move(script));
  }
  agents::WaitKConfig wk;
  wk.k = cfg.waitk;
  wk.predictor = cfg.predictor == "script" ? agents::PredictorKind::Scripted
                                           : agents::PredictorKind::Echo;
  wk.segment_size_ms = cfg.segment_size_ms;
  return std::make_unique<agents::WaitKAgent>(wk, std::move(script));
}

int run_joint(const RunConfig& cfg, const RunHooks& hooks) {
  return guarded([&] {
    cfg.validate();
    auto corpus = load(cfg);
    ServerInfo info{corpus.size(), cfg.data_kind};
    auto agent = make_agent(cfg, info);

    prepare_output(cfg);
    ServerOptions opts;
    opts.output_dir = cfg.output;
    opts.resume = cfg.resume;
    opts.write_trace = cfg.trace;
    opts.metrics = metric_registry(cfg);
    EvaluationServer server(std::move(corpus), std::move(opts));
    if (hooks.on_instance_finished) {
      server.on_instance_finished(hooks.on_instance_finished);
    }

    const auto pending = to_vector(server.pending());
    if (cfg.resume) {
      std::cerr << "resuming: " << pending.size() << " of "
                << info.num_sentences << " instances pending\n";
    }
    run_instances(
        *agent, pending,
        [&] { return std::make_unique<LocalTransport>(server); },
        client_options(cfg), cfg.jobs);
    print_report(server.finish());
    return kExitOk;
  });
}

int run_server(const RunConfig& cfg, const RunHooks& hooks) {
  return guarded([&] {
    cfg.validate();
    auto corpus = load(cfg);
    prepare_output(cfg);
    ServerOptions opts;
    opts.output_dir = cfg.output;
    opts.resume = cfg.resume;
    opts.write_trace = cfg.trace;
    opts.metrics = metric_registry(cfg);
    EvaluationServer server(std::move(corpus), std::move(opts));

    if (server.all_finished()) {
      print_report(server.finish());
      return kExitOk;
    }

    HttpFrontend frontend(server);
    server.on_instance_finished([&](const EvaluationResult& row) {
      if (hooks.on_instance_finished) hooks.on_instance_finished(row);
      if (server.all_finished()) frontend.stop();
    });
    const int port = frontend.bind(cfg.host, cfg.port);
    std::cerr << "listening on " << cfg.host << ':' << port << '\n';
    if (hooks.on_listening) hooks.on_listening(port);
    frontend.listen();

    if (!server.all_finished()) {
      std::cerr << "error: server stopped with "
                << server.pending().size() << " instances pending\n";
      return kExitRuntime;
    }
    print_report(server.finish());
    return kExitOk;
  });
}

int run_client(const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    HttpTransport probe(cfg.host, cfg.port);
    const ServerInfo info = probe.info();
    auto agent = make_agent(cfg, info);

    const std::size_t end =
        std::min(cfg.end_index.value_or(info.num_sentences), info.num_sentences);
    const std::size_t begin = std::min(cfg.start_index.value_or(0), end);
    std::vector<std::size_t> ids(end - begin);
    std::iota(ids.begin(), ids.end(), begin);

    const auto outcomes = run_instances(
        *agent, ids,
        [&] { return std::make_unique<HttpTransport>(cfg.host, cfg.port); },
        client_options(cfg), cfg.jobs);

    std::size_t done = 0, skipped = 0, failed = 0;
    for (const auto& o : outcomes) {
      if (o.skipped) {
        ++skipped;
      } else {
        ++done;
        if (o.error) ++failed;
      }
    }
    std::cerr << "client finished " << done << " instances (" << skipped
              << " already done, " << failed << " agent errors)\n";
    return kExitOk;
  });
}

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string data_kind = "text";

  CLI::App app{"Simultaneous translation evaluation: latency and quality"};
  app.require_subcommand(0, 1);
  auto* server_cmd = app.add_subcommand("server", "Serve a corpus over HTTP");
  auto* client_cmd = app.add_subcommand("client", "Run an agent against a server");

  auto add_corpus = [&](CLI::App* a) {
    a->add_option("--source", cfg.source, "Source file (text, or WAV list)");
    a->add_option("--reference", cfg.reference, "Reference file");
    a->add_option("--output", cfg.output, "Output directory");
    a->add_option("--data-type", data_kind, "text | speech")
        ->check(CLI::IsMember({"text", "speech"}));
    a->add_flag("--resume", cfg.resume, "Continue a partial run in --output");
    a->add_flag("--trace", cfg.trace, "Write trace.log");
    a->add_option("--metric", cfg.metrics, "Extra sentence metric")
        ->check(CLI::IsMember(quality::builtin_plugin_names()));
  };
  auto add_agent = [&](CLI::App* a) {
    a->add_option("--agent", cfg.agent, "waitk | speech-chunk");
    a->add_option("--waitk", cfg.waitk, "Lag k of the wait-k agent");
    a->add_option("--predictor", cfg.predictor, "echo | script");
    a->add_option("--script", cfg.script, "Hypothesis file, one line per instance");
    a->add_option("--segment-size", cfg.segment_size_ms, "Speech chunk in ms");
    a->add_option("--tokens-per-chunk", cfg.tokens_per_chunk,
                  "Speech: tokens written per chunk (0 = after full read)");
    a->add_flag("--lowercase", cfg.lowercase, "Lowercase source words");
    a->add_flag("--merge-subwords", cfg.merge_subwords, "Join '@@' pieces");
    a->add_option("--jobs", cfg.jobs, "Parallel instances");
  };
  auto add_endpoint = [&](CLI::App* a) {
    a->add_option("--host", cfg.host, "Server host");
    a->add_option("--port", cfg.port, "Server port");
  };

  add_corpus(&app);
  add_agent(&app);
  add_corpus(server_cmd);
  add_endpoint(server_cmd);
  add_agent(client_cmd);
  add_endpoint(client_cmd);
  client_cmd->add_option("--start-index", cfg.start_index, "First sent_id");
  client_cmd->add_option("--end-index", cfg.end_index, "One past the last sent_id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.data_kind = data_kind_from_string(data_kind);

  if (server_cmd->parsed()) {
    cfg.mode = Mode::Server;
    return run_server(cfg);
  }
  if (client_cmd->parsed()) {
    cfg.mode = Mode::Client;
    return run_client(cfg);
  }
  cfg.mode = Mode::Joint;
  return run_joint(cfg);
}

}  // namespace simt::cli
