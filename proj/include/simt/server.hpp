// include/simt/server.hpp

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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simt/core.hpp"
#include "simt/quality.hpp"
#include "simt/results.hpp"

namespace simt {

// ─── Wire types ─────────────────────────────────────────────────────────────

/// Body of GET /src.
struct SrcResponse {
  std::size_t sent_id = 0;
  std::optional<std::string> segment;                // text
  std::optional<std::vector<std::int16_t>> samples;  // speech
  std::optional<int> sample_rate;
  bool finished = false;

  nlohmann::json to_json() const;
  static SrcResponse from_json(const nlohmann::json& j);
};

/// Body of GET /info.
struct ServerInfo {
  std::size_t num_sentences = 0;
  DataKind data_kind = DataKind::Text;

  nlohmann::json to_json() const;
  static ServerInfo from_json(const nlohmann::json& j);
};

// ─── Sessions ───────────────────────────────────────────────────────────────

enum class SessionPhase { Active, Finished };

/// Server-side bookkeeping of one instance's read/write loop.
struct SessionState {
  std::size_t instance_id = 0;
  std::size_t read_cursor = 0;       // segments served, excluding EOS
  std::int64_t sample_cursor = 0;    // speech
  double elapsed_source = 0;         // words or ms served
  std::vector<std::string> tokens;   // EOS excluded
  std::vector<double> delays;
  std::vector<double> durations;     // T_j actually served (speech)
  SessionPhase phase = SessionPhase::Active;
  std::vector<TraceEvent> trace;
};

struct ServerOptions {
  std::filesystem::path output_dir;  // empty: keep results in memory only
  bool resume = false;
  bool write_trace = false;
  quality::MetricRegistry metrics;
};

/// Hosts every session of one evaluation run. Thread-safe: calls for the
/// same sent_id are serialized, distinct sessions proceed concurrently.
class EvaluationServer {
 public:
  EvaluationServer(std::vector<Instance> corpus, ServerOptions options);
  ~EvaluationServer();

  EvaluationServer(const EvaluationServer&) = delete;
  EvaluationServer& operator=(const EvaluationServer&) = delete;

  ServerInfo info() const;
  const std::vector<Instance>& corpus() const { return corpus_; }

  /// Next source segment. Speech requires `segment_size_ms`.
  SrcResponse handle_src(std::size_t sent_id,
                         std::optional<std::int64_t> segment_size_ms);

  /// Records a target token; EOS finishes the session and logs its row.
  /// `error` marks an instance the client had to abort.
  void handle_hypo(std::size_t sent_id, std::string_view token,
                   std::optional<std::string> error = {});

  /// Instance ids that still need a client run.
  std::set<std::size_t> pending() const;
  bool all_finished() const;
  std::size_t num_finished() const;

  /// Copy of a session's state (for inspection and tests).
  SessionState session(std::size_t sent_id) const;

  /// Rows finalized so far (resumed rows included), sorted by index.
  std::vector<EvaluationResult> results() const;

  /// Aggregates every row and writes scores.json. Requires all_finished().
  CorpusReport finish();

  /// Called after each row is persisted (from the finishing request thread).
  void on_instance_finished(std::function<void(const EvaluationResult&)> cb);

 private:
  struct Session;

  Session& session_for(std::size_t sent_id) const;
  void finalize_locked(Session& s, std::optional<std::string> error);

  std::vector<Instance> corpus_;
  ServerOptions options_;
  DataKind kind_;
  std::vector<std::unique_ptr<Session>> sessions_;

  mutable std::mutex results_mu_;
  std::vector<EvaluationResult> results_;
  std::function<void(const EvaluationResult&)> on_finished_;
  std::atomic<std::size_t> finished_{0};

  std::unique_ptr<JsonlWriter> instances_log_;
  std::unique_ptr<JsonlWriter> trace_log_;
};

void write_config(const std::filesystem::path& output_dir,
                  const nlohmann::json& config);

}  // namespace simt
