// include/simt/client.hpp

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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simt/core.hpp"
#include "simt/server.hpp"

namespace simt {

// ─── Transport ──────────────────────────────────────────────────────────────

/// The client's view of the server protocol. Errors surface as simt::Error
/// with the code the server produced (NotFound, BadRequest, Conflict) or
/// Transport when the server could not be reached.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ServerInfo info() = 0;
  virtual SrcResponse get_src(std::size_t sent_id,
                              std::optional<std::int64_t> segment_size_ms) = 0;
  virtual void post_hypo(std::size_t sent_id, std::string_view token,
                         std::optional<std::string> error = {}) = 0;
};

/// Calls straight into an in-process server.
class LocalTransport : public Transport {
 public:
  explicit LocalTransport(EvaluationServer& server) : server_(server) {}

  ServerInfo info() override { return server_.info(); }
  SrcResponse get_src(std::size_t sent_id,
                      std::optional<std::int64_t> segment_size_ms) override {
    return server_.handle_src(sent_id, segment_size_ms);
  }
  void post_hypo(std::size_t sent_id, std::string_view token,
                 std::optional<std::string> error = {}) override {
    server_.handle_hypo(sent_id, token, std::move(error));
  }

 private:
  EvaluationServer& server_;
};

// ─── Agent state ────────────────────────────────────────────────────────────

enum class PreprocessKind { Identity, Lowercase };
enum class PostprocessKind { Identity, MergeSubwords };

/// Applies to text segments only; speech chunks pass through.
Segment preprocess(PreprocessKind kind, Segment raw);

/// Turns raw predictions into emitted tokens. MergeSubwords buffers pieces
/// ending in "@@" and emits the joined word with its final piece; pending
/// pieces are flushed right before EOS.
class Postprocessor {
 public:
  explicit Postprocessor(PostprocessKind kind = PostprocessKind::Identity)
      : kind_(kind) {}

  std::vector<std::string> push(const std::string& raw);

 private:
  PostprocessKind kind_;
  std::string pending_;
};

struct AgentState {
  std::size_t sent_id = 0;
  std::vector<Segment> source;        // after preprocessing
  std::vector<std::string> target;    // emitted tokens, EOS never stored
  bool finish_read = false;
  std::size_t reads = 0;              // j, non-EOS segments consumed
  std::size_t predictions = 0;        // i, raw predict() calls
  std::int64_t samples_read = 0;      // speech
  int sample_rate = 0;                // speech, 0 until the first chunk

  /// Cumulative source consumed: words (text) or rounded ms (speech).
  double consumed() const;
  std::int64_t consumed_ms() const;

  void update_source(Segment segment);
};

enum class AgentDecision { Read, Write };

/// Policy plus predictor. Implementations must not keep per-instance mutable
/// state: everything an instance needs lives in AgentState.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentDecision policy(const AgentState& state) const = 0;
  /// Called only after policy() returned Write. Returns a token or EOS.
  virtual std::string predict(const AgentState& state) const = 0;
  /// Chunk size requested from a speech server.
  virtual std::optional<std::int64_t> segment_size_ms() const {
    return std::nullopt;
  }
};

struct ClientOptions {
  PreprocessKind pre = PreprocessKind::Identity;
  PostprocessKind post = PostprocessKind::Identity;
  /// Writes after which EOS is forced, guarding against agents that never
  /// finish.
  std::size_t max_writes = 1 << 16;
};

struct InstanceOutcome {
  std::size_t sent_id = 0;
  bool skipped = false;               // already finished on the server
  std::vector<std::string> hypothesis;
  std::vector<double> delays;         // client-side reconstruction
  std::size_t reads = 0;              // READ requests, EOS read included
  std::optional<std::string> error;
};

/// Drives one instance through the read/write loop until EOS is sent.
InstanceOutcome run_instance(const Agent& agent, std::size_t sent_id,
                             Transport& transport,
                             const ClientOptions& options = {});

/// Runs `ids` with `jobs` workers; each worker gets its own transport from
/// `make_transport`. Outcomes are returned in `ids` order.
std::vector<InstanceOutcome> run_instances(
    const Agent& agent, const std::vector<std::size_t>& ids,
    const std::function<std::unique_ptr<Transport>()>& make_transport,
    const ClientOptions& options = {}, std::size_t jobs = 1);

}  // namespace simt
