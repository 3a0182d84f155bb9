// include/simt/core.hpp

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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace simt {

/// Sentinel marking source exhaustion (server to client) and hypothesis
/// completion (client to server).
inline constexpr std::string_view kEos = "</s>";

enum class DataKind { Text, Speech };

std::string_view to_string(DataKind kind);
DataKind data_kind_from_string(std::string_view name);

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  BadRequest,
  Conflict,
  UndefinedMetric,
  DuplicateName,
  Corpus,
  Io,
  Transport,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

void log_warning(std::string_view message);

// ─── Segments ───────────────────────────────────────────────────────────────

struct TextWord {
  std::string text;
};

/// Rounded milliseconds covered by `samples` at `sample_rate` Hz.
std::int64_t samples_to_ms(std::int64_t samples, int sample_rate);

struct SpeechChunk {
  std::vector<std::int16_t> samples;
  std::int64_t duration_ms = 0;
  int sample_rate = 0;

  static SpeechChunk from_samples(std::vector<std::int16_t> samples,
                                  int sample_rate);
};

using Segment = std::variant<TextWord, SpeechChunk>;

std::vector<std::string> split_whitespace(std::string_view line);
std::string join_tokens(std::span<const std::string> tokens);

// ─── Instances ──────────────────────────────────────────────────────────────

struct AudioBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = 0;
};

struct Instance {
  std::size_t id = 0;
  DataKind kind = DataKind::Text;
  std::vector<std::string> source_words;  // text
  AudioBuffer audio;                      // speech
  std::vector<std::string> reference;
  std::int64_t total_duration_ms = 0;     // speech

  /// |X| for text, total duration in ms for speech.
  double source_size() const;
};

// ─── Delays ─────────────────────────────────────────────────────────────────

/// Per-token delays: source words read (text) or cumulative source ms
/// (speech) at the moment each target token was written.
class DelaySequence {
 public:
  DelaySequence() = default;
  DelaySequence(DataKind kind, std::vector<double> delays);

  DataKind kind() const { return kind_; }
  std::span<const double> values() const { return delays_; }
  std::size_t size() const { return delays_.size(); }
  bool empty() const { return delays_.empty(); }
  double operator[](std::size_t i) const { return delays_[i]; }

  /// Throws if not non-decreasing, negative, above `source_size`, or (text)
  /// not a positive integer.
  void validate(double source_size) const;

  bool operator==(const DelaySequence&) const = default;

 private:
  DataKind kind_ = DataKind::Text;
  std::vector<double> delays_;
};

struct Hypothesis {
  std::vector<std::string> tokens;
  DelaySequence delays;
};

/// Delay of a token written after `session_elapsed` source units were served.
double record_delay(double session_elapsed, DataKind kind);

// ─── Trace ──────────────────────────────────────────────────────────────────

enum class Action { Read, Write };

std::string_view to_string(Action action);

struct TraceEvent {
  std::size_t instance_id = 0;
  Action action = Action::Read;
  std::optional<std::string> payload;
  double cumulative_source = 0;
  double wall_time_ms = 0;

  bool operator==(const TraceEvent&) const = default;
};

nlohmann::json to_json(const TraceEvent& event);
TraceEvent trace_event_from_json(const nlohmann::json& j);

/// Rebuilds the delay of every non-EOS write from the action stream alone.
/// Text delays count the non-EOS reads before each write; speech delays take
/// the cumulative_source of the latest read. The trace must end with a write
/// of the EOS sentinel.
DelaySequence delays_from_trace(std::span<const TraceEvent> trace,
                                DataKind kind);

}  // namespace simt
