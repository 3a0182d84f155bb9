// include/simt/agents.hpp

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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simt/client.hpp"

namespace simt::agents {

/// One whitespace-tokenized hypothesis per corpus line.
class Script {
 public:
  Script() = default;
  explicit Script(std::vector<std::vector<std::string>> lines)
      : lines_(std::move(lines)) {}

  /// Throws if the file has fewer than `expected_lines` lines.
  static Script load(const std::filesystem::path& path,
                     std::size_t expected_lines);

  std::size_t size() const { return lines_.size(); }
  const std::vector<std::string>& line(std::size_t sent_id) const;

 private:
  std::vector<std::vector<std::string>> lines_;
};

/// Token at `position` of a script line, EOS past its end.
std::string scripted_predict(const std::vector<std::string>& line,
                             std::size_t position);

/// READ while fewer than k source segments lead the target and the source
/// is not exhausted.
AgentDecision waitk_policy(const AgentState& state, std::size_t k);

/// Emission schedule for speech: `tokens_per_chunk` tokens may be written
/// after each chunk; 0 means write everything after the full read.
struct SpeechChunkConfig {
  std::int64_t segment_size_ms = 0;
  std::size_t tokens_per_chunk = 0;
};

AgentDecision speech_chunk_policy(const AgentState& state,
                                  const SpeechChunkConfig& cfg);

enum class PredictorKind { Echo, Scripted };

struct WaitKConfig {
  std::size_t k = 1;
  PredictorKind predictor = PredictorKind::Echo;
  std::optional<std::int64_t> segment_size_ms;  // when run on speech
};

/// Fixed wait-k reader. Echo copies the source word at the write position;
/// Scripted replays a hypothesis file.
class WaitKAgent : public Agent {
 public:
  WaitKAgent(WaitKConfig cfg, Script script = {});

  AgentDecision policy(const AgentState& state) const override;
  std::string predict(const AgentState& state) const override;
  std::optional<std::int64_t> segment_size_ms() const override {
    return cfg_.segment_size_ms;
  }

 private:
  WaitKConfig cfg_;
  Script script_;
};

class SpeechChunkAgent : public Agent {
 public:
  SpeechChunkAgent(SpeechChunkConfig cfg, Script script);

  AgentDecision policy(const AgentState& state) const override;
  std::string predict(const AgentState& state) const override;
  std::optional<std::int64_t> segment_size_ms() const override {
    return cfg_.segment_size_ms;
  }

 private:
  SpeechChunkConfig cfg_;
  Script script_;
};

}  // namespace simt::agents
