// src/agents.cpp

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

#include "simt/agents.hpp"

#include "simt/corpus.hpp"

namespace simt::agents {

Script Script::load(const std::filesystem::path& path,
                    std::size_t expected_lines) {
  const auto raw = read_lines(path);
  if (raw.size() < expected_lines) {
    throw Error(ErrorCode::Corpus,
                "script " + path.string() + " has " +
                    std::to_string(raw.size()) + " lines, corpus needs " +
                    std::to_string(expected_lines));
  }
  std::vector<std::vector<std::string>> lines;
  lines.reserve(raw.size());
  for (const auto& l : raw) lines.push_back(split_whitespace(l));
  return Script(std::move(lines));
}

const std::vector<std::string>& Script::line(std::size_t sent_id) const {
  if (sent_id >= lines_.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "no script line for instance " + std::to_string(sent_id));
  }
  return lines_[sent_id];
}

std::string scripted_predict(const std::vector<std::string>& line,
                             std::size_t position) {
  if (position >= line.size()) return std::string(kEos);
  return line[position];
}

AgentDecision waitk_policy(const AgentState& state, std::size_t k) {
  const auto lead = static_cast<std::ptrdiff_t>(state.source.size()) -
                    static_cast<std::ptrdiff_t>(state.target.size());
  if (lead < static_cast<std::ptrdiff_t>(k) && !state.finish_read) {
    return AgentDecision::Read;
  }
  return AgentDecision::Write;
}

AgentDecision speech_chunk_policy(const AgentState& state,
                                  const SpeechChunkConfig& cfg) {
  if (state.finish_read) return AgentDecision::Write;
  if (cfg.tokens_per_chunk == 0) return AgentDecision::Read;
  const std::size_t budget = cfg.tokens_per_chunk * state.source.size();
  return state.predictions < budget ? AgentDecision::Write
                                    : AgentDecision::Read;
}

WaitKAgent::WaitKAgent(WaitKConfig cfg, Script script)
    : cfg_(cfg), script_(std::move(script)) {
  if (cfg_.k < 1) {
    throw Error(ErrorCode::InvalidArgument, "wait-k needs k >= 1");
  }
}

AgentDecision WaitKAgent::policy(const AgentState& state) const {
  return waitk_policy(state, cfg_.k);
}

std::string WaitKAgent::predict(const AgentState& state) const {
  if (cfg_.predictor == PredictorKind::Scripted) {
    return scripted_predict(script_.line(state.sent_id), state.predictions);
  }
  // Echo: copy the source word aligned with this write.
  if (state.predictions < state.source.size()) {
    if (const auto* w = std::get_if<TextWord>(&state.source[state.predictions])) {
      return w->text;
    }
    throw Error(ErrorCode::InvalidArgument,
                "the echo predictor only handles text sources");
  }
  return std::string(kEos);
}

SpeechChunkAgent::SpeechChunkAgent(SpeechChunkConfig cfg, Script script)
    : cfg_(cfg), script_(std::move(script)) {
  if (cfg_.segment_size_ms < 1) {
    throw Error(ErrorCode::InvalidArgument, "segment size must be >= 1 ms");
  }
}

AgentDecision SpeechChunkAgent::policy(const AgentState& state) const {
  return speech_chunk_policy(state, cfg_);
}

std::string SpeechChunkAgent::predict(const AgentState& state) const {
  return scripted_predict(script_.line(state.sent_id), state.predictions);
}

}  // namespace simt::agents
