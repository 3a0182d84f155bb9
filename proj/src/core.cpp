// src/core.cpp

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

#include "simt/core.hpp"

#include <cctype>
#include <cmath>
#include <iostream>
#include <mutex>

namespace simt {

std::string_view to_string(DataKind kind) {
  return kind == DataKind::Text ? "text" : "speech";
}

DataKind data_kind_from_string(std::string_view name) {
  if (name == "text") return DataKind::Text;
  if (name == "speech") return DataKind::Speech;
  throw Error(ErrorCode::InvalidArgument,
              "unknown data kind '" + std::string(name) + "'");
}

void log_warning(std::string_view message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "WARNING: " << message << '\n';
}

std::int64_t samples_to_ms(std::int64_t samples, int sample_rate) {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  }
  // round half up, integer only
  return (samples * 1000 + sample_rate / 2) / sample_rate;
}

SpeechChunk SpeechChunk::from_samples(std::vector<std::int16_t> samples,
                                      int sample_rate) {
  SpeechChunk chunk;
  chunk.duration_ms =
      samples_to_ms(static_cast<std::int64_t>(samples.size()), sample_rate);
  chunk.samples = std::move(samples);
  chunk.sample_rate = sample_rate;
  return chunk;
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

double Instance::source_size() const {
  return kind == DataKind::Text ? static_cast<double>(source_words.size())
                                : static_cast<double>(total_duration_ms);
}

DelaySequence::DelaySequence(DataKind kind, std::vector<double> delays)
    : kind_(kind), delays_(std::move(delays)) {}

void DelaySequence::validate(double source_size) const {
  for (std::size_t i = 0; i < delays_.size(); ++i) {
    double d = delays_[i];
    if (!(d >= 0) || d > source_size) {
      throw Error(ErrorCode::InvalidArgument,
                  "delay " + std::to_string(d) + " outside [0, " +
                      std::to_string(source_size) + "]");
    }
    if (kind_ == DataKind::Text && (d < 1 || d != std::floor(d))) {
      throw Error(ErrorCode::InvalidArgument,
                  "text delay must be a positive integer");
    }
    if (i > 0 && d < delays_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "delays must be non-decreasing");
    }
  }
}

double record_delay(double session_elapsed, DataKind /*kind*/) {
  // Same rule for both kinds: j words, or sum of the served T_j.
  return session_elapsed;
}

std::string_view to_string(Action action) {
  return action == Action::Read ? "READ" : "WRITE";
}

nlohmann::json to_json(const TraceEvent& event) {
  nlohmann::json j;
  j["instance_id"] = event.instance_id;
  j["action"] = to_string(event.action);
  j["payload"] = event.payload ? nlohmann::json(*event.payload)
                               : nlohmann::json(nullptr);
  j["cumulative_source"] = event.cumulative_source;
  j["wall_time_ms"] = event.wall_time_ms;
  return j;
}

TraceEvent trace_event_from_json(const nlohmann::json& j) {
  TraceEvent e;
  e.instance_id = j.at("instance_id").get<std::size_t>();
  const auto action = j.at("action").get<std::string>();
  if (action == "READ") {
    e.action = Action::Read;
  } else if (action == "WRITE") {
    e.action = Action::Write;
  } else {
    throw Error(ErrorCode::InvalidArgument, "bad trace action " + action);
  }
  if (!j.at("payload").is_null()) e.payload = j["payload"].get<std::string>();
  e.cumulative_source = j.at("cumulative_source").get<double>();
  e.wall_time_ms = j.value("wall_time_ms", 0.0);
  return e;
}

DelaySequence delays_from_trace(std::span<const TraceEvent> trace,
                                DataKind kind) {
  if (trace.empty() || trace.back().action != Action::Write ||
      trace.back().payload != std::optional<std::string>(std::string(kEos))) {
    throw Error(ErrorCode::InvalidArgument,
                "trace must end with a WRITE of the EOS sentinel");
  }
  std::vector<double> delays;
  double words_read = 0;
  double last_read_cumulative = 0;
  for (const auto& e : trace) {
    if (e.action == Action::Read) {
      if (kind == DataKind::Text) {
        if (e.payload && *e.payload != kEos) words_read += 1;
      } else {
        last_read_cumulative = e.cumulative_source;
      }
      continue;
    }
    if (e.payload && *e.payload == kEos) break;
    delays.push_back(kind == DataKind::Text ? words_read
                                            : last_read_cumulative);
  }
  return DelaySequence(kind, std::move(delays));
}

}  // namespace simt
