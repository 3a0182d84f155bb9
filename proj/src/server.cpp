// src/server.cpp

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

#include "simt/server.hpp"

#include <algorithm>
#include <cctype>

namespace simt {

using nlohmann::json;

json SrcResponse::to_json() const {
  json j;
  j["sent_id"] = sent_id;
  j["segment"] = segment ? json(*segment) : json(nullptr);
  j["samples"] = samples ? json(*samples) : json(nullptr);
  j["sample_rate"] = sample_rate ? json(*sample_rate) : json(nullptr);
  j["finished"] = finished;
  return j;
}

SrcResponse SrcResponse::from_json(const json& j) {
  SrcResponse r;
  r.sent_id = j.at("sent_id").get<std::size_t>();
  if (j.contains("segment") && !j["segment"].is_null()) {
    r.segment = j["segment"].get<std::string>();
  }
  if (j.contains("samples") && !j["samples"].is_null()) {
    r.samples = j["samples"].get<std::vector<std::int16_t>>();
  }
  if (j.contains("sample_rate") && !j["sample_rate"].is_null()) {
    r.sample_rate = j["sample_rate"].get<int>();
  }
  r.finished = j.at("finished").get<bool>();
  return r;
}

json ServerInfo::to_json() const {
  return {{"num_sentences", num_sentences},
          {"data_kind", std::string(to_string(data_kind))}};
}

ServerInfo ServerInfo::from_json(const json& j) {
  ServerInfo info;
  info.num_sentences = j.at("num_sentences").get<std::size_t>();
  info.data_kind = data_kind_from_string(j.at("data_kind").get<std::string>());
  return info;
}

struct EvaluationServer::Session {
  std::mutex mu;
  SessionState state;
  std::optional<std::chrono::steady_clock::time_point> started;

  double wall_ms() {
    const auto now = std::chrono::steady_clock::now();
    if (!started) started = now;
    return std::chrono::duration<double, std::milli>(now - *started).count();
  }

  void trace(Action action, std::optional<std::string> payload) {
    TraceEvent e;
    e.instance_id = state.instance_id;
    e.action = action;
    e.payload = std::move(payload);
    e.cumulative_source = state.elapsed_source;
    e.wall_time_ms = wall_ms();
    state.trace.push_back(std::move(e));
  }
};

EvaluationServer::EvaluationServer(std::vector<Instance> corpus,
                                   ServerOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)) {
  if (corpus_.empty()) {
    throw Error(ErrorCode::Corpus, "corpus has no instances");
  }
  kind_ = corpus_.front().kind;
  sessions_.reserve(corpus_.size());
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    if (corpus_[i].id != i || corpus_[i].kind != kind_) {
      throw Error(ErrorCode::Corpus,
                  "instances must be numbered 0..n-1 and share one data kind");
    }
    auto s = std::make_unique<Session>();
    s->state.instance_id = i;
    sessions_.push_back(std::move(s));
  }

  if (options_.output_dir.empty()) return;
  std::filesystem::create_directories(options_.output_dir);
  if (options_.resume) {
    auto state = simt::resume(options_.output_dir, corpus_.size());
    for (auto& row : state.completed) {
      sessions_[row.index]->state.phase = SessionPhase::Finished;
    }
    finished_ = state.completed.size();
    results_ = std::move(state.completed);
  }
  instances_log_ = std::make_unique<JsonlWriter>(
      options_.output_dir / kInstancesLog, options_.resume);
  if (options_.write_trace) {
    trace_log_ = std::make_unique<JsonlWriter>(options_.output_dir / kTraceLog,
                                               options_.resume);
  }
}

EvaluationServer::~EvaluationServer() = default;

ServerInfo EvaluationServer::info() const {
  return {corpus_.size(), kind_};
}

EvaluationServer::Session& EvaluationServer::session_for(
    std::size_t sent_id) const {
  if (sent_id >= sessions_.size()) {
    throw Error(ErrorCode::NotFound,
                "unknown sent_id " + std::to_string(sent_id));
  }
  return *sessions_[sent_id];
}

SrcResponse EvaluationServer::handle_src(
    std::size_t sent_id, std::optional<std::int64_t> segment_size_ms) {
  Session& s = session_for(sent_id);
  if (kind_ == DataKind::Speech) {
    if (!segment_size_ms) {
      throw Error(ErrorCode::BadRequest,
                  "segment_size is required for a speech corpus");
    }
    if (*segment_size_ms <= 0) {
      throw Error(ErrorCode::BadRequest, "segment_size must be positive");
    }
  }

  std::lock_guard lock(s.mu);
  auto& st = s.state;
  if (st.phase == SessionPhase::Finished) {
    throw Error(ErrorCode::Conflict,
                "sent_id " + std::to_string(sent_id) + " is finished");
  }
  const Instance& inst = corpus_[sent_id];

  SrcResponse r;
  r.sent_id = sent_id;
  if (kind_ == DataKind::Text) {
    if (st.read_cursor < inst.source_words.size()) {
      r.segment = inst.source_words[st.read_cursor++];
      st.elapsed_source = static_cast<double>(st.read_cursor);
    } else {
      r.segment = std::string(kEos);
      r.finished = true;
    }
    s.trace(Action::Read, r.segment);
    return r;
  }

  const int rate = inst.audio.sample_rate;
  const auto total = static_cast<std::int64_t>(inst.audio.samples.size());
  const std::int64_t remaining = total - st.sample_cursor;
  r.sample_rate = rate;
  if (remaining <= 0) {
    r.samples.emplace();
    r.finished = true;
    s.trace(Action::Read, std::nullopt);
    return r;
  }
  const std::int64_t wanted = std::max<std::int64_t>(
      1, (*segment_size_ms * rate + 500) / 1000);
  const std::int64_t n = std::min(remaining, wanted);
  const auto begin = inst.audio.samples.begin() + st.sample_cursor;
  r.samples.emplace(begin, begin + n);

  const std::int64_t duration = samples_to_ms(st.sample_cursor + n, rate) -
                                samples_to_ms(st.sample_cursor, rate);
  st.sample_cursor += n;
  st.read_cursor += 1;
  st.elapsed_source += static_cast<double>(duration);
  st.durations.push_back(static_cast<double>(duration));
  s.trace(Action::Read, std::nullopt);
  return r;
}

void EvaluationServer::handle_hypo(std::size_t sent_id, std::string_view token,
                                   std::optional<std::string> error) {
  Session& s = session_for(sent_id);
  if (token.empty() ||
      std::any_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isspace(c) != 0;
      })) {
    throw Error(ErrorCode::BadRequest,
                "hypothesis segment must be one non-empty token");
  }
  const bool eos = token == kEos;
  if (error && !eos) {
    throw Error(ErrorCode::BadRequest, "an error may only accompany EOS");
  }

  std::lock_guard lock(s.mu);
  auto& st = s.state;
  if (st.phase == SessionPhase::Finished) {
    throw Error(ErrorCode::Conflict,
                "sent_id " + std::to_string(sent_id) + " is finished");
  }
  s.trace(Action::Write, std::string(token));
  if (!eos) {
    st.tokens.emplace_back(token);
    st.delays.push_back(record_delay(st.elapsed_source, kind_));
    return;
  }
  st.phase = SessionPhase::Finished;
  finalize_locked(s, std::move(error));
}

void EvaluationServer::finalize_locked(Session& s,
                                       std::optional<std::string> error) {
  const auto& st = s.state;
  auto row = finalize_instance(corpus_[st.instance_id], st.tokens, st.delays,
                               st.durations, options_.metrics,
                               std::move(error));
  if (trace_log_) {
    std::vector<json> events;
    events.reserve(st.trace.size());
    for (const auto& e : st.trace) events.push_back(to_json(e));
    trace_log_->append_all(events);
  }
  if (instances_log_) instances_log_->append(row.to_json());

  std::function<void(const EvaluationResult&)> cb;
  {
    std::lock_guard lock(results_mu_);
    results_.push_back(row);
    cb = on_finished_;
  }
  ++finished_;
  if (cb) cb(row);
}

std::set<std::size_t> EvaluationServer::pending() const {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    std::lock_guard lock(sessions_[i]->mu);
    if (sessions_[i]->state.phase != SessionPhase::Finished) out.insert(i);
  }
  return out;
}

bool EvaluationServer::all_finished() const {
  return finished_.load() == corpus_.size();
}

std::size_t EvaluationServer::num_finished() const { return finished_.load(); }

SessionState EvaluationServer::session(std::size_t sent_id) const {
  Session& s = session_for(sent_id);
  std::lock_guard lock(s.mu);
  return s.state;
}

std::vector<EvaluationResult> EvaluationServer::results() const {
  std::vector<EvaluationResult> out;
  {
    std::lock_guard lock(results_mu_);
    out = results_;
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

CorpusReport EvaluationServer::finish() {
  if (!all_finished()) {
    throw Error(ErrorCode::Conflict,
                std::to_string(corpus_.size() - num_finished()) +
                    " instances are still pending");
  }
  auto report = aggregate_corpus(results());
  if (!options_.output_dir.empty()) {
    write_scores(options_.output_dir / kScoresFile, report);
  }
  return report;
}

void EvaluationServer::on_instance_finished(
    std::function<void(const EvaluationResult&)> cb) {
  std::lock_guard lock(results_mu_);
  on_finished_ = std::move(cb);
}

void write_config(const std::filesystem::path& output_dir,
                  const json& config) {
  std::filesystem::create_directories(output_dir);
  std::ofstream out(output_dir / kConfigFile, std::ios::trunc);
  out << config.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing config.json");
}

}  // namespace simt
