// src/client.cpp

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

#include "simt/client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <thread>

namespace simt {
namespace {

constexpr std::string_view kSubwordMarker = "@@";

bool is_source_end(const SrcResponse& r) {
  return r.finished || (r.segment && *r.segment == kEos);
}

Segment to_segment(const SrcResponse& r) {
  if (r.segment) return TextWord{*r.segment};
  if (!r.samples || !r.sample_rate) {
    throw Error(ErrorCode::Transport, "source response carries no segment");
  }
  return SpeechChunk::from_samples(*r.samples, *r.sample_rate);
}

}  // namespace

Segment preprocess(PreprocessKind kind, Segment raw) {
  if (kind == PreprocessKind::Lowercase) {
    if (auto* word = std::get_if<TextWord>(&raw)) {
      for (auto& c : word->text) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
  }
  return raw;
}

std::vector<std::string> Postprocessor::push(const std::string& raw) {
  if (kind_ == PostprocessKind::Identity) return {raw};
  if (raw == kEos) {
    std::vector<std::string> out;
    if (!pending_.empty()) out.push_back(std::exchange(pending_, {}));
    out.push_back(raw);
    return out;
  }
  if (raw.size() >= kSubwordMarker.size() && raw.ends_with(kSubwordMarker)) {
    pending_ += raw.substr(0, raw.size() - kSubwordMarker.size());
    return {};
  }
  return {std::exchange(pending_, {}) + raw};
}

double AgentState::consumed() const {
  if (sample_rate > 0) return static_cast<double>(consumed_ms());
  return static_cast<double>(reads);
}

std::int64_t AgentState::consumed_ms() const {
  return sample_rate > 0 ? samples_to_ms(samples_read, sample_rate) : 0;
}

void AgentState::update_source(Segment segment) {
  if (const auto* chunk = std::get_if<SpeechChunk>(&segment)) {
    samples_read += static_cast<std::int64_t>(chunk->samples.size());
    sample_rate = chunk->sample_rate;
  }
  source.push_back(std::move(segment));
  ++reads;
}

InstanceOutcome run_instance(const Agent& agent, std::size_t sent_id,
                             Transport& transport,
                             const ClientOptions& options) {
  InstanceOutcome out;
  out.sent_id = sent_id;

  AgentState state;
  state.sent_id = sent_id;
  Postprocessor post(options.post);
  bool first_request = true;

  // A finished session answers its first request with Conflict: it was
  // completed by an earlier (resumed) run or by another client.
  auto guarded = [&](auto&& call) -> bool {
    try {
      call();
    } catch (const Error& e) {
      if (first_request && e.code() == ErrorCode::Conflict) {
        out.skipped = true;
        return false;
      }
      throw;
    }
    first_request = false;
    return true;
  };

  auto send = [&](const std::string& token,
                  std::optional<std::string> error = {}) -> bool {
    if (!guarded([&] { transport.post_hypo(sent_id, token, error); })) {
      return false;
    }
    if (token != kEos) {
      state.target.push_back(token);
      out.hypothesis.push_back(token);
      out.delays.push_back(state.consumed());
    }
    return true;
  };

  while (true) {
    auto decision = agent.policy(state);
    // Reading past EOS would never terminate.
    if (decision == AgentDecision::Read && state.finish_read) {
      decision = AgentDecision::Write;
    }
    if (decision == AgentDecision::Read) {
      SrcResponse r;
      if (!guarded([&] {
            r = transport.get_src(sent_id, agent.segment_size_ms());
          })) {
        return out;
      }
      ++out.reads;
      if (!is_source_end(r)) {
        state.update_source(preprocess(options.pre, to_segment(r)));
        continue;
      }
      state.finish_read = true;
    }

    std::string raw;
    if (state.predictions >= options.max_writes) {
      log_warning("instance " + std::to_string(sent_id) +
                  " hit the write limit; forcing EOS");
      raw = std::string(kEos);
    } else {
      try {
        raw = agent.predict(state);
      } catch (const std::exception& e) {
        out.error = std::string("agent failure: ") + e.what();
        log_warning("instance " + std::to_string(sent_id) + ": " + *out.error);
        send(std::string(kEos), out.error);
        return out;
      }
    }
    ++state.predictions;
    for (const auto& token : post.push(raw)) {
      if (!send(token)) return out;
    }
    if (raw == kEos) return out;
  }
}

std::vector<InstanceOutcome> run_instances(
    const Agent& agent, const std::vector<std::size_t>& ids,
    const std::function<std::unique_ptr<Transport>()>& make_transport,
    const ClientOptions& options, std::size_t jobs) {
  std::vector<InstanceOutcome> outcomes(ids.size());
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(ids.size(), 1));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    try {
      auto transport = make_transport();
      while (!failed) {
        const std::size_t k = next++;
        if (k >= ids.size()) break;
        outcomes[k] = run_instance(agent, ids[k], *transport, options);
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!first_error) first_error = std::current_exception();
      failed = true;
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return outcomes;
}

}  // namespace simt
