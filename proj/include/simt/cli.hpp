// include/simt/cli.hpp

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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simt/client.hpp"
#include "simt/results.hpp"

namespace simt::cli {

enum class Mode { Joint, Server, Client };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct RunConfig {
  Mode mode = Mode::Joint;

  std::filesystem::path source;
  std::filesystem::path reference;
  std::filesystem::path output;
  DataKind data_kind = DataKind::Text;

  std::string host = "127.0.0.1";
  int port = 5000;

  std::string agent = "waitk";      // waitk | speech-chunk
  std::size_t waitk = 1;
  std::string predictor = "echo";   // echo | script
  std::optional<std::filesystem::path> script;
  std::optional<std::int64_t> segment_size_ms;
  std::size_t tokens_per_chunk = 0;
  bool lowercase = false;
  bool merge_subwords = false;

  bool resume = false;
  bool trace = false;
  std::size_t jobs = 1;
  std::optional<std::size_t> start_index;  // client: first sent_id
  std::optional<std::size_t> end_index;    // client: one past the last
  std::vector<std::string> metrics;        // extra sentence metrics

  /// Throws Error{InvalidArgument} on inconsistent settings.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Test seams: observe rows as they are persisted, learn the bound port.
struct RunHooks {
  std::function<void(const EvaluationResult&)> on_instance_finished;
  std::function<void(int port)> on_listening;
};

std::unique_ptr<Agent> make_agent(const RunConfig& cfg,
                                  const ServerInfo& info);

int run_joint(const RunConfig& cfg, const RunHooks& hooks = {});
int run_server(const RunConfig& cfg, const RunHooks& hooks = {});
int run_client(const RunConfig& cfg);

/// Parses argv (joint mode by default, `server` / `client` subcommands) and
/// dispatches. Returns the process exit code.
int main(int argc, char** argv);

}  // namespace simt::cli
