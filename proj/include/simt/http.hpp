// include/simt/http.hpp

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

#include <chrono>
#include <memory>
#include <string>

#include "simt/client.hpp"
#include "simt/server.hpp"

namespace simt {

/// REST front end over an EvaluationServer:
///   GET  /src?sent_id=<int>[&segment_size=<ms>]
///   POST /hypo  {"sent_id": <int>, "segment": <string>[, "error": <string>]}
///   GET  /info
/// Errors map to 404 (unknown sent_id), 400 (bad request), 409 (finished
/// session) with a JSON body {"error": <message>}.
class HttpFrontend {
 public:
  explicit HttpFrontend(EvaluationServer& server);
  ~HttpFrontend();

  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound
  /// port. Throws Error{Io} if the port is unavailable.
  int bind(const std::string& host, int port);

  /// Serves until stop(). Blocks.
  void listen();

  /// Safe to call from any thread, including a request handler.
  void stop();

  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds backoff{100};
};

/// Protocol client over HTTP. Not thread-safe; use one per worker.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string host, int port, RetryPolicy retry = {});
  ~HttpTransport() override;

  ServerInfo info() override;
  SrcResponse get_src(std::size_t sent_id,
                      std::optional<std::int64_t> segment_size_ms) override;
  void post_hypo(std::size_t sent_id, std::string_view token,
                 std::optional<std::string> error = {}) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace simt
