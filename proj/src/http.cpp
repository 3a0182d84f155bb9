// src/http.cpp

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

#include "simt/http.hpp"

#include <atomic>
#include <charconv>
#include <thread>

#include "httplib.h"

namespace simt {
namespace {

using nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::Conflict: return 409;
    default: return 500;
  }
}

ErrorCode code_for(int status) {
  switch (status) {
    case 404: return ErrorCode::NotFound;
    case 400: return ErrorCode::BadRequest;
    case 409: return ErrorCode::Conflict;
    default: return ErrorCode::Transport;
  }
}

template <typename Int>
Int parse_int(const std::string& text, const char* name) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::BadRequest,
                std::string("invalid ") + name + " '" + text + "'");
  }
  return value;
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    reply_json(res, 200, fn());
  } catch (const Error& e) {
    reply_json(res, status_for(e.code()), {{"error", e.what()}});
  } catch (const json::exception& e) {
    reply_json(res, 400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    reply_json(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

struct HttpFrontend::Impl {
  EvaluationServer& server;
  httplib::Server http;
  bool bound = false;
  std::atomic<bool> listened{false};

  explicit Impl(EvaluationServer& s) : server(s) {
    http.set_keep_alive_timeout(1);
    http.set_tcp_nodelay(true);
    // the default also sets SO_REUSEPORT, which lets a second server share
    // a busy port silently
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                   reinterpret_cast<const char*>(&yes), sizeof(yes));
    });

    http.Get("/info", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return server.info().to_json(); });
    });

    http.Get("/src", [this](const httplib::Request& req,
                            httplib::Response& res) {
      guarded(res, [&] {
        if (!req.has_param("sent_id")) {
          throw Error(ErrorCode::BadRequest, "missing sent_id");
        }
        const auto sent_id = parse_int<std::size_t>(
            req.get_param_value("sent_id"), "sent_id");
        std::optional<std::int64_t> segment_size;
        if (req.has_param("segment_size")) {
          segment_size = parse_int<std::int64_t>(
              req.get_param_value("segment_size"), "segment_size");
        }
        return server.handle_src(sent_id, segment_size).to_json();
      });
    });

    http.Post("/hypo", [this](const httplib::Request& req,
                              httplib::Response& res) {
      guarded(res, [&] {
        const auto body = json::parse(req.body);
        std::optional<std::string> error;
        if (body.contains("error") && !body["error"].is_null()) {
          error = body["error"].get<std::string>();
        }
        server.handle_hypo(body.at("sent_id").get<std::size_t>(),
                           body.at("segment").get<std::string>(),
                           std::move(error));
        return json{{"ok", true}};
      });
    });
  }
};

HttpFrontend::HttpFrontend(EvaluationServer& server)
    : impl_(std::make_unique<Impl>(server)) {}

HttpFrontend::~HttpFrontend() {
  // httplib only closes a bound socket from a running listen loop.
  if (impl_->bound && !impl_->listened) {
    std::thread loop([this] { impl_->http.listen_after_bind(); });
    while (!impl_->http.is_running()) std::this_thread::yield();
    impl_->http.stop();
    loop.join();
    return;
  }
  impl_->http.stop();
}

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
    impl_->bound = true;
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" +
                                   std::to_string(port) + " (port in use?)");
  }
  impl_->bound = true;
  return port;
}

void HttpFrontend::listen() {
  impl_->listened = true;
  impl_->http.listen_after_bind();
}

// Only closes the listening socket; listen() drains the workers itself.
void HttpFrontend::stop() { impl_->http.stop(); }

bool HttpFrontend::is_running() const { return impl_->http.is_running(); }

struct HttpTransport::Impl {
  httplib::Client http;
  RetryPolicy retry;

  Impl(const std::string& host, int port, RetryPolicy r)
      : http(host, port), retry(r) {
    http.set_keep_alive(true);
    http.set_tcp_nodelay(true);
    http.set_connection_timeout(std::chrono::seconds(2));
    http.set_read_timeout(std::chrono::seconds(30));
  }

  template <typename Call>
  json request(Call&& call, const std::string& what) {
    for (int attempt = 0;; ++attempt) {
      auto res = call();
      if (res) {
        json body;
        try {
          body = json::parse(res->body);
        } catch (const json::exception&) {
          throw Error(ErrorCode::Transport,
                      what + ": malformed response body");
        }
        if (res->status == 200) return body;
        throw Error(code_for(res->status),
                    what + ": " + body.value("error", std::string("HTTP ") +
                                                          std::to_string(res->status)));
      }
      if (attempt >= retry.retries) {
        throw Error(ErrorCode::Transport,
                    what + ": " + httplib::to_string(res.error()));
      }
      std::this_thread::sleep_for(retry.backoff * (attempt + 1));
    }
  }
};

HttpTransport::HttpTransport(std::string host, int port, RetryPolicy retry)
    : impl_(std::make_unique<Impl>(host, port, retry)) {}

HttpTransport::~HttpTransport() = default;

ServerInfo HttpTransport::info() {
  return ServerInfo::from_json(
      impl_->request([&] { return impl_->http.Get("/info"); }, "GET /info"));
}

SrcResponse HttpTransport::get_src(
    std::size_t sent_id, std::optional<std::int64_t> segment_size_ms) {
  std::string path = "/src?sent_id=" + std::to_string(sent_id);
  if (segment_size_ms) {
    path += "&segment_size=" + std::to_string(*segment_size_ms);
  }
  return SrcResponse::from_json(
      impl_->request([&] { return impl_->http.Get(path); }, "GET /src"));
}

void HttpTransport::post_hypo(std::size_t sent_id, std::string_view token,
                              std::optional<std::string> error) {
  json body = {{"sent_id", sent_id}, {"segment", std::string(token)}};
  if (error) body["error"] = *error;
  const auto payload = body.dump();
  impl_->request(
      [&] { return impl_->http.Post("/hypo", payload, "application/json"); },
      "POST /hypo");
}

}  // namespace simt
