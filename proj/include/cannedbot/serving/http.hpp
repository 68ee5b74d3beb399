// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/error.hpp"
#include "cannedbot/serving/service.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace cannedbot::serving {

/// HTTP status for a failure: 400 for bad input, 404 for an unknown request
/// id, 409 for a duplicate or non-extensible extension, 503 without a model.
int http_status(ErrorCode code);

/// JSON endpoints over a SuggestionService:
///   POST /suggest  SuggestionRequest -> SuggestionResponse
///   POST /usage    UsageLogEntry (or {request_id, used_canned_id})
///   GET  /canned   the current list
///   POST /canned   {text} -> the appended response
///   POST /threshold  a calibration report or {threshold}
///   GET  /health, GET /metrics
/// Errors answer {error, message}.
class HttpServer {
 public:
  explicit HttpServer(SuggestionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  void listen();
  /// listen() on a background thread; returns once the server accepts.
  void start();
  void stop();

 private:
  SuggestionService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace cannedbot::serving
