// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/serving/http.hpp"

#include "httplib.h"

namespace cannedbot::serving {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  reply(res, http_status(code), {{"error", to_string(code)}, {"message", message}});
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedRequest, std::string("body is not JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, e.code(), e.what());
    } catch (const Json::exception& e) {
      reply_error(res, ErrorCode::kMalformedRequest, e.what());
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

Json canned_json(const Snapshot& snap) {
  Json rs = Json::array();
  for (const auto& r : snap.canned.responses()) {
    rs.push_back({{"id", r.id}, {"text", r.text}, {"frequency", r.frequency}, {"cluster_id", r.cluster_id}});
  }
  return {{"checkpoint_id", snap.checkpoint_id}, {"responses", rs}};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRequest:
    case ErrorCode::kValidation:
    case ErrorCode::kParse:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kUnknownRequestId: return 404;
    case ErrorCode::kDuplicateResponse:
    case ErrorCode::kObjectiveNotExtensible: return 409;
    case ErrorCode::kModelUnavailable: return 503;
    default: return 500;
  }
}

HttpServer::HttpServer(SuggestionService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Post("/suggest", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto request = suggestion_request_from_json(parse_body(req));
           reply(res, 200, to_json(service_.suggest(request)));
         }));
  s.Post("/usage", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto entry = service_.log_usage(usage_report_from_json(parse_body(req)));
           reply(res, 200, curation::to_json(entry));
         }));
  s.Get("/canned", guarded([this](const httplib::Request&, httplib::Response& res) {
          const auto snap = service_.snapshot();
          if (!snap) throw Error(ErrorCode::kModelUnavailable, "no model loaded");
          reply(res, 200, canned_json(*snap));
        }));
  s.Post("/canned", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const Json body = parse_body(req);
           if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
             throw Error(ErrorCode::kMalformedRequest, "body needs a string text");
           }
           const auto added = service_.extend(body["text"].get<std::string>());
           reply(res, 201, {{"id", added.id}, {"text", added.text}});
         }));
  s.Post("/threshold", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const Json body = parse_body(req);
           if (!body.is_object() || !body.contains("threshold") || !body["threshold"].is_number()) {
             throw Error(ErrorCode::kMalformedRequest, "body needs a numeric threshold");
           }
           service_.set_threshold(body["threshold"].get<double>());
           reply(res, 200, {{"threshold", service_.threshold()}});
         }));
  s.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
          const auto snap = service_.snapshot();
          if (!snap) {
            reply(res, 503, {{"status", "unavailable"}});
            return;
          }
          reply(res, 200,
                {{"status", "ok"},
                 {"checkpoint_id", snap->checkpoint_id},
                 {"objective", objectives::to_string(snap->model->objective())},
                 {"canned", snap->canned.size()}});
        }));
  s.Get("/metrics", guarded([this](const httplib::Request&, httplib::Response& res) {
          reply(res, 200, service_.metrics());
        }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { listen(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace cannedbot::serving
